#ifndef PSTSIM_TRACE_IO_HPP
#define PSTSIM_TRACE_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "pstsim/propagation.hpp"

namespace pstsim {

// CSV layout (schema "pstsim trace v1"):
//   # pstsim trace v1; sites=<labels>; <trace metadata>
//   time_s,site_0,...,site_{N-1}
//   <rows, %.12g>
// Writing is all-or-nothing: the file variant renders the full document in
// memory and only then touches the filesystem.
void write_trace_csv(std::ostream& os, const TransferTrace& trace,
                     const std::vector<std::string>& labels);
void write_trace_csv(const std::string& path, const TransferTrace& trace,
                     const std::vector<std::string>& labels);

// Structured text form of a schedule (schema "pstsim schedule v1"), exact to
// the last bit via %.17g. Recipes appear as their canonical keys.
std::string schedule_to_text(const Schedule& schedule);

// Sparse triplet dump of an operator (schema "pstsim operator v1"):
// one "row col real imag" line per structurally nonzero entry.
void dump_operator(std::ostream& os, const OperatorMatrix& op);

} // namespace pstsim

#endif
