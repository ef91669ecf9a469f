#include "pstsim/trace_io.hpp"

#include "pstsim/errors.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pstsim {

namespace {

const char* axis_name(Axis axis) {
    switch (axis) {
    case Axis::X: return "X";
    case Axis::Y: return "Y";
    default: return "Z";
    }
}

std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_trace_csv(std::ostream& os, const TransferTrace& trace,
                     const std::vector<std::string>& labels) {
    if (!labels.empty() && static_cast<int>(labels.size()) != trace.num_sites)
        throw ValidationError("label count does not match trace width");

    os << "# pstsim trace v1";
    if (!labels.empty()) {
        os << "; sites=";
        for (std::size_t i = 0; i < labels.size(); ++i)
            os << (i ? "," : "") << labels[i];
    }
    if (!trace.metadata.empty())
        os << "; " << trace.metadata;
    os << "\n";

    os << "time_s";
    for (int i = 0; i < trace.num_sites; ++i)
        os << ",site_" << i;
    os << "\n";

    for (std::size_t s = 0; s < trace.times.size(); ++s) {
        const std::vector<double>& row = trace.site_probabilities[s];
        if (static_cast<int>(row.size()) != trace.num_sites)
            throw ValidationError("trace row width does not match num_sites");
        os << num12(trace.times[s]);
        for (double p : row)
            os << "," << num12(p);
        os << "\n";
    }
}

void write_trace_csv(const std::string& path, const TransferTrace& trace,
                     const std::vector<std::string>& labels) {
    std::ostringstream body;
    write_trace_csv(body, trace, labels);

    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot write trace file: " + path);
    file << body.str();
    if (!file)
        throw std::runtime_error("short write on trace file: " + path);
}

std::string schedule_to_text(const Schedule& schedule) {
    std::ostringstream os;
    os << "pstsim schedule v1\n";
    os << "description: " << schedule.description << "\n";
    os << "repetitions: " << schedule.repetitions << "\n";
    os << "segments: " << schedule.segments.size() << "\n";
    for (std::size_t k = 0; k < schedule.segments.size(); ++k) {
        const Segment& seg = schedule.segments[k];
        os << "segment " << k << ":";
        if (seg.pre_pulse)
            os << " pulse=" << axis_name(seg.pre_pulse->axis) << ":"
               << num17(seg.pre_pulse->angle);
        os << " recipe=" << seg.recipe.key() << " duration=" << num17(seg.duration) << "\n";
    }
    return os.str();
}

void dump_operator(std::ostream& os, const OperatorMatrix& op) {
    os << "# pstsim operator v1; basis="
       << (op.basis == Basis::Full ? "full" : "single-excitation")
       << "; sites=" << op.num_sites << "; dim=" << op.dim()
       << "; hermitian=" << (op.hermitian ? 1 : 0) << "\n";
    for (int r = 0; r < op.dim(); ++r)
        for (int c = 0; c < op.dim(); ++c) {
            const Complex v = op.data(r, c);
            if (v.real() == 0.0 && v.imag() == 0.0)
                continue;
            os << r << " " << c << " " << num17(v.real()) << " " << num17(v.imag()) << "\n";
        }
}

} // namespace pstsim
