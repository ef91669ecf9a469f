#ifndef PSTSIM_NETWORK_HPP
#define PSTSIM_NETWORK_HPP

#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pstsim/errors.hpp"

namespace pstsim {

// Unit convention used throughout: hbar = 1, frequencies enter config
// files in Hz and are converted to angular frequency (rad/s) internally.
// Times are always seconds.
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double hz_to_angular(double hz) { return kTwoPi * hz; }
inline double angular_to_hz(double w) { return w / kTwoPi; }

struct Coupling {
    int i; // i < j always
    int j;
    double j_hz;
};

// Immutable spin-1/2 network: per-site chemical shifts and a symmetric
// sparse set of pairwise couplings. Shifts and couplings are stored in Hz
// as given; accessors expose the angular (rad/s) values used by builders.
class SpinNetwork {
public:
    static SpinNetwork create(std::vector<std::string> labels,
                              std::vector<double> shifts_hz,
                              std::vector<Coupling> couplings);

    int num_sites() const { return static_cast<int>(labels_.size()); }

    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(int i) const { return labels_.at(i); }

    double shift_hz(int i) const;
    // Delta-Omega_i = 2*pi*Delta-nu_i
    double shift_angular(int i) const { return hz_to_angular(shift_hz(i)); }

    const std::vector<Coupling>& couplings() const { return couplings_; }
    bool coupled(int i, int j) const;
    double coupling_hz(int i, int j) const; // 0 when uncoupled
    double coupling_angular(int i, int j) const { return hz_to_angular(coupling_hz(i, j)); }

    // |Delta-Omega_i - Delta-Omega_j| in rad/s; with hbar = 1 this is the
    // pair's energy splitting. Throws on i == j or bad indices.
    double shift_difference(int i, int j) const;

    // Index of a site by label, -1 when absent.
    int find_site(const std::string& label) const;

private:
    SpinNetwork() = default;

    std::vector<std::string> labels_;
    std::vector<double> shifts_hz_;
    std::vector<Coupling> couplings_; // normalized i < j, sorted
};

// Parses the [sites]/[couplings] config format (see docs/network-format.md).
SpinNetwork load_network(const std::string& config_text);
SpinNetwork load_network_file(const std::string& path);

// Canonical text form; load_network(serialize(net)) reproduces net exactly.
std::string serialize(const SpinNetwork& net);

} // namespace pstsim

#endif
