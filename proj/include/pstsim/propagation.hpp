#ifndef PSTSIM_PROPAGATION_HPP
#define PSTSIM_PROPAGATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "pstsim/hamiltonian.hpp"

namespace pstsim {

// |0> = spin down, |1> = spin up along z. States are unit vectors in the
// basis tagged alongside the amplitudes.
struct QuantumState {
    CVector amplitudes;
    Basis basis = Basis::SingleExcitation;
    int num_sites = 0;

    static QuantumState vacuum(int num_sites, Basis basis);
    // All spins down except `site` up.
    static QuantumState single_excitation(int num_sites, int site, Basis basis);
    static QuantumState from_amplitudes(CVector amps, Basis basis, int num_sites);

    double norm() const { return amplitudes.norm(); }
    // Per-site spin-up probability.
    std::vector<double> site_probabilities() const;
    double site_probability(int site) const;
    // <state|op|state>, real part (op must be flagged Hermitian).
    double expectation(const OperatorMatrix& op) const;
    // |<this|other>|^2
    double overlap(const QuantumState& other) const;
};

struct Pulse {
    Axis axis = Axis::X;
    double angle = 0.0; // radians
};

struct Segment {
    HamiltonianRecipe recipe;
    double duration = 0.0; // seconds
    std::optional<Pulse> pre_pulse;
};

// Ordered segments executed `repetitions` times: per segment, the optional
// ideal zero-duration pulse fires first, then exp(-i H * duration) acts.
struct Schedule {
    std::vector<Segment> segments;
    int repetitions = 1;
    std::string description;

    void validate(const SpinNetwork& net) const;
    double cycle_time() const;
    double total_time() const { return cycle_time() * repetitions; }
    int total_segments() const { return static_cast<int>(segments.size()) * repetitions; }
};

enum class Sampling { PerRepetition, PerSegment };

struct TransferTrace {
    std::vector<double> times;                          // seconds, monotone
    std::vector<std::vector<double>> site_probabilities; // [sample][site]
    int num_sites = 0;
    std::string metadata;

    std::size_t num_samples() const { return times.size(); }
    // Largest probability reached on `site` and the time it happens.
    std::pair<double, double> peak(int site) const;
};

// U = exp(-i H t) by eigendecomposition; H must be Hermitian (defect < 1e-12).
OperatorMatrix propagator(const OperatorMatrix& h, double t);

QuantumState evolve(const QuantumState& state, const OperatorMatrix& h, double t);

// Ideal collective rotation exp(-i angle sum_i I_i^axis). A 2*pi rotation
// returns the state times (-1)^N (spin-1/2 sign convention). In the
// single-excitation basis only z rotations are representable.
QuantumState apply_global_pulse(const QuantumState& state, Axis axis, double angle);

// Same rotation as an operator matrix (used for frame conjugations).
OperatorMatrix collective_rotation(int num_sites, Axis axis, double angle, Basis basis);

struct ScheduleRun {
    TransferTrace trace;
    QuantumState final_state;
};

// Executes the schedule, recording per-site spin-up probabilities at t = 0
// and then after each repetition (default) or each segment. Segment
// propagators are cached per (recipe, duration), so an n-fold repetition
// costs n matrix-vector products after one diagonalization per segment kind.
ScheduleRun run_schedule(const QuantumState& state, const Schedule& schedule,
                         const SpinNetwork& net, Sampling sampling = Sampling::PerRepetition);

} // namespace pstsim

#endif
