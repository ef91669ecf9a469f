#ifndef PSTSIM_TOGGLING_HPP
#define PSTSIM_TOGGLING_HPP

#include "pstsim/propagation.hpp"

namespace pstsim {

// One toggling frame: an ideal collective pulse fired on entry, then a dwell
// under the base Hamiltonian for the given fraction of the cycle.
struct Frame {
    Pulse pulse;
    double dwell_fraction = 0.0;
};

// A cyclic pulse sequence. The accumulated rotation after frame k is
// A_k = P_k * ... * P_1, and each cycle closes with A_K^{-1} (applied as
// inverse pulses in reverse order) so the frame returns to the lab between
// cycles. `loops` is the number of cycles a fixed mixing interval is split
// into; more loops means a shorter cycle and a better zeroth-order average.
struct TogglingSequence {
    std::vector<Frame> frames;
    int loops = 1;
    HamiltonianRecipe base_recipe;

    void validate() const; // dwells positive and summing to 1, loops >= 1
};

// Zeroth-order average over one cycle: sum_k f_k A_k^dagger H_base A_k.
// Frame rotations involve x/y pulses, so this works in the full basis.
OperatorMatrix average_hamiltonian_zero_order(const TogglingSequence& seq,
                                              const SpinNetwork& net);

struct CompiledXY {
    TogglingSequence sequence;
    // The average equals coupling_scale * H_XY; transfer times must be
    // stretched by 1/coupling_scale when the compiled sequence replaces a
    // native XY interaction.
    double coupling_scale = 0.5;
};

// Canonical two-frame construction turning the Ising ZZ coupling into an
// effective XY interaction: dwell half the cycle with z toggled onto x,
// half with z toggled onto y. The average is exactly (1/2) H_XY.
CompiledXY compile_xy_from_ising(const SpinNetwork& net);

// Exact unitary for one closed cycle of duration cycle_time.
OperatorMatrix one_cycle_propagator(const TogglingSequence& seq, double cycle_time,
                                    const SpinNetwork& net);

// Operator-norm distance between the exact one-cycle propagator and
// exp(-i H_avg cycle_time), divided by cycle_time. Zero for single-frame
// sequences; O(cycle_time) otherwise (the raw distance is O(cycle_time^2)).
double truncation_error(const TogglingSequence& seq, double cycle_time,
                        const SpinNetwork& net);

// Expands the sequence into an executable schedule covering total_time with
// seq.loops cycles (closing pulses included as zero-duration segments).
Schedule toggling_schedule(const TogglingSequence& seq, double total_time);

} // namespace pstsim

#endif
