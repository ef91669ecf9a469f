#include "pstsim/toggling.hpp"

#include <cmath>
#include <cstdio>

namespace pstsim {

namespace {

constexpr Complex kI{0.0, 1.0};

std::vector<CMatrix> accumulated_rotations(const TogglingSequence& seq, int num_sites) {
    std::vector<CMatrix> acc;
    acc.reserve(seq.frames.size());
    CMatrix a = CMatrix::Identity(basis_dimension(Basis::Full, num_sites),
                                  basis_dimension(Basis::Full, num_sites));
    for (const auto& f : seq.frames) {
        a = collective_rotation(num_sites, f.pulse.axis, f.pulse.angle, Basis::Full).data * a;
        acc.push_back(a);
    }
    return acc;
}

} // namespace

void TogglingSequence::validate() const {
    if (frames.empty()) throw ValidationError("toggling sequence has no frames");
    if (loops < 1) throw ValidationError("loop count must be >= 1");
    double sum = 0.0;
    for (const auto& f : frames) {
        if (!(f.dwell_fraction > 0.0))
            throw ValidationError("dwell fractions must be positive");
        sum += f.dwell_fraction;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("dwell fractions must sum to 1");
}

OperatorMatrix average_hamiltonian_zero_order(const TogglingSequence& seq,
                                              const SpinNetwork& net) {
    seq.validate();
    const OperatorMatrix base = assemble(seq.base_recipe, net, Basis::Full);
    const auto acc = accumulated_rotations(seq, net.num_sites());

    CMatrix avg = CMatrix::Zero(base.dim(), base.dim());
    for (std::size_t k = 0; k < seq.frames.size(); ++k)
        avg += seq.frames[k].dwell_fraction * (acc[k].adjoint() * base.data * acc[k]);
    return {std::move(avg), Basis::Full, net.num_sites(), true};
}

CompiledXY compile_xy_from_ising(const SpinNetwork& net) {
    if (net.couplings().empty())
        throw ValidationError("network has no couplings to compile");
    TogglingSequence seq;
    seq.base_recipe = HamiltonianRecipe::zz();
    seq.loops = 1;
    // A_1 = R_y(pi/2) toggles z onto -x; A_2 = R_x(pi/2) R_y(pi/2) toggles z
    // onto y. ZZ is quadratic in I^z, so the signs drop out and the two
    // dwells average to (XX + YY)/2.
    seq.frames = {
        {{Axis::Y, std::numbers::pi / 2}, 0.5},
        {{Axis::X, std::numbers::pi / 2}, 0.5},
    };
    return {std::move(seq), 0.5};
}

OperatorMatrix one_cycle_propagator(const TogglingSequence& seq, double cycle_time,
                                    const SpinNetwork& net) {
    seq.validate();
    if (!(cycle_time > 0.0)) throw ValidationError("cycle_time must be positive");

    const OperatorMatrix base = assemble(seq.base_recipe, net, Basis::Full);
    const int n = net.num_sites();
    CMatrix u = CMatrix::Identity(base.dim(), base.dim());
    CMatrix a = u;
    for (const auto& f : seq.frames) {
        a = collective_rotation(n, f.pulse.axis, f.pulse.angle, Basis::Full).data * a;
        u = propagator(base, f.dwell_fraction * cycle_time).data *
            collective_rotation(n, f.pulse.axis, f.pulse.angle, Basis::Full).data * u;
    }
    u = a.adjoint() * u; // close the cycle back to the lab frame
    return {std::move(u), Basis::Full, n, false};
}

double truncation_error(const TogglingSequence& seq, double cycle_time,
                        const SpinNetwork& net) {
    const OperatorMatrix u_exact = one_cycle_propagator(seq, cycle_time, net);
    const OperatorMatrix h_avg = average_hamiltonian_zero_order(seq, net);
    const CMatrix u_avg = propagator(h_avg, cycle_time).data;
    Eigen::JacobiSVD<CMatrix> svd(u_exact.data - u_avg);
    return svd.singularValues()(0) / cycle_time;
}

Schedule toggling_schedule(const TogglingSequence& seq, double total_time) {
    seq.validate();
    if (!(total_time > 0.0)) throw ValidationError("total_time must be positive");
    const double cycle = total_time / seq.loops;

    Schedule sched;
    sched.repetitions = seq.loops;
    for (const auto& f : seq.frames)
        sched.segments.push_back({seq.base_recipe, f.dwell_fraction * cycle, f.pulse});
    // Undo the accumulated rotation: inverse pulses, last frame first.
    for (auto it = seq.frames.rbegin(); it != seq.frames.rend(); ++it)
        sched.segments.push_back({seq.base_recipe, 0.0, Pulse{it->pulse.axis, -it->pulse.angle}});

    char buf[96];
    std::snprintf(buf, sizeof buf, "toggled mixing, %d loops, cycle=%.9g s", seq.loops, cycle);
    sched.description = buf;
    return sched;
}

} // namespace pstsim
