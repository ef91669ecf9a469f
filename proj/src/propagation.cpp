#include "pstsim/propagation.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace pstsim {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kHermitianTol = 1e-12;
constexpr double kNormTol = 1e-10;

void check_state(const CVector& amps, Basis basis, int num_sites) {
    if (amps.size() != basis_dimension(basis, num_sites))
        throw ValidationError("state dimension does not match basis");
    if (std::abs(amps.norm() - 1.0) > kNormTol)
        throw ValidationError("state vector is not normalized");
}

void check_compatible(const QuantumState& s, const OperatorMatrix& op) {
    if (s.basis != op.basis || s.num_sites != op.num_sites)
        throw ValidationError("state and operator basis tags do not match");
}

// 2x2 rotation exp(-i angle sigma_axis / 2)
void single_spin_rotation(Axis axis, double angle, Complex r[2][2]) {
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    switch (axis) {
    case Axis::X:
        r[0][0] = c;        r[0][1] = -kI * s;
        r[1][0] = -kI * s;  r[1][1] = c;
        break;
    case Axis::Y:
        r[0][0] = c;  r[0][1] = -s;
        r[1][0] = s;  r[1][1] = c;
        break;
    case Axis::Z:
        r[0][0] = std::exp(kI * (0.5 * angle));
        r[0][1] = 0.0;
        r[1][0] = 0.0;
        r[1][1] = std::exp(-kI * (0.5 * angle));
        break;
    }
}

} // namespace

QuantumState QuantumState::vacuum(int num_sites, Basis basis) {
    CVector amps = CVector::Zero(basis_dimension(basis, num_sites));
    amps(0) = 1.0;
    return {std::move(amps), basis, num_sites};
}

QuantumState QuantumState::single_excitation(int num_sites, int site, Basis basis) {
    if (site < 0 || site >= num_sites)
        throw ValidationError("excited site index out of range");
    CVector amps = CVector::Zero(basis_dimension(basis, num_sites));
    if (basis == Basis::Full)
        amps(Eigen::Index{1} << site) = 1.0;
    else
        amps(site + 1) = 1.0;
    return {std::move(amps), basis, num_sites};
}

QuantumState QuantumState::from_amplitudes(CVector amps, Basis basis, int num_sites) {
    check_state(amps, basis, num_sites);
    return {std::move(amps), basis, num_sites};
}

std::vector<double> QuantumState::site_probabilities() const {
    std::vector<double> p(num_sites, 0.0);
    if (basis == Basis::SingleExcitation) {
        for (int i = 0; i < num_sites; ++i) p[i] = std::norm(amplitudes(i + 1));
    } else {
        for (Eigen::Index b = 0; b < amplitudes.size(); ++b) {
            const double w = std::norm(amplitudes(b));
            if (w == 0.0) continue;
            for (int i = 0; i < num_sites; ++i)
                if ((b >> i) & 1) p[i] += w;
        }
    }
    return p;
}

double QuantumState::site_probability(int site) const {
    if (site < 0 || site >= num_sites)
        throw ValidationError("site index out of range");
    return site_probabilities()[site];
}

double QuantumState::expectation(const OperatorMatrix& op) const {
    check_compatible(*this, op);
    if (!op.hermitian) throw ValidationError("expectation needs a Hermitian operator");
    return (amplitudes.adjoint() * op.data * amplitudes)(0).real();
}

double QuantumState::overlap(const QuantumState& other) const {
    if (basis != other.basis || num_sites != other.num_sites)
        throw ValidationError("overlap across different bases");
    return std::norm(amplitudes.dot(other.amplitudes));
}

void Schedule::validate(const SpinNetwork& net) const {
    if (segments.empty()) throw ValidationError("schedule has no segments");
    if (repetitions < 1) throw ValidationError("schedule repetitions must be >= 1");
    for (const auto& seg : segments) {
        if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration))
            throw ValidationError("segment duration must be >= 0");
        seg.recipe.validate(net);
    }
}

double Schedule::cycle_time() const {
    double t = 0.0;
    for (const auto& seg : segments) t += seg.duration;
    return t;
}

std::pair<double, double> TransferTrace::peak(int site) const {
    double best_p = 0.0, best_t = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (site_probabilities[k][site] > best_p) {
            best_p = site_probabilities[k][site];
            best_t = times[k];
        }
    }
    return {best_p, best_t};
}

OperatorMatrix propagator(const OperatorMatrix& h, double t) {
    if (!h.hermitian || hermiticity_defect(h.data) > kHermitianTol)
        throw ValidationError("propagator requires a Hermitian generator");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.data);
    const Eigen::VectorXd& w = es.eigenvalues();
    CVector phases(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::exp(-kI * (w(k) * t));
    CMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return {std::move(u), h.basis, h.num_sites, false};
}

QuantumState evolve(const QuantumState& state, const OperatorMatrix& h, double t) {
    check_compatible(state, h);
    const OperatorMatrix u = propagator(h, t);
    return {u.data * state.amplitudes, state.basis, state.num_sites};
}

QuantumState apply_global_pulse(const QuantumState& state, Axis axis, double angle) {
    QuantumState out = state;
    if (state.basis == Basis::SingleExcitation) {
        if (axis != Axis::Z)
            throw ValidationError(
                "only z pulses act within the single-excitation basis; "
                "x/y pulses need the full basis");
        const double n = state.num_sites;
        const Complex vac_phase = std::exp(-kI * (angle * (-0.5 * n)));
        const Complex exc_phase = std::exp(-kI * (angle * (-0.5 * n + 1.0)));
        out.amplitudes(0) *= vac_phase;
        for (int k = 0; k < state.num_sites; ++k) out.amplitudes(k + 1) *= exc_phase;
        return out;
    }

    Complex r[2][2];
    single_spin_rotation(axis, angle, r);
    const Eigen::Index dim = out.amplitudes.size();
    for (int i = 0; i < state.num_sites; ++i) {
        const Eigen::Index m = Eigen::Index{1} << i;
        for (Eigen::Index b = 0; b < dim; ++b) {
            if (b & m) continue; // handle each (down, up) amplitude pair once
            const Complex a0 = out.amplitudes(b);
            const Complex a1 = out.amplitudes(b | m);
            out.amplitudes(b) = r[0][0] * a0 + r[0][1] * a1;
            out.amplitudes(b | m) = r[1][0] * a0 + r[1][1] * a1;
        }
    }
    return out;
}

OperatorMatrix collective_rotation(int num_sites, Axis axis, double angle, Basis basis) {
    const Eigen::Index dim = basis_dimension(basis, num_sites);
    CMatrix u = CMatrix::Zero(dim, dim);

    if (basis == Basis::SingleExcitation) {
        if (axis != Axis::Z)
            throw ValidationError(
                "x/y collective rotations leave the single-excitation sector; "
                "use the full basis");
        const double n = num_sites;
        u(0, 0) = std::exp(-kI * (angle * (-0.5 * n)));
        for (int k = 0; k < num_sites; ++k)
            u(k + 1, k + 1) = std::exp(-kI * (angle * (-0.5 * n + 1.0)));
        return {std::move(u), basis, num_sites, false};
    }

    Complex r[2][2];
    single_spin_rotation(axis, angle, r);
    for (Eigen::Index col = 0; col < dim; ++col) {
        for (Eigen::Index row = 0; row < dim; ++row) {
            Complex v = 1.0;
            for (int i = 0; i < num_sites && v != 0.0; ++i)
                v *= r[(row >> i) & 1][(col >> i) & 1];
            u(row, col) = v;
        }
    }
    return {std::move(u), basis, num_sites, false};
}

namespace {

// Propagators keyed on the recipe's canonical key plus the duration's bits;
// one cache per run keeps workers independent.
class PropagatorCache {
public:
    const CMatrix& get(const HamiltonianRecipe& recipe, double duration,
                       const SpinNetwork& net, Basis basis) {
        std::string key = recipe.key();
        key += ";t=";
        const auto bits = std::bit_cast<std::uint64_t>(duration);
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
        key += buf;

        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const OperatorMatrix h = assemble(recipe, net, basis);
        auto [pos, _] = cache_.emplace(std::move(key), propagator(h, duration).data);
        return pos->second;
    }

private:
    std::unordered_map<std::string, CMatrix> cache_;
};

} // namespace

ScheduleRun run_schedule(const QuantumState& state, const Schedule& schedule,
                         const SpinNetwork& net, Sampling sampling) {
    if (state.num_sites != net.num_sites())
        throw ValidationError("state size does not match network");
    schedule.validate(net);

    PropagatorCache cache;
    QuantumState psi = state;
    TransferTrace trace;
    trace.num_sites = net.num_sites();
    trace.metadata = schedule.description +
                     (schedule.description.empty() ? "" : "; ") +
                     (sampling == Sampling::PerRepetition ? "sampling=per-repetition"
                                                          : "sampling=per-segment");

    double t = 0.0;
    trace.times.push_back(t);
    trace.site_probabilities.push_back(psi.site_probabilities());

    for (int rep = 0; rep < schedule.repetitions; ++rep) {
        for (const auto& seg : schedule.segments) {
            if (seg.pre_pulse)
                psi = apply_global_pulse(psi, seg.pre_pulse->axis, seg.pre_pulse->angle);
            if (seg.duration > 0.0) {
                const CMatrix& u = cache.get(seg.recipe, seg.duration, net, state.basis);
                psi.amplitudes = u * psi.amplitudes;
            }
            t += seg.duration;
            if (sampling == Sampling::PerSegment) {
                trace.times.push_back(t);
                trace.site_probabilities.push_back(psi.site_probabilities());
            }
        }
        if (sampling == Sampling::PerRepetition) {
            trace.times.push_back(t);
            trace.site_probabilities.push_back(psi.site_probabilities());
        }
    }
    return {std::move(trace), std::move(psi)};
}

} // namespace pstsim
