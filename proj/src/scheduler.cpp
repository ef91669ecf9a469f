#include "pstsim/scheduler.hpp"

#include "pstsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pstsim {

namespace {

void require_site(const SpinNetwork& net, int idx, const char* role) {
    if (idx < 0 || idx >= net.num_sites()) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s site index %d out of range [0, %d)",
                      role, idx, net.num_sites());
        throw ValidationError(buf);
    }
}

bool same_pair(int a, int b, int i, int j) {
    return (a == i && b == j) || (a == j && b == i);
}

// Distance of x from the nearest integer, in [0, 0.5].
double fractional_residual(double x) {
    return std::abs(x - std::round(x));
}

std::string pair_label(const SpinNetwork& net, int i, int j) {
    return net.label(i) + "-" + net.label(j);
}

} // namespace

PairTiming resonant_tau(const SpinNetwork& net, int i, int j, int harmonic) {
    require_site(net, i, "source");
    require_site(net, j, "target");
    if (i == j)
        throw ValidationError("pair timing needs two distinct sites");
    if (harmonic < 1)
        throw ValidationError("harmonic must be a positive integer");

    const double delta = net.shift_difference(i, j); // rad/s
    if (delta == 0.0)
        throw ValidationError("sites " + pair_label(net, i, j) +
                              " have identical offsets; no commensurate time exists");

    PairTiming timing;
    timing.site_i = i;
    timing.site_j = j;
    timing.harmonic = harmonic;
    timing.tau_free = static_cast<double>(harmonic) * kTwoPi / delta;

    for (const Coupling& c : net.couplings()) {
        if (same_pair(c.i, c.j, i, j))
            continue;
        const double cycles = net.shift_difference(c.i, c.j) * timing.tau_free / kTwoPi;
        timing.residuals.push_back({c.i, c.j, fractional_residual(cycles)});
    }
    return timing;
}

std::vector<PairResidual> poorly_dephased(const PairTiming& timing, double min_residual) {
    std::vector<PairResidual> out;
    for (const PairResidual& r : timing.residuals)
        if (r.residual < min_residual)
            out.push_back(r);
    return out;
}

double leakage_score(const SpinNetwork& net, const PairTiming& timing, double tau_mix) {
    if (!(tau_mix > 0.0) || !std::isfinite(tau_mix))
        throw ValidationError("tau_mix must be positive and finite");

    // Per cycle an off-target pair gains coupling action pi*J*tau_mix and a
    // dephasing angle that, observed stroboscopically, is the accrued free
    // phase wrapped to the nearest full turn: 2*pi*residual. The score is
    // the worst ratio of the two.
    double worst = 0.0;
    for (const PairResidual& r : timing.residuals) {
        const double j_hz = std::abs(net.coupling_hz(r.site_k, r.site_l));
        if (r.residual < 1e-12)
            return std::numeric_limits<double>::infinity();
        worst = std::max(worst, j_hz * tau_mix / (2.0 * r.residual));
    }
    return worst;
}

PairTransferPlan pair_transfer_schedule(const SpinNetwork& net, int i, int j,
                                        double tau_mix, int harmonic) {
    if (!(tau_mix > 0.0) || !std::isfinite(tau_mix))
        throw ValidationError("tau_mix must be positive and finite");
    PairTiming timing = resonant_tau(net, i, j, harmonic);
    if (!net.coupled(i, j))
        throw ValidationError("sites " + pair_label(net, i, j) +
                              " are not coupled; nothing to transfer");

    PairTransferPlan plan;
    plan.timing = timing;
    plan.tau_mix = tau_mix;

    const double j_hz = std::abs(net.coupling_hz(i, j));
    plan.ideal_mix_time = 1.0 / (2.0 * j_hz);
    plan.cycles = std::max(1, static_cast<int>(std::lround(plan.ideal_mix_time / tau_mix)));
    plan.accumulated_mix_time = plan.cycles * tau_mix;
    const double s = std::sin(kPi * j_hz * plan.accumulated_mix_time);
    plan.predicted_fidelity = s * s;
    plan.rounding_loss = 1.0 - plan.predicted_fidelity;
    plan.wall_time = plan.cycles * (tau_mix + timing.tau_free);

    char desc[160];
    std::snprintf(desc, sizeof(desc), "pair transfer %s, n=%d, tau_mix=%.9g s, tau_free=%.9g s",
                  pair_label(net, i, j).c_str(), plan.cycles, tau_mix, timing.tau_free);
    plan.schedule.description = desc;
    plan.schedule.repetitions = plan.cycles;
    plan.schedule.segments.push_back({HamiltonianRecipe::xy(), tau_mix, std::nullopt});
    plan.schedule.segments.push_back({HamiltonianRecipe::zeeman(), timing.tau_free, std::nullopt});
    return plan;
}

RelayPlan relay_plan(const SpinNetwork& net, const std::vector<int>& pathway,
                     double tau_mix, const std::vector<int>& harmonics) {
    if (pathway.size() < 2)
        throw ValidationError("relay pathway needs at least two sites");
    const size_t hops = pathway.size() - 1;
    if (!harmonics.empty() && harmonics.size() != hops)
        throw ValidationError("harmonics list must have one entry per pathway edge");

    RelayPlan plan;
    plan.pathway = pathway;
    for (size_t h = 0; h < hops; ++h) {
        const int n = harmonics.empty() ? 1 : harmonics[h];
        plan.hops.push_back(pair_transfer_schedule(net, pathway[h], pathway[h + 1], tau_mix, n));
        plan.predicted_fidelity *= plan.hops.back().predicted_fidelity;
        plan.total_time += plan.hops.back().wall_time;
    }
    return plan;
}

RelayRun run_relay(const SpinNetwork& net, const RelayPlan& plan,
                   Basis basis, Sampling sampling) {
    if (plan.hops.empty())
        throw ValidationError("relay plan has no hops");

    QuantumState state = QuantumState::single_excitation(net.num_sites(),
                                                         plan.pathway.front(), basis);
    RelayRun run;
    run.trace.num_sites = net.num_sites();

    std::string route = net.label(plan.pathway.front());
    for (size_t h = 1; h < plan.pathway.size(); ++h)
        route += "->" + net.label(plan.pathway[h]);
    run.trace.metadata = "relay " + route +
        (sampling == Sampling::PerRepetition ? "; sampling=per-repetition"
                                             : "; sampling=per-segment");

    double offset = 0.0;
    for (size_t h = 0; h < plan.hops.size(); ++h) {
        ScheduleRun hop = run_schedule(state, plan.hops[h].schedule, net, sampling);
        // Every hop trace starts with its own t=0 sample; keep it only once.
        const size_t first = (h == 0) ? 0 : 1;
        for (size_t s = first; s < hop.trace.times.size(); ++s) {
            run.trace.times.push_back(offset + hop.trace.times[s]);
            run.trace.site_probabilities.push_back(hop.trace.site_probabilities[s]);
        }
        offset += plan.hops[h].schedule.total_time();
        state = hop.final_state;
        run.hop_end_probabilities.push_back(state.site_probability(plan.pathway[h + 1]));
    }
    run.final_state = std::move(state);
    return run;
}

HopSearchResult optimize_hop(const SpinNetwork& net, int i, int j, const HopSearch& search) {
    if (search.harmonics.empty() || search.tau_mix_values.empty())
        throw ValidationError("hop search grid is empty");

    HopSearchResult best;
    best.fidelity = -1.0;
    double lowest = 2.0;
    for (int n : search.harmonics) {
        for (double tau : search.tau_mix_values) {
            PairTransferPlan plan = pair_transfer_schedule(net, i, j, tau, n);
            QuantumState state = QuantumState::single_excitation(net.num_sites(), i,
                                                                 Basis::SingleExcitation);
            ScheduleRun run = run_schedule(state, plan.schedule, net, Sampling::PerRepetition);
            const double fidelity = run.final_state.site_probability(j);
            lowest = std::min(lowest, fidelity);
            const bool better = fidelity > best.fidelity + 1e-12 ||
                (std::abs(fidelity - best.fidelity) <= 1e-12 && plan.wall_time < best.wall_time);
            if (better) {
                best.harmonic = n;
                best.tau_mix = tau;
                best.fidelity = fidelity;
                best.wall_time = plan.wall_time;
            }
        }
    }
    // If every grid point performs essentially the same, the search carries
    // no information and the caller should widen it.
    best.flat_landscape = (best.fidelity - lowest) < 1e-3;
    return best;
}

TriadTiming triad_resonant_tau(const SpinNetwork& net, int i, int j, int k,
                               int max_harmonic, double tolerance) {
    require_site(net, i, "first");
    require_site(net, j, "middle");
    require_site(net, k, "last");
    if (i == j || j == k || i == k)
        throw ValidationError("triad timing needs three distinct sites");
    if (max_harmonic < 1)
        throw ValidationError("max_harmonic must be a positive integer");
    if (!(tolerance >= 0.0) || tolerance >= 0.5)
        throw ValidationError("triad tolerance must lie in [0, 0.5)");

    const double delta_ij = net.shift_difference(i, j);
    const double delta_jk = net.shift_difference(j, k);
    if (delta_ij == 0.0 || delta_jk == 0.0)
        throw ValidationError("triad sites must have pairwise distinct offsets");

    for (int n = 1; n <= max_harmonic; ++n) {
        const double tau = n * kTwoPi / delta_ij;
        const double cycles_jk = delta_jk * tau / kTwoPi;
        const int m = static_cast<int>(std::lround(cycles_jk));
        const double residual = std::abs(cycles_jk - m);
        if (m < 1 || residual > tolerance)
            continue;

        TriadTiming timing;
        timing.site_i = i;
        timing.site_j = j;
        timing.site_k = k;
        timing.harmonic_ij = n;
        timing.harmonic_jk = m;
        timing.tau_free = tau;
        timing.residual_jk = residual;
        for (const Coupling& c : net.couplings()) {
            if (same_pair(c.i, c.j, i, j) || same_pair(c.i, c.j, j, k))
                continue;
            const double cycles = net.shift_difference(c.i, c.j) * tau / kTwoPi;
            timing.residuals.push_back({c.i, c.j, fractional_residual(cycles)});
        }
        return timing;
    }

    char buf[192];
    std::snprintf(buf, sizeof(buf),
                  "no common commensurate time for %s and %s within harmonic %d (tolerance %g)",
                  pair_label(net, i, j).c_str(), pair_label(net, j, k).c_str(),
                  max_harmonic, tolerance);
    throw ValidationError(buf);
}

TriadPlan triad_transfer_schedule(const SpinNetwork& net, int i, int j, int k,
                                  double tau_mix, int max_harmonic, double tolerance) {
    if (!(tau_mix > 0.0) || !std::isfinite(tau_mix))
        throw ValidationError("tau_mix must be positive and finite");
    TriadTiming timing = triad_resonant_tau(net, i, j, k, max_harmonic, tolerance);
    if (!net.coupled(i, j) || !net.coupled(j, k))
        throw ValidationError("triad transfer needs couplings " + pair_label(net, i, j) +
                              " and " + pair_label(net, j, k));

    TriadPlan plan;
    plan.timing = timing;
    plan.tau_mix = tau_mix;

    // Isolated three-site chain with hopping elements a = pi*J_ij and
    // b = pi*J_jk: end-to-end probability (2ab/(a^2+b^2))^2 sin^4(w t / 2)
    // with w = sqrt(a^2 + b^2), peaking at t = pi / w.
    const double a = kPi * std::abs(net.coupling_hz(i, j));
    const double b = kPi * std::abs(net.coupling_hz(j, k));
    const double w = std::hypot(a, b);
    const double prefactor = std::pow(2.0 * a * b / (a * a + b * b), 2.0);
    plan.ideal_mix_time = kPi / w;
    plan.cycles = std::max(1, static_cast<int>(std::lround(plan.ideal_mix_time / tau_mix)));
    plan.accumulated_mix_time = plan.cycles * tau_mix;
    const double s = std::sin(w * plan.accumulated_mix_time / 2.0);
    plan.predicted_fidelity = prefactor * s * s * s * s;
    plan.wall_time = plan.cycles * (tau_mix + timing.tau_free);

    char desc[192];
    std::snprintf(desc, sizeof(desc),
                  "triad transfer %s->%s->%s, n=%d, tau_mix=%.9g s, tau_free=%.9g s",
                  net.label(i).c_str(), net.label(j).c_str(), net.label(k).c_str(),
                  plan.cycles, tau_mix, timing.tau_free);
    plan.schedule.description = desc;
    plan.schedule.repetitions = plan.cycles;
    plan.schedule.segments.push_back({HamiltonianRecipe::xy(), tau_mix, std::nullopt});
    plan.schedule.segments.push_back({HamiltonianRecipe::zeeman(), timing.tau_free, std::nullopt});
    return plan;
}

} // namespace pstsim
