// pstsim — command-line front end for selective state transfer on coupled
// spin networks: commensurate-timing schedules, relay plans, grid search,
// Ising->XY compilation, and CSV trace export.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pstsim/errors.hpp"
#include "pstsim/scheduler.hpp"
#include "pstsim/toggling.hpp"
#include "pstsim/trace_io.hpp"

using namespace pstsim;

namespace {

int resolve_site(const SpinNetwork& net, const std::string& token) {
    const int by_label = net.find_site(token);
    if (by_label >= 0)
        return by_label;
    // Fall back to a bare index so scripted runs need not know the labels.
    bool digits = !token.empty();
    for (char c : token)
        digits = digits && c >= '0' && c <= '9';
    if (digits) {
        const int idx = std::stoi(token);
        if (idx < net.num_sites())
            return idx;
    }
    throw ValidationError("unknown site '" + token + "'");
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        out.push_back(item);
    return out;
}

std::vector<int> resolve_sites(const SpinNetwork& net, const std::string& csv) {
    std::vector<int> sites;
    for (const std::string& tok : split_csv(csv))
        sites.push_back(resolve_site(net, tok));
    return sites;
}

std::pair<int, int> resolve_pair(const SpinNetwork& net, const std::string& csv) {
    const std::vector<int> sites = resolve_sites(net, csv);
    if (sites.size() != 2)
        throw ValidationError("--pair wants exactly two comma-separated sites");
    return {sites[0], sites[1]};
}

Basis parse_basis(const std::string& name) {
    return name == "full" ? Basis::Full : Basis::SingleExcitation;
}

Sampling parse_sampling(const std::string& name) {
    return name == "per-segment" ? Sampling::PerSegment : Sampling::PerRepetition;
}

void print_pair_header(const SpinNetwork& net, const PairTransferPlan& plan) {
    const int i = plan.timing.site_i, j = plan.timing.site_j;
    std::printf("pair %s-%s: J = %.12g Hz, |delta shift| = %.12g Hz\n",
                net.label(i).c_str(), net.label(j).c_str(),
                net.coupling_hz(i, j), angular_to_hz(net.shift_difference(i, j)));
    std::printf("tau_free = %.12g s (n = %d), tau_mix = %.12g s\n",
                plan.timing.tau_free, plan.timing.harmonic, plan.tau_mix);
    std::printf("cycles = %d: accumulated mixing %.12g s vs ideal %.12g s (rounding loss %.3g)\n",
                plan.cycles, plan.accumulated_mix_time, plan.ideal_mix_time,
                plan.rounding_loss);
    std::printf("predicted pair fidelity = %.12g, wall time = %.12g s\n",
                plan.predicted_fidelity, plan.wall_time);
}

void print_selectivity(const SpinNetwork& net, const PairTiming& timing, double tau_mix) {
    const double score = leakage_score(net, timing, tau_mix);
    std::printf("leakage score = %.6g (advisory threshold %g)\n", score,
                kLeakageScoreThreshold);
    if (!timing.residuals.empty()) {
        std::printf("off-target residuals (0 = recoupled, 0.5 = fully dephased):\n");
        for (const PairResidual& r : timing.residuals)
            std::printf("  %-16s %.6g\n",
                        (net.label(r.site_k) + "-" + net.label(r.site_l)).c_str(), r.residual);
    }
    for (const PairResidual& r : poorly_dephased(timing, 0.02)) {
        const std::string name = net.label(r.site_k) + "-" + net.label(r.site_l);
        if (net.shift_difference(r.site_k, r.site_l) == 0.0)
            std::printf("warning: pair %s has degenerate shifts and cannot be decoupled\n",
                        name.c_str());
        else
            std::printf("warning: pair %s is poorly dephased (residual %.3g)\n",
                        name.c_str(), r.residual);
    }
}

struct SimulateArgs {
    std::string pair_csv, from_label, output, sampling = "per-repetition",
                basis = "subspace";
    double tau_mix = 0.0;
    int harmonic = 1;
    int cycles = 0; // 0 = full-transfer budget from the plan
};

int cmd_simulate(const SpinNetwork& net, const SimulateArgs& args) {
    const auto [i, j] = resolve_pair(net, args.pair_csv);
    PairTransferPlan plan = pair_transfer_schedule(net, i, j, args.tau_mix, args.harmonic);
    if (args.cycles > 0)
        plan.schedule.repetitions = args.cycles;

    const int from = args.from_label.empty() ? i : resolve_site(net, args.from_label);
    QuantumState start = QuantumState::single_excitation(net.num_sites(), from,
                                                         parse_basis(args.basis));
    ScheduleRun run = run_schedule(start, plan.schedule, net, parse_sampling(args.sampling));

    print_pair_header(net, plan);
    print_selectivity(net, plan.timing, plan.tau_mix);
    const auto [peak_p, peak_t] = run.trace.peak(j);
    std::printf("peak P[%s] = %.12g at t = %.12g s\n", net.label(j).c_str(), peak_p, peak_t);

    write_trace_csv(args.output, run.trace, net.labels());
    std::printf("wrote %s (%zu samples)\n", args.output.c_str(), run.trace.num_samples());
    return 0;
}

struct BaselineArgs {
    std::string from_label, output, basis = "subspace";
    double duration = 0.0;
    int samples = 500;
};

int cmd_baseline(const SpinNetwork& net, const BaselineArgs& args) {
    const int from = resolve_site(net, args.from_label);
    if (args.duration < 0.0)
        throw ValidationError("--duration must be >= 0");
    if (args.samples < 1)
        throw ValidationError("--samples must be >= 1");

    TransferTrace trace;
    if (args.duration == 0.0) {
        trace.num_sites = net.num_sites();
        trace.metadata = "pure XY baseline from " + net.label(from) + "; duration=0";
    } else {
        Schedule schedule;
        schedule.description = "pure XY baseline from " + net.label(from);
        schedule.repetitions = args.samples;
        schedule.segments.push_back({HamiltonianRecipe::xy(),
                                     args.duration / args.samples, std::nullopt});
        QuantumState start = QuantumState::single_excitation(net.num_sites(), from,
                                                             parse_basis(args.basis));
        trace = run_schedule(start, schedule, net).trace;
    }

    std::printf("pure XY baseline from %s, duration %.12g s\n",
                net.label(from).c_str(), args.duration);
    for (int s = 0; s < net.num_sites(); ++s)
        if (trace.num_samples() > 0) {
            const auto [p, t] = trace.peak(s);
            std::printf("  peak P[%s] = %.12g at t = %.12g s\n", net.label(s).c_str(), p, t);
        }

    write_trace_csv(args.output, trace, net.labels());
    std::printf("wrote %s (%zu samples)\n", args.output.c_str(), trace.num_samples());
    return 0;
}

struct ScheduleArgs {
    std::string pair_csv, output;
    double tau_mix = 0.0;
    int harmonic = 1;
};

int cmd_schedule(const SpinNetwork& net, const ScheduleArgs& args) {
    const auto [i, j] = resolve_pair(net, args.pair_csv);
    const PairTransferPlan plan = pair_transfer_schedule(net, i, j, args.tau_mix, args.harmonic);

    print_pair_header(net, plan);
    print_selectivity(net, plan.timing, plan.tau_mix);

    const std::string text = schedule_to_text(plan.schedule);
    if (args.output.empty()) {
        std::printf("\n%s", text.c_str());
    } else {
        std::ofstream file(args.output, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot write schedule file: " + args.output);
        file << text;
        std::printf("wrote %s\n", args.output.c_str());
    }
    return 0;
}

struct RelayArgs {
    std::string path_csv, harmonics_csv, output, sampling = "per-repetition",
                basis = "subspace";
    double tau_mix = 0.0;
};

int cmd_relay(const SpinNetwork& net, const RelayArgs& args) {
    const std::vector<int> pathway = resolve_sites(net, args.path_csv);
    std::vector<int> harmonics;
    for (const std::string& tok : args.harmonics_csv.empty()
             ? std::vector<std::string>{} : split_csv(args.harmonics_csv))
        harmonics.push_back(std::stoi(tok));

    const RelayPlan plan = relay_plan(net, pathway, args.tau_mix, harmonics);
    const RelayRun run = run_relay(net, plan, parse_basis(args.basis),
                                   parse_sampling(args.sampling));

    std::printf("relay");
    for (std::size_t s = 0; s < pathway.size(); ++s)
        std::printf("%s%s", s == 0 ? " " : "->", net.label(pathway[s]).c_str());
    std::printf(" (%zu hops), tau_mix = %.12g s\n", plan.hops.size(), args.tau_mix);
    for (std::size_t h = 0; h < plan.hops.size(); ++h) {
        const PairTransferPlan& hop = plan.hops[h];
        std::printf("hop %zu: %s-%s n=%-3d tau_free=%.6g s cycles=%-4d "
                    "predicted=%.6f simulated P[%s]=%.6f\n",
                    h + 1, net.label(hop.timing.site_i).c_str(),
                    net.label(hop.timing.site_j).c_str(), hop.timing.harmonic,
                    hop.timing.tau_free, hop.cycles, hop.predicted_fidelity,
                    net.label(pathway[h + 1]).c_str(), run.hop_end_probabilities[h]);
    }
    std::printf("total time %.12g s, predicted end-to-end %.6f, simulated P[%s] = %.6f\n",
                plan.total_time, plan.predicted_fidelity,
                net.label(pathway.back()).c_str(), run.hop_end_probabilities.back());

    write_trace_csv(args.output, run.trace, net.labels());
    std::printf("wrote %s (%zu samples)\n", args.output.c_str(), run.trace.num_samples());
    return 0;
}

struct OptimizeArgs {
    std::string pair_csv, tau_grid_csv;
    int n_max = 8;
};

int cmd_optimize(const SpinNetwork& net, const OptimizeArgs& args) {
    const auto [i, j] = resolve_pair(net, args.pair_csv);
    if (args.n_max < 1)
        throw ValidationError("--n-max must be >= 1");

    HopSearch search;
    for (int n = 1; n <= args.n_max; ++n)
        search.harmonics.push_back(n);
    if (args.tau_grid_csv.empty())
        search.tau_mix_values = {1e-4, 2e-4, 3e-4, 4e-4, 5e-4};
    else
        for (const std::string& tok : split_csv(args.tau_grid_csv))
            search.tau_mix_values.push_back(std::stod(tok));

    const HopSearchResult best = optimize_hop(net, i, j, search);
    std::printf("searched %zu harmonics x %zu mixing times on %s-%s\n",
                search.harmonics.size(), search.tau_mix_values.size(),
                net.label(i).c_str(), net.label(j).c_str());
    std::printf("best: n = %d, tau_mix = %.12g s, simulated fidelity = %.12g, "
                "wall time = %.12g s\n",
                best.harmonic, best.tau_mix, best.fidelity, best.wall_time);
    if (best.flat_landscape)
        std::printf("warning: flat fidelity landscape (spread < 1e-3); widen the grid\n");
    return 0;
}

struct AverageArgs {
    std::string dump_path;
    double cycle_time = 1e-4;
};

int cmd_average_hamiltonian(const SpinNetwork& net, const AverageArgs& args) {
    if (!(args.cycle_time > 0.0))
        throw ValidationError("--cycle-time must be > 0");

    const CompiledXY compiled = compile_xy_from_ising(net);
    const OperatorMatrix avg = average_hamiltonian_zero_order(compiled.sequence, net);
    const OperatorMatrix xy = build_xy(net, std::nullopt, Basis::Full);
    const double deviation =
        (avg.data - compiled.coupling_scale * xy.data).cwiseAbs().maxCoeff();
    const double err = truncation_error(compiled.sequence, args.cycle_time, net);

    std::printf("two-frame Ising->XY compilation (%zu frames per cycle)\n",
                compiled.sequence.frames.size());
    std::printf("coupling scale = %g (stretch transfer times by %g)\n",
                compiled.coupling_scale, 1.0 / compiled.coupling_scale);
    std::printf("max |H_avg - %g*H_XY| = %.6g rad/s\n", compiled.coupling_scale, deviation);
    std::printf("truncation error at tau_c = %.12g s: %.6g (operator norm per unit time)\n",
                args.cycle_time, err);

    if (!args.dump_path.empty()) {
        std::ostringstream body;
        dump_operator(body, avg);
        std::ofstream file(args.dump_path, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot write operator file: " + args.dump_path);
        file << body.str();
        std::printf("wrote %s\n", args.dump_path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"selective state transfer on coupled spin networks"};
    app.require_subcommand(1);

    std::string network_path;
    app.add_option("--network", network_path, "network description file")
        ->required()
        ->check(CLI::ExistingFile);

    const auto sampling_check = CLI::IsMember({"per-repetition", "per-segment"});
    const auto basis_check = CLI::IsMember({"subspace", "full"});

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand(
        "simulate", "run a selective pair transfer and write the trace");
    sim->add_option("--pair", sim_args.pair_csv, "source,target sites")->required();
    sim->add_option("--tau-mix", sim_args.tau_mix, "mixing interval per cycle [s]")->required();
    sim->add_option("--n", sim_args.harmonic, "free-evolution harmonic n_ij");
    sim->add_option("--cycles", sim_args.cycles, "cycle count (default: full-transfer budget)");
    sim->add_option("--from", sim_args.from_label, "initially excited site (default: source)");
    sim->add_option("--output", sim_args.output, "trace CSV path")->required();
    sim->add_option("--sampling", sim_args.sampling, "trace sampling")->check(sampling_check);
    sim->add_option("--basis", sim_args.basis, "state space")->check(basis_check);

    BaselineArgs base_args;
    CLI::App* base = app.add_subcommand(
        "baseline", "uninterrupted XY evolution for comparison");
    base->add_option("--from", base_args.from_label, "initially excited site")->required();
    base->add_option("--duration", base_args.duration, "total evolution time [s]")->required();
    base->add_option("--samples", base_args.samples, "number of trace samples");
    base->add_option("--output", base_args.output, "trace CSV path")->required();
    base->add_option("--basis", base_args.basis, "state space")->check(basis_check);

    ScheduleArgs sched_args;
    CLI::App* sched = app.add_subcommand(
        "schedule", "print or save the pair-transfer schedule without simulating");
    sched->add_option("--pair", sched_args.pair_csv, "source,target sites")->required();
    sched->add_option("--tau-mix", sched_args.tau_mix, "mixing interval per cycle [s]")->required();
    sched->add_option("--n", sched_args.harmonic, "free-evolution harmonic n_ij");
    sched->add_option("--output", sched_args.output, "schedule text path (default: stdout)");

    RelayArgs relay_args;
    CLI::App* relay = app.add_subcommand(
        "relay", "step-wise transfer along a pathway, stitched trace out");
    relay->add_option("--path", relay_args.path_csv, "comma-separated pathway sites")->required();
    relay->add_option("--tau-mix", relay_args.tau_mix, "mixing interval per cycle [s]")->required();
    relay->add_option("--harmonics", relay_args.harmonics_csv, "per-hop n_ij list");
    relay->add_option("--output", relay_args.output, "trace CSV path")->required();
    relay->add_option("--sampling", relay_args.sampling, "trace sampling")->check(sampling_check);
    relay->add_option("--basis", relay_args.basis, "state space")->check(basis_check);

    OptimizeArgs opt_args;
    CLI::App* opt = app.add_subcommand(
        "optimize", "grid-search (n, tau_mix) for one hop by simulated fidelity");
    opt->add_option("--pair", opt_args.pair_csv, "source,target sites")->required();
    opt->add_option("--n-max", opt_args.n_max, "largest harmonic to try");
    opt->add_option("--tau-mix-grid", opt_args.tau_grid_csv,
                    "comma-separated mixing times [s]");

    AverageArgs avg_args;
    CLI::App* avg = app.add_subcommand(
        "average-hamiltonian", "compile Ising couplings into an effective XY mixer");
    avg->add_option("--cycle-time", avg_args.cycle_time, "toggling cycle length [s]");
    avg->add_option("--dump-operator", avg_args.dump_path,
                    "write the average Hamiltonian as sparse triplets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const SpinNetwork net = load_network_file(network_path);
        std::printf("network: %s (%d sites, %zu couplings)\n", network_path.c_str(),
                    net.num_sites(), net.couplings().size());
        if (*sim)
            return cmd_simulate(net, sim_args);
        if (*base)
            return cmd_baseline(net, base_args);
        if (*sched)
            return cmd_schedule(net, sched_args);
        if (*relay)
            return cmd_relay(net, relay_args);
        if (*opt)
            return cmd_optimize(net, opt_args);
        if (*avg)
            return cmd_average_hamiltonian(net, avg_args);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
