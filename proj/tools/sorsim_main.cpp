// Command-line front end: graph generation, single-query routing,
// experiment sweeps and verification suites, all reproducible from the
// flags they echo.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sorsim/analysis.hpp"
#include "sorsim/documents.hpp"
#include "sorsim/graph.hpp"
#include "sorsim/routing.hpp"
#include "sorsim/stats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBandViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct ParamFlags {
    std::uint32_t n = 1024;
    std::uint32_t c = 1;
    double alpha = 2.5;
    std::uint32_t mu = 0;  // 0: resolve max(2, ceil(log2 n))
    std::optional<std::uint64_t> seed;
    std::string generator = "poisson";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--n", n, "ring length (number of nodes)");
        cmd->add_option("--c", c, "embedding inaccuracy (short-range reach)");
        cmd->add_option("--alpha", alpha, "scale-free label exponent, strictly inside (2,3)");
        cmd->add_option("--mu", mu, "label maximum; 0 resolves to max(2, ceil(log2 n))");
        cmd->add_option("--seed", seed, "RNG seed; generated and printed when omitted");
        cmd->add_option("--generator", generator, "long-range generator: exact or poisson");
    }

    sorsim::GraphParams resolve() const {
        sorsim::GraphParams p;
        p.n = n;
        p.c = c;
        p.alpha = alpha;
        p.mu = mu != 0 ? mu : sorsim::GraphParams::default_mu(n);
        p.seed = seed ? *seed : fresh_seed();
        const auto gen = sorsim::parse_generator(generator);
        if (!gen)
            throw std::invalid_argument("generator must be 'exact' or 'poisson', got '" +
                                        generator + "'");
        p.generator = *gen;
        return p;
    }
};

void echo_params(const std::string& command, const sorsim::GraphParams& p) {
    std::cout << "config: command=" << command << " n=" << p.n << " c=" << p.c
              << " alpha=" << p.alpha << " mu=" << p.mu << " seed=" << p.seed
              << " generator=" << to_string(p.generator) << "\n";
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cout << "warning: " << w << "\n";
}

int cmd_generate(const ParamFlags& flags, const std::string& out_path) {
    const auto params = flags.resolve();
    echo_params("generate", params);
    print_warnings(params.validate());
    const auto graph = sorsim::build_graph(params);
    sorsim::save_graph(graph, out_path);
    const auto connectivity = sorsim::connectivity_check(graph);
    std::cout << "gamma: " << graph.gamma() << "\n"
              << "edges: short_range=" << graph.edge_count(sorsim::EdgeKind::short_range)
              << " long_range=" << graph.edge_count(sorsim::EdgeKind::long_range) << "\n"
              << "connected: " << (connectivity.connected ? "yes" : "no")
              << " components=" << connectivity.component_sizes.size()
              << " largest=" << connectivity.component_sizes.front() << "\n"
              << "written: " << out_path << "\n";
    return kExitOk;
}

int cmd_route(const std::string& graph_path, std::uint32_t source, std::uint32_t target,
              const std::string& algo_name, std::uint64_t hop_cap,
              const std::string& trace_out, std::size_t max_trace_path) {
    const auto algo = sorsim::parse_algorithm(algo_name);
    if (!algo)
        throw std::invalid_argument("unknown algorithm '" + algo_name +
                                    "'; expected Greedy, DistanceDirectedDFS, NextBestOnce or "
                                    "NextBestOnceNoN");
    const auto graph = sorsim::load_graph(graph_path);
    if (source >= graph.n() || target >= graph.n())
        throw std::invalid_argument("source and target must lie in [0, " +
                                    std::to_string(graph.n()) + ")");
    std::cout << "config: command=route graph=" << graph_path << " source=" << source
              << " target=" << target << " algo=" << to_string(*algo)
              << " hop_cap=" << hop_cap << "\n";
    const sorsim::RouteQuery query{source, target, *algo, hop_cap};
    const auto trace = sorsim::route(graph, query);
    std::cout << "outcome: " << to_string(trace.outcome) << "\n"
              << "hops: total=" << trace.forward_hops + trace.backtrack_hops
              << " forward=" << trace.forward_hops << " backtrack=" << trace.backtrack_hops
              << "\n"
              << "marked: " << trace.marked_count << "\n";
    if (!trace_out.empty()) {
        sorsim::write_text_file(trace_out, sorsim::serialize_trace(query, trace, max_trace_path));
        std::cout << "trace written: " << trace_out << "\n";
    }
    return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_csv,
                   unsigned parallelism, std::optional<std::uint64_t> seed_override,
                   const std::string& generator_override,
                   std::optional<std::uint32_t> graphs_override,
                   std::optional<std::uint32_t> pairs_override) {
    auto config = sorsim::load_experiment_config(config_path);
    if (seed_override) config.base_seed = *seed_override;
    if (!generator_override.empty()) {
        const auto gen = sorsim::parse_generator(generator_override);
        if (!gen) throw std::invalid_argument("generator must be 'exact' or 'poisson'");
        config.generator = *gen;
    }
    if (graphs_override) config.graphs_per_cell = *graphs_override;
    if (pairs_override) config.pairs_per_graph = *pairs_override;
    config.validate();

    std::cout << "config: command=experiment config=" << config_path
              << " base_seed=" << config.base_seed
              << " generator=" << to_string(config.generator)
              << " graphs_per_cell=" << config.graphs_per_cell
              << " pairs_per_graph=" << config.pairs_per_graph
              << " parallelism=" << parallelism << "\n";
    const auto result = sorsim::run_experiment(config, parallelism);
    sorsim::write_text_file(out_csv, sorsim::experiment_csv(result));
    std::uint64_t skipped = 0;
    for (std::size_t i = 0; i < result.rows.size(); i += config.algorithms.size())
        skipped += result.rows[i].skipped_disconnected;
    std::cout << "rows: " << result.rows.size() << "\n"
              << "skipped disconnected pairs: " << skipped << "\n"
              << "csv written: " << out_csv << "\n";
    return kExitOk;
}

struct VerifyFlags {
    ParamFlags params;
    std::string suite;
    std::uint64_t trials = 0;         // 0: suite default
    std::uint32_t threshold = 0;      // greedy-path; 0: round(c^2 ln n)
    std::uint32_t seeds = 50;         // inward-links / connectivity repetitions
    std::uint32_t graphs = 2;         // halving
    std::uint32_t pairs = 500;        // halving
    double r = 0.5;                   // halving high-d floor exponent
    std::vector<std::uint32_t> d_values{4, 8, 16, 32};
    double min_fraction = -1.0;       // suite default when negative
    double tail_tolerance = 0.05;
    double gamma_tol = 1e-10;
    double se_multiplier = 3.0;
    double p_threshold = 0.01;
    std::string report_out;
};

void emit_report(const VerifyFlags& flags, const sorsim::EstimatorReport& report) {
    if (!flags.report_out.empty())
        sorsim::write_text_file(flags.report_out, sorsim::serialize_estimator_report(report));
}

int verify_gamma(const VerifyFlags& flags) {
    const auto params = flags.params.resolve();
    echo_params("verify/gamma", params);
    const double gamma =
        sorsim::calibrate_gamma(params.n, params.alpha, params.mu, flags.gamma_tol);
    const double f = sorsim::expected_label1_degree(params.n, params.alpha, params.mu, gamma);
    const double f_err = std::fabs(f - 1.0);
    std::cout << "gamma: " << gamma << "\n"
              << "|F(gamma)-1|: " << f_err << " (tolerance " << flags.gamma_tol << ")\n";
    const std::uint64_t samples = flags.trials != 0 ? flags.trials : 10'000;
    const auto report = sorsim::estimate_label1_degree(params, samples, gamma);
    emit_report(flags, report);
    if (!report.defined) {
        std::cout << "label-1 degree: undefined (" << report.diagnostic << ")\n";
        return kExitBandViolation;
    }
    const double se = (report.ci_hi - report.ci_lo) / 2.0 / sorsim::stats::kZ95;
    const double dev = std::fabs(report.point - 1.0);
    std::cout << "label-1 mean long-range degree: " << report.point << " (" << report.samples
              << " samples, |dev| = " << dev << ", " << flags.se_multiplier
              << " standard errors = " << flags.se_multiplier * se << ")\n";
    const bool ok = f_err <= flags.gamma_tol && dev <= flags.se_multiplier * se;
    std::cout << (ok ? "within acceptance band" : "ACCEPTANCE BAND VIOLATED") << "\n";
    return ok ? kExitOk : kExitBandViolation;
}

int verify_link_tail(const VerifyFlags& flags) {
    const auto params = flags.params.resolve();
    echo_params("verify/link-tail", params);
    const std::uint64_t trials = flags.trials != 0 ? flags.trials : 100'000;
    const auto report = sorsim::estimate_link_length_tail(params, trials);
    emit_report(flags, report);
    if (!report.defined) {
        std::cout << "estimator undefined: " << report.diagnostic << "\n";
        return kExitBandViolation;
    }
    const double floor = flags.min_fraction < 0 ? 0.25 : flags.min_fraction;
    std::cout << "empirical P(length >= 2*sqrt(n) | link): " << report.point << " ("
              << report.samples << " edges)\n"
              << "analytic: " << *report.analytic << "\n";
    const bool ok =
        std::fabs(report.point - *report.analytic) <= flags.tail_tolerance &&
        report.point >= floor;
    std::cout << (ok ? "within acceptance band" : "ACCEPTANCE BAND VIOLATED") << "\n";
    return ok ? kExitOk : kExitBandViolation;
}

int verify_greedy_path(const VerifyFlags& flags) {
    const auto params = flags.params.resolve();
    echo_params("verify/greedy-path", params);
    const std::uint64_t trials = flags.trials != 0 ? flags.trials : 1000;
    const auto threshold =
        flags.threshold != 0
            ? flags.threshold
            : static_cast<std::uint32_t>(std::llround(
                  static_cast<double>(params.c) * params.c * std::log(params.n)));
    const auto report = sorsim::estimate_greedy_path_probability(params, threshold, trials);
    emit_report(flags, report);
    const double floor = flags.min_fraction < 0 ? 0.99 : flags.min_fraction;
    std::cout << "distance threshold: " << threshold << "\n"
              << "greedy-path fraction: " << report.point << " (" << report.samples
              << " pairs, CI [" << report.ci_lo << ", " << report.ci_hi << "])\n";
    const bool ok = report.point >= floor;
    std::cout << (ok ? "within acceptance band" : "ACCEPTANCE BAND VIOLATED") << "\n";
    return ok ? kExitOk : kExitBandViolation;
}

int verify_inward_links(const VerifyFlags& flags) {
    const auto params = flags.params.resolve();
    echo_params("verify/inward-links", params);
    std::vector<double> xs, ys;
    for (std::uint32_t rep = 0; rep < flags.seeds; ++rep) {
        sorsim::GraphParams p = params;
        p.seed = sorsim::derive_seed(params.seed, sorsim::StreamKind::estimator_graph, rep);
        const auto graph = sorsim::build_graph(p);
        const auto t = static_cast<sorsim::NodeId>(
            sorsim::Rng::substream(params.seed, sorsim::StreamKind::estimator_pairs, rep)
                .next_below(params.n));
        for (auto d : flags.d_values) {
            xs.push_back(d);
            ys.push_back(static_cast<double>(sorsim::estimate_inward_links(graph, t, d)));
        }
    }
    const auto r = sorsim::stats::spearman_positive(xs, ys);
    std::cout << "spearman rho: " << r.rho << " one-sided p: " << r.p_value << " ("
              << r.samples << " observations)\n";
    sorsim::EstimatorReport report;
    report.estimator = "inward_links_trend";
    report.point = r.rho;
    report.samples = r.samples;
    report.parameters = {{"n", static_cast<double>(params.n)},
                         {"seed", static_cast<double>(params.seed)},
                         {"p_value", r.p_value}};
    emit_report(flags, report);
    const bool ok = r.rho > 0 && r.p_value <= flags.p_threshold;
    std::cout << (ok ? "within acceptance band" : "ACCEPTANCE BAND VIOLATED") << "\n";
    return ok ? kExitOk : kExitBandViolation;
}

int verify_halving(const VerifyFlags& flags) {
    const auto params = flags.params.resolve();
    echo_params("verify/halving", params);
    sorsim::RoutingScratch scratch;
    std::vector<sorsim::RouteTrace> nbo, non;
    for (std::uint32_t gi = 0; gi < flags.graphs; ++gi) {
        sorsim::GraphParams p = params;
        p.seed = sorsim::derive_seed(params.seed, sorsim::StreamKind::estimator_graph, gi);
        const auto graph = sorsim::build_graph(p);
        const auto comp = sorsim::component_labels(graph);
        auto rng = sorsim::Rng::substream(params.seed, sorsim::StreamKind::estimator_pairs, gi);
        for (std::uint32_t q = 0; q < flags.pairs; ++q) {
            const auto s = static_cast<sorsim::NodeId>(rng.next_below(params.n));
            const auto t = static_cast<sorsim::NodeId>(rng.next_below(params.n));
            if (s == t || comp[s] != comp[t]) continue;
            nbo.push_back(
                sorsim::route(graph, {s, t, sorsim::AlgorithmKind::NextBestOnce, 0}, scratch));
            non.push_back(
                sorsim::route(graph, {s, t, sorsim::AlgorithmKind::NextBestOnceNoN, 0}, scratch));
        }
    }
    const auto sum = [](const sorsim::HalvingProfile& profile) {
        std::pair<std::uint64_t, std::uint64_t> acc{0, 0};
        for (const auto& bin : profile.bins) {
            acc.first += bin.trials;
            acc.second += bin.successes;
        }
        return acc;
    };
    const auto [tb, sb] = sum(sorsim::halving_statistics(nbo, params.n, flags.r));
    const auto [tn, sn] = sum(sorsim::halving_statistics(non, params.n, flags.r));
    if (tb == 0 || tn == 0) {
        std::cout << "no observations above the d floor; increase pairs or lower r\n";
        return kExitBandViolation;
    }
    const double freq_nbo = static_cast<double>(sb) / static_cast<double>(tb);
    const double freq_non = static_cast<double>(sn) / static_cast<double>(tn);
    std::cout << "high-d halving frequency: NextBestOnce=" << freq_nbo << " (" << tb
              << " obs), NextBestOnceNoN=" << freq_non << " (" << tn << " obs)\n";
    std::cout << "x-sequence monotone fraction above c: NextBestOnce="
              << sorsim::x_monotone_fraction(nbo, params.c)
              << " NextBestOnceNoN=" << sorsim::x_monotone_fraction(non, params.c)
              << " (reported statistic)\n";
    const bool ok = freq_non > freq_nbo;
    std::cout << (ok ? "within acceptance band" : "ACCEPTANCE BAND VIOLATED") << "\n";
    return ok ? kExitOk : kExitBandViolation;
}

int verify_connectivity(const VerifyFlags& flags) {
    const auto params = flags.params.resolve();
    echo_params("verify/connectivity", params);
    std::uint32_t connected = 0;
    for (std::uint32_t rep = 0; rep < flags.seeds; ++rep) {
        sorsim::GraphParams p = params;
        p.seed = sorsim::derive_seed(params.seed, sorsim::StreamKind::estimator_graph, rep);
        if (sorsim::connectivity_check(sorsim::build_graph(p)).connected) ++connected;
    }
    const double fraction = static_cast<double>(connected) / flags.seeds;
    const double floor = flags.min_fraction < 0 ? 0.99 : flags.min_fraction;
    std::cout << "connected fraction: " << fraction << " (" << connected << "/" << flags.seeds
              << ")\n";
    sorsim::EstimatorReport report;
    report.estimator = "connectivity";
    report.point = fraction;
    report.samples = flags.seeds;
    report.parameters = {{"n", static_cast<double>(params.n)},
                         {"c", static_cast<double>(params.c)},
                         {"seed", static_cast<double>(params.seed)}};
    emit_report(flags, report);
    const bool ok = fraction >= floor;
    std::cout << (ok ? "within acceptance band" : "ACCEPTANCE BAND VIOLATED") << "\n";
    return ok ? kExitOk : kExitBandViolation;
}

int cmd_verify(const VerifyFlags& flags) {
    if (flags.suite == "gamma") return verify_gamma(flags);
    if (flags.suite == "link-tail") return verify_link_tail(flags);
    if (flags.suite == "greedy-path") return verify_greedy_path(flags);
    if (flags.suite == "inward-links") return verify_inward_links(flags);
    if (flags.suite == "halving") return verify_halving(flags);
    if (flags.suite == "connectivity") return verify_connectivity(flags);
    throw std::invalid_argument(
        "unknown suite '" + flags.suite +
        "'; expected gamma, link-tail, greedy-path, inward-links, halving or connectivity");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator for routing on heuristically embedded social overlays"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "build a graph and write its document");
    ParamFlags gen_flags;
    gen_flags.add_to(generate);
    std::string gen_out;
    generate->add_option("--out", gen_out, "output path for the graph document")->required();

    // route
    auto* route_cmd = app.add_subcommand("route", "route one query on a stored graph");
    std::string route_graph, route_algo = "NextBestOnce", route_trace_out;
    std::uint32_t route_source = 0, route_target = 0;
    std::uint64_t route_hop_cap = 0;
    std::size_t route_max_path = 1u << 20;
    route_cmd->add_option("--graph", route_graph, "graph document path")->required();
    route_cmd->add_option("--source", route_source, "source node id")->required();
    route_cmd->add_option("--target", route_target, "target node id")->required();
    route_cmd->add_option("--algo", route_algo,
                          "Greedy | DistanceDirectedDFS | NextBestOnce | NextBestOnceNoN");
    route_cmd->add_option("--hop-cap", route_hop_cap, "diagnostic hop cap; 0 = 4*(1+c)*n");
    route_cmd->add_option("--trace-out", route_trace_out, "write the full trace document here");
    route_cmd->add_option("--max-trace-path", route_max_path,
                          "truncate exported paths beyond this many entries");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "run a parameter sweep to CSV");
    std::string exp_config, exp_out, exp_generator;
    unsigned exp_parallelism = 1;
    std::optional<std::uint64_t> exp_seed;
    std::optional<std::uint32_t> exp_graphs, exp_pairs;
    experiment->add_option("--config", exp_config, "experiment config document")->required();
    experiment->add_option("--out", exp_out, "output CSV path")->required();
    experiment->add_option("--parallelism", exp_parallelism, "worker threads");
    experiment->add_option("--base-seed", exp_seed, "override the config base seed");
    experiment->add_option("--generator", exp_generator, "override the config generator");
    experiment->add_option("--graphs-per-cell", exp_graphs, "override graphs per cell");
    experiment->add_option("--pairs-per-graph", exp_pairs, "override pairs per graph");

    // verify
    auto* verify = app.add_subcommand("verify", "run a verification suite against its band");
    VerifyFlags verify_flags;
    verify->add_option("--suite", verify_flags.suite,
                       "gamma | link-tail | greedy-path | inward-links | halving | connectivity")
        ->required();
    verify_flags.params.add_to(verify);
    verify->add_option("--trials", verify_flags.trials, "sample count; 0 = suite default");
    verify->add_option("--threshold", verify_flags.threshold,
                       "greedy-path distance threshold; 0 = round(c^2 ln n)");
    verify->add_option("--seeds", verify_flags.seeds, "graph repetitions");
    verify->add_option("--graphs", verify_flags.graphs, "graphs for the halving suite");
    verify->add_option("--pairs", verify_flags.pairs, "pairs per graph for the halving suite");
    verify->add_option("--r", verify_flags.r, "high-d floor exponent for the halving suite");
    verify->add_option("--d-values", verify_flags.d_values, "ball radii for inward-links");
    verify->add_option("--min-fraction", verify_flags.min_fraction,
                       "acceptance floor override (suite default when negative)");
    verify->add_option("--tail-tolerance", verify_flags.tail_tolerance,
                       "allowed |empirical - analytic| for link-tail");
    verify->add_option("--gamma-tol", verify_flags.gamma_tol, "calibration tolerance");
    verify->add_option("--se-multiplier", verify_flags.se_multiplier,
                       "allowed deviation in standard errors for gamma");
    verify->add_option("--p-threshold", verify_flags.p_threshold,
                       "significance level for trend suites");
    verify->add_option("--report-out", verify_flags.report_out, "write the report document here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen_flags, gen_out);
        if (route_cmd->parsed())
            return cmd_route(route_graph, route_source, route_target, route_algo, route_hop_cap,
                             route_trace_out, route_max_path);
        if (experiment->parsed())
            return cmd_experiment(exp_config, exp_out, exp_parallelism, exp_seed, exp_generator,
                                  exp_graphs, exp_pairs);
        if (verify->parsed()) return cmd_verify(verify_flags);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const sorsim::DocumentError& e) {
        std::cerr << "document error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
