// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Runs at full scale; expect a few minutes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sorsim/analysis.hpp"
#include "sorsim/documents.hpp"
#include "sorsim/graph.hpp"
#include "sorsim/routing.hpp"
#include "sorsim/stats.hpp"

using namespace sorsim;

namespace {

const std::vector<std::uint32_t> kGridN{1u << 10, 1u << 11, 1u << 12, 1u << 13,
                                        1u << 14, 1u << 15, 1u << 16};
const std::vector<double> kGridAlpha{2.1, 2.5, 2.9};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- C1
Outcome c1_gamma_calibration() {
    for (auto n : kGridN) {
        for (auto alpha : kGridAlpha) {
            const auto mu = GraphParams::default_mu(n);
            const double gamma = calibrate_gamma(n, alpha, mu, 1e-10);
            const double f_err = std::fabs(expected_label1_degree(n, alpha, mu, gamma) - 1.0);
            if (f_err > 1e-10)
                return {false, "|F(gamma)-1| = " + fmt(f_err) + " at n=" + std::to_string(n) +
                                   " alpha=" + fmt(alpha)};
            GraphParams p{.n = n, .c = 1, .alpha = alpha, .mu = mu,
                          .seed = 0xC1A00000ull + n + static_cast<std::uint64_t>(alpha * 100)};
            const auto report = estimate_label1_degree(p, 10'000, gamma);
            if (!report.defined || report.samples < 10'000)
                return {false, "label-1 sampling failed at n=" + std::to_string(n)};
            const double se = (report.ci_hi - report.ci_lo) / 2.0 / stats::kZ95;
            if (std::fabs(report.point - 1.0) > 3.0 * se)
                return {false, "label-1 mean degree " + fmt(report.point) + " outside 1 +- 3se (se=" +
                                   fmt(se) + ") at n=" + std::to_string(n) + " alpha=" + fmt(alpha)};
        }
    }
    return {true, "21 cells: |F(gamma)-1| <= 1e-10 and label-1 mean degree within 1 +- 3se"};
}

// ---------------------------------------------------------------- C2
Outcome c2_generator_equivalence() {
    const std::uint32_t n = 2048, mu = 11;
    const double alpha = 2.5;
    const double gamma = calibrate_gamma(n, alpha, mu);
    std::vector<double> len_exact, len_poisson;
    std::vector<std::uint64_t> deg_exact(48, 0), deg_poisson(48, 0);
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto la = sample_labels(n, alpha, mu, 0xC2A00000ull + k);
        const auto ea = generate_long_range_exact(la, gamma, 0xC2A00000ull + k);
        const auto lb = sample_labels(n, alpha, mu, 0xC2B00000ull + k);
        const auto eb = generate_long_range_poisson(lb, gamma, 0xC2B00000ull + k);
        std::vector<std::uint32_t> da(n, 0), db(n, 0);
        for (const auto& [u, v] : ea) {
            len_exact.push_back(ring_distance(u, v, n));
            ++da[u];
            ++da[v];
        }
        for (const auto& [u, v] : eb) {
            len_poisson.push_back(ring_distance(u, v, n));
            ++db[u];
            ++db[v];
        }
        for (std::uint32_t v = 0; v < n; ++v) {
            ++deg_exact[std::min<std::uint32_t>(da[v], 47)];
            ++deg_poisson[std::min<std::uint32_t>(db[v], 47)];
        }
    }
    const auto ks = stats::ks_two_sample(len_exact, len_poisson);
    const auto chi = stats::chi_square_two_sample(deg_exact, deg_poisson);
    const bool pass = ks.p_value > 0.01 && chi.p_value > 0.01;
    return {pass, "KS edge lengths p=" + fmt(ks.p_value) + ", chi-square degrees p=" +
                      fmt(chi.p_value) + " (both must exceed 0.01)"};
}

// ------------------------------------------------------------- C3+C4
struct RoutingGridStats {
    std::uint64_t queries = 0;
    std::uint64_t aborts = 0;
    std::uint64_t bound_violations = 0;
    std::uint64_t completeness_failures = 0;
    std::uint64_t connected_graphs = 0;
    std::uint64_t graphs = 0;
};

RoutingGridStats routing_grid() {
    struct CellSpec {
        std::uint32_t n, c;
        double alpha;
    };
    std::vector<CellSpec> cells;
    for (auto n : kGridN)
        for (auto alpha : kGridAlpha)
            for (std::uint32_t c : {1u, 4u}) cells.push_back({n, c, alpha});

    std::vector<RoutingGridStats> partials(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        RoutingScratch scratch;
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            const auto [n, c, alpha] = cells[idx];
            RoutingGridStats& st = partials[idx];
            GraphParams p{.n = n, .c = c, .alpha = alpha, .mu = GraphParams::default_mu(n),
                          .seed = 0xC3000000ull + idx};
            const auto graph = build_graph(p);
            const bool connected = connectivity_check(graph).connected;
            ++st.graphs;
            if (connected) ++st.connected_graphs;
            const std::uint64_t bound = 2ull * (1 + c) * n;
            Rng rng(0xC4000000ull + idx);
            for (int q = 0; q < 1000; ++q) {
                const auto s = static_cast<NodeId>(rng.next_below(n));
                auto t = static_cast<NodeId>(rng.next_below(n));
                while (t == s) t = static_cast<NodeId>(rng.next_below(n));
                for (auto algo : {AlgorithmKind::Greedy, AlgorithmKind::DistanceDirectedDFS,
                                  AlgorithmKind::NextBestOnce, AlgorithmKind::NextBestOnceNoN}) {
                    const auto trace = route(graph, {s, t, algo, 0}, scratch);
                    ++st.queries;
                    if (trace.outcome == RouteOutcome::aborted) ++st.aborts;
                    if (trace.forward_hops + trace.backtrack_hops > bound) ++st.bound_violations;
                    if (connected && algo != AlgorithmKind::Greedy &&
                        trace.outcome != RouteOutcome::success)
                        ++st.completeness_failures;
                }
            }
        }
    };
    std::thread t1(worker), t2(worker);
    t1.join();
    t2.join();
    RoutingGridStats total;
    for (const auto& st : partials) {
        total.queries += st.queries;
        total.aborts += st.aborts;
        total.bound_violations += st.bound_violations;
        total.completeness_failures += st.completeness_failures;
        total.connected_graphs += st.connected_graphs;
        total.graphs += st.graphs;
    }
    return total;
}

Outcome c3_termination(const RoutingGridStats& st) {
    const bool pass = st.queries >= 100'000 && st.aborts == 0 && st.bound_violations == 0;
    return {pass, std::to_string(st.queries) + " routed queries, " + std::to_string(st.aborts) +
                      " hop-cap aborts, " + std::to_string(st.bound_violations) +
                      " hop-bound violations (bound 2*(1+C)*n)"};
}

Outcome c4_completeness(const RoutingGridStats& st) {
    const bool pass = st.completeness_failures == 0 && st.connected_graphs > 0;
    return {pass, std::to_string(st.connected_graphs) + "/" + std::to_string(st.graphs) +
                      " connected graphs, " + std::to_string(st.completeness_failures) +
                      " NBO/NoN/DDFS failures on their 1000 pairs each"};
}

// ---------------------------------------------------------------- C5
Outcome c5_greedy_path() {
    const std::uint32_t n = 1u << 14, c = 4;
    GraphParams p{.n = n, .c = c, .alpha = 2.5, .mu = GraphParams::default_mu(n),
                  .seed = 0xC5000000ull};
    const auto threshold = static_cast<std::uint32_t>(
        std::llround(static_cast<double>(c) * c * std::log(static_cast<double>(n))));
    const auto report = estimate_greedy_path_probability(p, threshold, 1000);
    const bool pass = report.point >= 0.99;
    return {pass, "greedy-path fraction " + fmt(report.point) + " over 1000 pairs at distance > " +
                      std::to_string(threshold) + " (floor 0.99)"};
}

// ---------------------------------------------------------------- C6
Outcome c6_link_length_tail() {
    GraphParams mid{.n = 1u << 14, .c = 1, .alpha = 2.5,
                    .mu = GraphParams::default_mu(1u << 14), .seed = 0xC6000000ull};
    const auto big = estimate_link_length_tail(mid, 100'000);
    if (!big.defined || big.samples < 100'000)
        return {false, "could not collect 1e5 long-range edges"};
    const double dev = std::fabs(big.point - *big.analytic);
    if (dev > 0.05)
        return {false, "empirical " + fmt(big.point) + " vs analytic " + fmt(*big.analytic) +
                           " deviates by " + fmt(dev) + " (> 0.05)"};
    for (auto n : kGridN) {
        for (auto alpha : kGridAlpha) {
            GraphParams p{.n = n, .c = 1, .alpha = alpha, .mu = GraphParams::default_mu(n),
                          .seed = 0xC6100000ull + n};
            const auto rep = estimate_link_length_tail(p, 10'000);
            if (!rep.defined || rep.point < 0.25)
                return {false, "tail fraction " + fmt(rep.point) + " below 0.25 at n=" +
                                   std::to_string(n) + " alpha=" + fmt(alpha)};
        }
    }
    return {true, "empirical " + fmt(big.point) + " within 0.05 of analytic " +
                      fmt(*big.analytic) + " at 1e5 edges; fraction >= 0.25 on all 21 cells"};
}

// ---------------------------------------------------------------- C7
Outcome c7_inward_links() {
    const std::uint32_t n = 1u << 14;
    std::vector<double> xs, ys;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        GraphParams p{.n = n, .c = 1, .alpha = 2.5, .mu = GraphParams::default_mu(n),
                      .seed = 0xC7000000ull + rep};
        const auto graph = build_graph(p);
        const auto t = static_cast<NodeId>(Rng(0xC7100000ull + rep).next_below(n));
        for (std::uint32_t d : {4u, 8u, 16u, 32u}) {
            xs.push_back(d);
            ys.push_back(static_cast<double>(estimate_inward_links(graph, t, d)));
        }
    }
    const auto r = stats::spearman_positive(xs, ys);
    const bool pass = r.rho > 0 && r.p_value < 0.01;
    return {pass, "Spearman rho " + fmt(r.rho) + ", one-sided p " + fmt(r.p_value) +
                      " over 50 seeds x d in {4,8,16,32}"};
}

// ---------------------------------------------------------------- C8
Outcome c8_non_improvement() {
    ExperimentConfig config;
    config.n_values = {1u << 10, 1u << 12, 1u << 14, 1u << 16};
    config.c_values = {1};
    config.alpha_values = {2.5};
    config.algorithms = {AlgorithmKind::NextBestOnce, AlgorithmKind::NextBestOnceNoN};
    config.graphs_per_cell = 10;
    config.pairs_per_graph = 1000;
    config.base_seed = 0xC8000000ull;
    const auto result = run_experiment(config, 2);

    const ExperimentRow* nbo16 = nullptr;
    const ExperimentRow* non16 = nullptr;
    for (const auto& row : result.rows) {
        if (row.n != (1u << 16)) continue;
        if (row.algorithm == AlgorithmKind::NextBestOnce) nbo16 = &row;
        if (row.algorithm == AlgorithmKind::NextBestOnceNoN) non16 = &row;
    }
    if (!nbo16 || !non16 || nbo16->mu != 16) return {false, "missing n=2^16 rows"};
    const bool separated =
        non16->mean_hops + non16->ci95 < nbo16->mean_hops - nbo16->ci95;

    const auto fits = fit_scaling(result);
    double slope_nbo = 0, slope_non = 0;
    for (const auto& f : fits) {
        if (f.algorithm == AlgorithmKind::NextBestOnce) slope_nbo = f.slope;
        if (f.algorithm == AlgorithmKind::NextBestOnceNoN) slope_non = f.slope;
    }
    const bool ordered = slope_non < slope_nbo && slope_non > 0 && slope_nbo > 0;
    const bool pass = separated && ordered;
    return {pass, "n=2^16: NoN " + fmt(non16->mean_hops) + " +- " + fmt(non16->ci95) +
                      " vs NBO " + fmt(nbo16->mean_hops) + " +- " + fmt(nbo16->ci95) +
                      (separated ? " (CIs disjoint)" : " (CIs OVERLAP)") +
                      "; slopes NoN " + fmt(slope_non) + " < NBO " + fmt(slope_nbo)};
}

// ---------------------------------------------------------------- C9
Outcome c9_c_scaling() {
    const std::uint32_t n = 1u << 14;
    const auto mu = GraphParams::default_mu(n);
    const double gamma = calibrate_gamma(n, 2.5, mu);
    RoutingScratch scratch;
    std::vector<double> xs, ys;
    constexpr std::uint64_t kGraphsPerC = 40;
    for (std::uint32_t c : {1u, 4u, 16u, 64u}) {
        for (std::uint64_t gi = 0; gi < kGraphsPerC; ++gi) {
            GraphParams p{.n = n, .c = c, .alpha = 2.5, .mu = mu,
                          .seed = 0xC9000000ull + c * 100 + gi};
            const auto graph = build_graph(p, gamma);
            const auto comp = component_labels(graph);
            Rng rng(0xC9100000ull + c * 100 + gi);
            std::uint64_t hops = 0, count = 0;
            for (int q = 0; q < 300; ++q) {
                const auto s = static_cast<NodeId>(rng.next_below(n));
                auto t = static_cast<NodeId>(rng.next_below(n));
                while (t == s) t = static_cast<NodeId>(rng.next_below(n));
                if (comp[s] != comp[t]) continue;
                const auto trace = route(graph, {s, t, AlgorithmKind::NextBestOnce, 0}, scratch);
                if (trace.outcome == RouteOutcome::success) {
                    hops += trace.forward_hops + trace.backtrack_hops;
                    ++count;
                }
            }
            if (count == 0) return {false, "no routed pairs at c=" + std::to_string(c)};
            xs.push_back(c);
            ys.push_back(static_cast<double>(hops) / static_cast<double>(count));
        }
    }
    const auto r = stats::spearman_positive(xs, ys);
    const bool pass = r.rho > 0 && r.p_value < 0.01;
    std::string means;
    for (std::size_t i = 0; i < 4; ++i) {
        double m = 0;
        for (std::size_t g = 0; g < kGraphsPerC; ++g) m += ys[i * kGraphsPerC + g];
        means += (i ? ", " : "") + fmt(m / static_cast<double>(kGraphsPerC));
    }
    return {pass, "mean NBO hops over C in {1,4,16,64}: " + means + "; Spearman rho " +
                      fmt(r.rho) + ", p " + fmt(r.p_value)};
}

// --------------------------------------------------------------- C10
bool brute_force_greedy_path(const OverlayGraph& g, NodeId w, NodeId v) {
    for (NodeId u : g.neighbors(w)) {
        if (ring_distance(u, v, g.n()) >= ring_distance(w, v, g.n())) continue;
        if (u == v || brute_force_greedy_path(g, u, v)) return true;
    }
    return false;
}

Outcome c10_oracle_equivalence() {
    Rng rng(0xCA000000ull);
    for (int rep = 0; rep < 1000; ++rep) {
        GraphParams p;
        p.n = 8 + static_cast<std::uint32_t>(rng.next_below(5));
        p.c = p.n >= 12 ? 1 + static_cast<std::uint32_t>(rng.next_below(2)) : 1;
        p.alpha = 2.1 + 0.8 * rng.next_double();
        p.mu = 3;
        p.seed = rng.next();
        p.generator = rep % 2 == 0 ? GeneratorKind::exact : GeneratorKind::poisson;
        const auto g = build_graph(p);
        for (NodeId w = 0; w < p.n; ++w)
            for (NodeId v = 0; v < p.n; ++v)
                if (w != v && greedy_path_exists(g, w, v) != brute_force_greedy_path(g, w, v))
                    return {false, "greedy-path mismatch on a graph with n=" +
                                       std::to_string(p.n)};
    }

    // fixed local-minimum instance, traces frozen from the manual
    // step-by-step execution
    std::vector<Edge> edges{{0, 1}, {0, 7}, {2, 3}, {3, 4}, {3, 5}, {5, 6}, {6, 7}};
    GraphParams p{.n = 8, .c = 1, .alpha = 2.5, .mu = 1, .seed = 0};
    const auto g = OverlayGraph::from_parts(p, 1.0, std::vector<std::uint32_t>(8, 1), edges,
                                            std::vector<EdgeKind>(7, EdgeKind::short_range),
                                            /*validate=*/false);
    const auto greedy = route(g, {3, 0, AlgorithmKind::Greedy, 0});
    if (greedy.outcome != RouteOutcome::failure || greedy.path != std::vector<NodeId>{3, 2})
        return {false, "greedy trace deviates from the manual trace"};
    const auto nbo = route(g, {3, 0, AlgorithmKind::NextBestOnce, 0});
    if (nbo.outcome != RouteOutcome::success ||
        nbo.path != std::vector<NodeId>{3, 2, 3, 5, 6, 7, 0} || nbo.marked_count != 2)
        return {false, "NextBestOnce trace deviates from the manual trace"};
    const auto ddfs = route(g, {3, 0, AlgorithmKind::DistanceDirectedDFS, 0});
    if (ddfs.outcome != RouteOutcome::success ||
        ddfs.path != std::vector<NodeId>{3, 2, 3, 5, 6, 7, 0} || ddfs.backtrack_hops != 1 ||
        ddfs.marked_count != 5)
        return {false, "DDFS trace deviates from the manual trace"};
    return {true, "1000 small graphs match exhaustive enumeration; fixed-instance traces "
                  "match the manual execution"};
}

// --------------------------------------------------------------- C11
std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c11_determinism() {
#ifndef SORSIM_CLI_PATH
    return {false, "CLI path not configured"};
#else
    const std::string cli = SORSIM_CLI_PATH;
    auto run = [&](const std::string& args) {
        return std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    };
    if (run("generate --n 4096 --c 4 --alpha 2.5 --seed 1 --out /tmp/sorsim_acc_a.json") != 0 ||
        run("generate --n 4096 --c 4 --alpha 2.5 --seed 1 --out /tmp/sorsim_acc_b.json") != 0)
        return {false, "cmd_generate failed"};
    if (slurp("/tmp/sorsim_acc_a.json") != slurp("/tmp/sorsim_acc_b.json"))
        return {false, "cmd_generate artifacts differ between runs"};

    ExperimentConfig config;
    config.n_values = {1024};
    config.c_values = {1, 2};
    config.alpha_values = {2.1, 2.5};
    config.algorithms = {AlgorithmKind::NextBestOnce, AlgorithmKind::NextBestOnceNoN,
                         AlgorithmKind::Greedy};
    config.graphs_per_cell = 2;
    config.pairs_per_graph = 50;
    config.base_seed = 0xC11ull;
    write_text_file("/tmp/sorsim_acc_cfg.json", serialize_experiment_config(config));
    if (run("experiment --config /tmp/sorsim_acc_cfg.json --out /tmp/sorsim_acc_1.csv "
            "--parallelism 1") != 0 ||
        run("experiment --config /tmp/sorsim_acc_cfg.json --out /tmp/sorsim_acc_2.csv "
            "--parallelism 4") != 0)
        return {false, "cmd_experiment failed"};
    if (slurp("/tmp/sorsim_acc_1.csv") != slurp("/tmp/sorsim_acc_2.csv"))
        return {false, "serial and parallel experiment CSVs differ"};
    return {true, "cmd_generate and cmd_experiment byte-identical across runs, serial == "
                  "parallel"};
#endif
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    RoutingGridStats grid;
    bool grid_ran = false;
    const auto ensure_grid = [&] {
        if (!grid_ran) {
            grid = routing_grid();
            grid_ran = true;
        }
    };

    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C01 gamma calibration", c1_gamma_calibration},
        {"C02 generator equivalence", c2_generator_equivalence},
        {"C03 termination and hop bound",
         [&] {
             ensure_grid();
             return c3_termination(grid);
         }},
        {"C04 completeness",
         [&] {
             ensure_grid();
             return c4_completeness(grid);
         }},
        {"C05 greedy-path probability", c5_greedy_path},
        {"C06 link-length tail", c6_link_length_tail},
        {"C07 inward-links trend", c7_inward_links},
        {"C08 NoN improvement", c8_non_improvement},
        {"C09 C-scaling", c9_c_scaling},
        {"C10 oracle equivalence", c10_oracle_equivalence},
        {"C11 determinism", c11_determinism},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && static_cast<int>(i + 1) != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const auto secs =
            std::chrono::duration_cast<std::chrono::duration<double>>(
                std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] %s: %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), outcome.detail.c_str(), secs);
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    return failures;
}
