#include "sorsim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "sorsim/stats.hpp"

namespace sorsim {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TheoreticalBounds theoretical_bounds(double alpha) {
    if (!(alpha > 2.0) || !(alpha < 3.0))
        throw std::invalid_argument("theoretical_bounds: alpha must lie strictly inside (2, 3)");
    TheoreticalBounds b;
    b.alpha = alpha;
    b.nbo_upper_exponent = alpha - 1.0;
    b.delta = 1.0 - (alpha - 2.0) * (3.0 - alpha) / alpha;
    b.non_exponent = b.delta * (alpha - 1.0);
    b.r_min_star = b.delta;
    b.k_min = alpha - 2.0;
    return b;
}

bool greedy_path_exists(const OverlayGraph& graph, NodeId w, NodeId v) {
    if (w == v) throw std::invalid_argument("greedy_path_exists: endpoints must differ");
    const std::uint32_t n = graph.n();
    // Search restricted to strictly distance-decreasing edges; this is a
    // DAG directed towards v, so a plain BFS suffices.
    std::vector<std::uint8_t> visited(n, 0);
    std::vector<NodeId> frontier{w};
    visited[w] = 1;
    while (!frontier.empty()) {
        std::vector<NodeId> next;
        for (NodeId x : frontier) {
            const std::uint32_t dx = ring_distance(x, v, n);
            for (NodeId y : graph.neighbors(x)) {
                if (visited[y]) continue;
                if (ring_distance(y, v, n) >= dx) continue;
                if (y == v) return true;
                visited[y] = 1;
                next.push_back(y);
            }
        }
        frontier = std::move(next);
    }
    return false;
}

std::vector<std::uint32_t> component_labels(const OverlayGraph& graph) {
    const std::uint32_t n = graph.n();
    std::vector<std::uint32_t> comp(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<NodeId> stack;
    std::uint32_t next_label = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (comp[v] != std::numeric_limits<std::uint32_t>::max()) continue;
        comp[v] = next_label;
        stack.push_back(v);
        while (!stack.empty()) {
            const NodeId x = stack.back();
            stack.pop_back();
            for (NodeId y : graph.neighbors(x)) {
                if (comp[y] == std::numeric_limits<std::uint32_t>::max()) {
                    comp[y] = next_label;
                    stack.push_back(y);
                }
            }
        }
        ++next_label;
    }
    return comp;
}

ConnectivityReport connectivity_check(const OverlayGraph& graph) {
    const auto comp = component_labels(graph);
    std::uint32_t count = 0;
    for (auto c : comp) count = std::max(count, c + 1);
    ConnectivityReport report;
    report.component_sizes.assign(count, 0);
    for (auto c : comp) ++report.component_sizes[c];
    std::sort(report.component_sizes.rbegin(), report.component_sizes.rend());
    report.connected = count == 1;
    return report;
}

namespace {

// Uniform draw of a node at ring distance strictly above threshold from s.
NodeId draw_far_node(Rng& rng, NodeId s, std::uint32_t n, std::uint32_t threshold) {
    const std::uint32_t dmax = n / 2;
    std::uint64_t qualifying;
    if (n % 2 == 0)
        qualifying = 2ull * (dmax - 1 - threshold) + 1;  // single node at the antipode
    else
        qualifying = 2ull * (dmax - threshold);
    const std::uint64_t j = rng.next_below(qualifying);
    std::uint32_t offset;
    bool forward;
    if (n % 2 == 0 && j == qualifying - 1) {
        offset = dmax;
        forward = true;
    } else {
        offset = threshold + 1 + static_cast<std::uint32_t>(j / 2);
        forward = (j % 2) == 0;
    }
    return forward ? (s + offset) % n : (s + n - offset) % n;
}

}  // namespace

EstimatorReport estimate_greedy_path_probability(const GraphParams& params,
                                                 std::uint32_t distance_threshold,
                                                 std::uint64_t trials,
                                                 std::uint32_t pairs_per_graph) {
    params.validate();
    if (trials == 0) throw std::invalid_argument("estimate_greedy_path_probability: zero trials");
    if (pairs_per_graph == 0) pairs_per_graph = 1;
    if (distance_threshold >= params.n / 2)
        throw std::invalid_argument(
            "estimate_greedy_path_probability: no pairs at distance above n/2");

    const double gamma = calibrate_gamma(params.n, params.alpha, params.mu);
    std::uint64_t connected = 0;
    std::optional<OverlayGraph> graph;
    std::optional<Rng> pair_rng;
    std::uint64_t current_graph = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t g = trial / pairs_per_graph;
        if (g != current_graph) {
            GraphParams p = params;
            p.seed = derive_seed(params.seed, StreamKind::estimator_graph, g);
            graph = build_graph(p, gamma);
            pair_rng = Rng::substream(params.seed, StreamKind::estimator_pairs, g);
            current_graph = g;
        }
        const auto s = static_cast<NodeId>(pair_rng->next_below(params.n));
        const NodeId t = draw_far_node(*pair_rng, s, params.n, distance_threshold);
        if (greedy_path_exists(*graph, s, t)) ++connected;
    }

    EstimatorReport report;
    report.estimator = "greedy_path_probability";
    report.samples = trials;
    report.point = static_cast<double>(connected) / static_cast<double>(trials);
    const auto ci = stats::wilson_interval(connected, trials);
    report.ci_lo = ci.lo;
    report.ci_hi = ci.hi;
    report.parameters = {{"n", static_cast<double>(params.n)},
                         {"c", static_cast<double>(params.c)},
                         {"alpha", params.alpha},
                         {"mu", static_cast<double>(params.mu)},
                         {"seed", static_cast<double>(params.seed)},
                         {"distance_threshold", static_cast<double>(distance_threshold)},
                         {"trials", static_cast<double>(trials)}};
    return report;
}

double link_length_tail_analytic(std::uint32_t n, double alpha, std::uint32_t mu, double gamma) {
    struct Key {
        std::uint32_t n, mu;
        double alpha, gamma;
        bool operator<(const Key& o) const {
            return std::tie(n, mu, alpha, gamma) < std::tie(o.n, o.mu, o.alpha, o.gamma);
        }
    };
    static std::map<Key, double> cache;
    static std::mutex cache_mutex;
    const Key key{n, mu, alpha, gamma};
    {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }

    const LabelDistribution labels(alpha, mu);
    const std::uint32_t dmax = n / 2;
    const auto cutoff =
        static_cast<std::uint32_t>(std::llround(2.0 * std::sqrt(static_cast<double>(n))));
    double num = 0.0, den = 0.0;
    for (std::uint32_t d = 1; d <= dmax; ++d) {
        double pbar = 0.0;
        for (std::uint32_t l1 = 1; l1 <= mu; ++l1)
            for (std::uint32_t l2 = 1; l2 <= mu; ++l2)
                pbar += labels.pmf(l1) * labels.pmf(l2) *
                        -std::expm1(-static_cast<double>(l1) * l2 /
                                    (static_cast<double>(d) * gamma));
        const double pairs = (n % 2 == 0 && d == dmax) ? n / 2.0 : static_cast<double>(n);
        const double w = pairs * pbar;
        den += w;
        if (d >= cutoff) num += w;
    }
    const double value = num / den;
    std::lock_guard lock(cache_mutex);
    cache[key] = value;
    return value;
}

EstimatorReport estimate_link_length_tail(const GraphParams& params, std::uint64_t trials,
                                          std::optional<double> gamma_override) {
    params.validate();
    if (params.n < 16) throw std::invalid_argument("estimate_link_length_tail: n must be >= 16");
    const double gamma =
        gamma_override ? *gamma_override : calibrate_gamma(params.n, params.alpha, params.mu);
    const auto cutoff = static_cast<std::uint32_t>(
        std::llround(2.0 * std::sqrt(static_cast<double>(params.n))));

    std::uint64_t total = 0, tail = 0;
    const std::uint64_t max_graphs = 64 + 8 * (trials / std::max<std::uint64_t>(params.n, 1) + 1);
    for (std::uint64_t g = 0; g < max_graphs && total < trials; ++g) {
        const std::uint64_t seed = derive_seed(params.seed, StreamKind::estimator_graph, g);
        const auto labels = sample_labels(params.n, params.alpha, params.mu, seed);
        const auto edges = params.generator == GeneratorKind::exact
                               ? generate_long_range_exact(labels, gamma, seed)
                               : generate_long_range_poisson(labels, gamma, seed);
        for (const auto& [u, v] : edges) {
            ++total;
            if (ring_distance(u, v, params.n) >= cutoff) ++tail;
        }
    }

    EstimatorReport report;
    report.estimator = "link_length_tail";
    report.samples = total;
    report.analytic = link_length_tail_analytic(params.n, params.alpha, params.mu, gamma);
    report.parameters = {{"n", static_cast<double>(params.n)},
                         {"alpha", params.alpha},
                         {"mu", static_cast<double>(params.mu)},
                         {"seed", static_cast<double>(params.seed)},
                         {"gamma", gamma},
                         {"cutoff", static_cast<double>(cutoff)},
                         {"trials", static_cast<double>(trials)}};
    if (total == 0) {
        report.defined = false;
        report.point = kNaN;
        report.ci_lo = report.ci_hi = kNaN;
        report.diagnostic = "no long-range edges generated; mu or gamma is pathological";
        return report;
    }
    report.point = static_cast<double>(tail) / static_cast<double>(total);
    const auto ci = stats::wilson_interval(tail, total);
    report.ci_lo = ci.lo;
    report.ci_hi = ci.hi;
    return report;
}

EstimatorReport estimate_label1_degree(const GraphParams& params, std::uint64_t min_samples,
                                       std::optional<double> gamma_override,
                                       std::uint32_t min_graphs) {
    params.validate();
    if (min_samples == 0) throw std::invalid_argument("estimate_label1_degree: zero samples");
    if (min_graphs < 2) min_graphs = 2;
    const double gamma =
        gamma_override ? *gamma_override : calibrate_gamma(params.n, params.alpha, params.mu);

    // Degrees of label-1 nodes within one graph share the realized label
    // environment, so graphs are the honest sampling unit: the standard
    // error comes from a cluster-robust ratio estimator over graphs.
    std::vector<std::pair<double, double>> per_graph;  // (degree sum, node count)
    std::uint64_t total_nodes = 0;
    const std::uint64_t max_graphs =
        std::max<std::uint64_t>(min_graphs, 64 + 16 * (min_samples / params.n + 1));
    for (std::uint64_t g = 0; g < max_graphs; ++g) {
        if (total_nodes >= min_samples && per_graph.size() >= min_graphs) break;
        const std::uint64_t seed = derive_seed(params.seed, StreamKind::estimator_graph, g);
        const auto labels = sample_labels(params.n, params.alpha, params.mu, seed);
        const auto edges = params.generator == GeneratorKind::exact
                               ? generate_long_range_exact(labels, gamma, seed)
                               : generate_long_range_poisson(labels, gamma, seed);
        std::vector<std::uint32_t> degree(params.n, 0);
        for (const auto& [u, v] : edges) {
            ++degree[u];
            ++degree[v];
        }
        double sum = 0, count = 0;
        for (NodeId v = 0; v < params.n; ++v) {
            if (labels[v] != 1) continue;
            sum += degree[v];
            count += 1;
        }
        per_graph.emplace_back(sum, count);
        total_nodes += static_cast<std::uint64_t>(count);
    }

    EstimatorReport report;
    report.estimator = "label1_long_range_degree";
    report.samples = total_nodes;
    report.analytic = expected_label1_degree(params.n, params.alpha, params.mu, gamma);
    report.parameters = {{"n", static_cast<double>(params.n)},
                         {"alpha", params.alpha},
                         {"mu", static_cast<double>(params.mu)},
                         {"seed", static_cast<double>(params.seed)},
                         {"gamma", gamma},
                         {"min_samples", static_cast<double>(min_samples)},
                         {"graphs", static_cast<double>(per_graph.size())}};
    if (total_nodes == 0) {
        report.defined = false;
        report.point = kNaN;
        report.ci_lo = report.ci_hi = kNaN;
        report.diagnostic = "no label-1 nodes sampled";
        return report;
    }
    double sum = 0, count = 0;
    for (const auto& [s, k] : per_graph) {
        sum += s;
        count += k;
    }
    report.point = sum / count;
    double resid = 0;
    for (const auto& [s, k] : per_graph) resid += (s - report.point * k) * (s - report.point * k);
    const auto g_count = static_cast<double>(per_graph.size());
    const double se = std::sqrt(resid * g_count / (g_count - 1.0)) / count;
    report.ci_lo = report.point - stats::kZ95 * se;
    report.ci_hi = report.point + stats::kZ95 * se;
    return report;
}

std::uint64_t estimate_inward_links(const OverlayGraph& graph, NodeId t, std::uint32_t d) {
    const std::uint32_t n = graph.n();
    if (t >= n) throw std::invalid_argument("estimate_inward_links: t out of range");
    const auto sqrt_n =
        static_cast<std::uint32_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d >= sqrt_n)
        throw std::invalid_argument("estimate_inward_links: d must be below sqrt(n)");
    if (d == 0) return 0;
    const BallSpec inner{t, d};
    const BallSpec sqrt_ball{t, sqrt_n};

    std::vector<NodeId> qualifying;
    const auto& edges = graph.edges();
    const auto& kinds = graph.edge_kinds();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (kinds[i] != EdgeKind::long_range) continue;
        const auto& [u, v] = edges[i];
        if (inner.contains(v, n) && !sqrt_ball.contains(u, n)) qualifying.push_back(u);
        if (inner.contains(u, n) && !sqrt_ball.contains(v, n)) qualifying.push_back(v);
    }
    std::sort(qualifying.begin(), qualifying.end());
    qualifying.erase(std::unique(qualifying.begin(), qualifying.end()), qualifying.end());
    return qualifying.size();
}

void ExperimentConfig::validate() const {
    if (n_values.empty() || c_values.empty() || alpha_values.empty())
        throw std::invalid_argument("experiment config: n/c/alpha value lists must be non-empty");
    if (algorithms.empty())
        throw std::invalid_argument("experiment config: algorithm list must be non-empty");
    if (graphs_per_cell < 1 || pairs_per_graph < 1)
        throw std::invalid_argument("experiment config: counts must be >= 1");
    if (mu_rule.kind == MuRule::Kind::explicit_value && mu_rule.value < 1)
        throw std::invalid_argument("experiment config: explicit mu must be >= 1");
}

namespace {

struct Cell {
    std::uint32_t n, c, mu;
    double alpha;
    double gamma;
};

struct AlgoPartial {
    std::uint64_t routed = 0;
    std::uint64_t successes = 0;
    std::uint64_t hop_sum = 0;
    std::uint64_t fwd_sum = 0;
    std::uint64_t back_sum = 0;
    double hop_sumsq = 0.0;
};

struct TaskPartial {
    std::vector<AlgoPartial> per_algo;
    std::uint64_t skipped = 0;
    std::uint64_t digest = 0xcbf29ce484222325ull;  // FNV-1a basis
};

inline void fnv_mix(std::uint64_t& h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xff;
        h *= 0x100000001b3ull;
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned parallelism,
                                const GraphFactory& factory) {
    config.validate();
    if (parallelism == 0) parallelism = 1;

    std::vector<Cell> cells;
    for (auto n : config.n_values)
        for (auto c : config.c_values)
            for (auto alpha : config.alpha_values)
                cells.push_back({n, c, config.mu_rule.resolve(n), alpha, 0.0});

    // Calibrations are shared across graphs; resolve them up front.
    {
        std::map<std::tuple<std::uint32_t, double, std::uint32_t>, double> gammas;
        for (auto& cell : cells) {
            const auto key = std::make_tuple(cell.n, cell.alpha, cell.mu);
            auto it = gammas.find(key);
            if (it == gammas.end())
                it = gammas.emplace(key, calibrate_gamma(cell.n, cell.alpha, cell.mu)).first;
            cell.gamma = it->second;
        }
    }

    const std::uint64_t graphs = config.graphs_per_cell;
    const std::uint64_t task_count = cells.size() * graphs;
    std::vector<TaskPartial> partials(task_count);
    for (auto& p : partials) p.per_algo.resize(config.algorithms.size());

    const auto run_task = [&](std::uint64_t task, RoutingScratch& scratch) {
        const std::uint64_t cell_idx = task / graphs;
        const std::uint64_t graph_idx = task % graphs;
        const Cell& cell = cells[cell_idx];
        const std::uint64_t stream_index = (cell_idx << 32) | graph_idx;

        GraphParams p;
        p.n = cell.n;
        p.c = cell.c;
        p.alpha = cell.alpha;
        p.mu = cell.mu;
        p.generator = config.generator;
        p.seed = derive_seed(config.base_seed, StreamKind::experiment_graph, stream_index);
        const OverlayGraph graph = factory(p, cell.gamma);
        const auto comp = component_labels(graph);

        TaskPartial& out = partials[task];
        Rng pair_rng = Rng::substream(config.base_seed, StreamKind::experiment_pairs, stream_index);
        for (std::uint32_t pair = 0; pair < config.pairs_per_graph; ++pair) {
            const auto s = static_cast<NodeId>(pair_rng.next_below(cell.n));
            NodeId t = s;
            while (t == s) t = static_cast<NodeId>(pair_rng.next_below(cell.n));
            if (comp[s] != comp[t]) {
                ++out.skipped;
                continue;
            }
            fnv_mix(out.digest, p.seed);
            fnv_mix(out.digest, s);
            fnv_mix(out.digest, t);
            for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
                RouteQuery query{s, t, config.algorithms[a], 0};
                const RouteTrace trace = route(graph, query, scratch);
                AlgoPartial& acc = out.per_algo[a];
                ++acc.routed;
                if (trace.outcome == RouteOutcome::success) {
                    const std::uint64_t hops = trace.forward_hops + trace.backtrack_hops;
                    ++acc.successes;
                    acc.hop_sum += hops;
                    acc.fwd_sum += trace.forward_hops;
                    acc.back_sum += trace.backtrack_hops;
                    acc.hop_sumsq += static_cast<double>(hops) * static_cast<double>(hops);
                }
            }
        }
    };

    if (parallelism == 1 || task_count == 1) {
        RoutingScratch scratch;
        for (std::uint64_t task = 0; task < task_count; ++task) run_task(task, scratch);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> workers;
        const unsigned count = std::min<std::uint64_t>(parallelism, task_count);
        for (unsigned w = 0; w < count; ++w) {
            workers.emplace_back([&] {
                RoutingScratch scratch;
                for (;;) {
                    const std::uint64_t task = next.fetch_add(1);
                    if (task >= task_count) return;
                    run_task(task, scratch);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    // Combine per-graph partials in index order so the result is identical
    // for any parallelism.
    ExperimentResult result;
    result.config = config;
    for (std::size_t cell_idx = 0; cell_idx < cells.size(); ++cell_idx) {
        const Cell& cell = cells[cell_idx];
        std::uint64_t skipped = 0;
        std::uint64_t digest = 0xcbf29ce484222325ull;
        for (std::uint64_t g = 0; g < graphs; ++g) {
            const TaskPartial& tp = partials[cell_idx * graphs + g];
            skipped += tp.skipped;
            fnv_mix(digest, tp.digest);
        }
        for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
            AlgoPartial total;
            for (std::uint64_t g = 0; g < graphs; ++g) {
                const AlgoPartial& ap = partials[cell_idx * graphs + g].per_algo[a];
                total.routed += ap.routed;
                total.successes += ap.successes;
                total.hop_sum += ap.hop_sum;
                total.fwd_sum += ap.fwd_sum;
                total.back_sum += ap.back_sum;
                total.hop_sumsq += ap.hop_sumsq;
            }
            ExperimentRow row;
            row.n = cell.n;
            row.c = cell.c;
            row.alpha = cell.alpha;
            row.mu = cell.mu;
            row.algorithm = config.algorithms[a];
            row.generator = config.generator;
            row.trials = total.routed;
            row.successes = total.successes;
            row.skipped_disconnected = skipped;
            row.triples_digest = digest;
            row.success_rate =
                total.routed == 0
                    ? 0.0
                    : static_cast<double>(total.successes) / static_cast<double>(total.routed);
            if (total.successes == 0) {
                row.mean_hops = row.ci95 = row.mean_forward = row.mean_backtrack = kNaN;
            } else {
                const auto k = static_cast<double>(total.successes);
                row.mean_hops = static_cast<double>(total.hop_sum) / k;
                row.mean_forward = static_cast<double>(total.fwd_sum) / k;
                row.mean_backtrack = static_cast<double>(total.back_sum) / k;
                if (total.successes > 1) {
                    const double var =
                        (total.hop_sumsq - k * row.mean_hops * row.mean_hops) / (k - 1.0);
                    row.ci95 = stats::kZ95 * std::sqrt(std::max(0.0, var) / k);
                }
            }
            result.rows.push_back(row);
        }
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned parallelism) {
    return run_experiment(config, parallelism,
                          [](const GraphParams& p, double gamma) { return build_graph(p, gamma); });
}

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string experiment_csv(const ExperimentResult& result) {
    std::string out =
        "n,c,alpha,mu,algorithm,generator,trials,success_rate,mean_hops,ci95,"
        "mean_forward,mean_backtrack\n";
    for (const auto& row : result.rows) {
        out += std::to_string(row.n) + ',' + std::to_string(row.c) + ',' +
               format_double(row.alpha) + ',' + std::to_string(row.mu) + ',' +
               to_string(row.algorithm) + ',' + to_string(row.generator) + ',' +
               std::to_string(row.trials) + ',' + format_double(row.success_rate) + ',' +
               format_double(row.mean_hops) + ',' + format_double(row.ci95) + ',' +
               format_double(row.mean_forward) + ',' + format_double(row.mean_backtrack) + '\n';
    }
    return out;
}

std::vector<ScalingFit> fit_scaling(const ExperimentResult& result) {
    std::vector<AlgorithmKind> algos;
    for (const auto& row : result.rows)
        if (std::find(algos.begin(), algos.end(), row.algorithm) == algos.end())
            algos.push_back(row.algorithm);

    std::vector<ScalingFit> fits;
    for (auto algo : algos) {
        std::vector<double> x, y;
        std::optional<std::pair<std::uint32_t, double>> fixed;
        for (const auto& row : result.rows) {
            if (row.algorithm != algo) continue;
            if (!fixed)
                fixed = {row.c, row.alpha};
            else if (fixed->first != row.c || fixed->second != row.alpha)
                throw std::invalid_argument("fit_scaling: rows must share a single (c, alpha)");
            if (std::isnan(row.mean_hops))
                throw std::invalid_argument("fit_scaling: undefined mean_hops in input row");
            x.push_back(std::log(std::log(static_cast<double>(row.n))));
            y.push_back(std::log(row.mean_hops));
        }
        std::vector<double> distinct(x);
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 3)
            throw std::invalid_argument("fit_scaling: need >= 3 distinct n values per algorithm");
        const auto fit = stats::linear_fit(x, y);
        fits.push_back({algo, fit.slope, fit.slope_stderr, fit.intercept, fit.points});
    }
    return fits;
}

}  // namespace sorsim
