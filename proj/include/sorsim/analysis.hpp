#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sorsim/graph.hpp"
#include "sorsim/routing.hpp"

namespace sorsim {

// Closed-form exponents of the routing-length bounds as functions of the
// label exponent alpha.
struct TheoreticalBounds {
    double alpha = 0.0;
    double nbo_upper_exponent = 0.0;  // alpha - 1
    double delta = 0.0;               // 1 - (alpha-2)(3-alpha)/alpha
    double non_exponent = 0.0;        // delta * (alpha - 1)
    double r_min_star = 0.0;
    double k_min = 0.0;               // alpha - 2
    std::string c_term_upper = "C^3 log n";
    std::string c_term_lower = "C";
};

TheoreticalBounds theoretical_bounds(double alpha);

// True iff some path from w reaches v with strictly decreasing ring
// distance to v at every step.
bool greedy_path_exists(const OverlayGraph& graph, NodeId w, NodeId v);

struct ConnectivityReport {
    bool connected = false;
    std::vector<std::uint32_t> component_sizes;  // descending
};

ConnectivityReport connectivity_check(const OverlayGraph& graph);
std::vector<std::uint32_t> component_labels(const OverlayGraph& graph);

struct EstimatorReport {
    std::string estimator;
    double point = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t samples = 0;
    bool defined = true;
    std::string diagnostic;
    std::optional<double> analytic;
    std::vector<std::pair<std::string, double>> parameters;
};

// Fraction of sampled pairs at ring distance above the threshold that are
// connected by a greedy path, over freshly generated graphs.
EstimatorReport estimate_greedy_path_probability(const GraphParams& params,
                                                 std::uint32_t distance_threshold,
                                                 std::uint64_t trials,
                                                 std::uint32_t pairs_per_graph = 100);

// Fraction of long-range links with length >= 2*sqrt(n), empirical plus
// the exact label-marginalized value.
EstimatorReport estimate_link_length_tail(const GraphParams& params, std::uint64_t trials,
                                          std::optional<double> gamma_override = std::nullopt);

double link_length_tail_analytic(std::uint32_t n, double alpha, std::uint32_t mu, double gamma);

// Monte Carlo mean long-range degree of label-1 nodes (raw generator
// output, before merging with short-range links); calibration makes the
// expectation exactly 1. Samples are collected across at least min_graphs
// graphs and the confidence interval uses a cluster-robust standard error
// with graphs as the sampling unit.
EstimatorReport estimate_label1_degree(const GraphParams& params, std::uint64_t min_samples,
                                       std::optional<double> gamma_override = std::nullopt,
                                       std::uint32_t min_graphs = 16);

// Number of nodes outside the sqrt(n) ball around t with at least one
// long-range neighbour inside the open ball of radius d around t.
std::uint64_t estimate_inward_links(const OverlayGraph& graph, NodeId t, std::uint32_t d);

struct MuRule {
    enum class Kind : std::uint8_t { explicit_value, log2_of_n };
    Kind kind = Kind::log2_of_n;
    std::uint32_t value = 0;

    std::uint32_t resolve(std::uint32_t n) const {
        return kind == Kind::explicit_value ? value : GraphParams::default_mu(n);
    }
};

struct ExperimentConfig {
    std::vector<std::uint32_t> n_values;
    std::vector<std::uint32_t> c_values;
    std::vector<double> alpha_values;
    MuRule mu_rule;
    std::vector<AlgorithmKind> algorithms;
    std::uint32_t graphs_per_cell = 1;
    std::uint32_t pairs_per_graph = 1;
    std::uint64_t base_seed = 0;
    GeneratorKind generator = GeneratorKind::poisson;

    void validate() const;
};

struct ExperimentRow {
    std::uint32_t n = 0;
    std::uint32_t c = 0;
    double alpha = 0.0;
    std::uint32_t mu = 0;
    AlgorithmKind algorithm = AlgorithmKind::NextBestOnce;
    GeneratorKind generator = GeneratorKind::poisson;
    std::uint64_t trials = 0;      // routed queries (disconnected pairs excluded)
    double success_rate = 0.0;
    double mean_hops = 0.0;        // means are over successful routes; NaN if none
    double ci95 = 0.0;             // half-width, normal approximation
    double mean_forward = 0.0;
    double mean_backtrack = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t skipped_disconnected = 0;
    std::uint64_t triples_digest = 0;  // audit: equal across algorithms of a cell
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<ExperimentRow> rows;
};

using GraphFactory = std::function<OverlayGraph(const GraphParams&, double gamma)>;

// Paired Monte Carlo sweep: every algorithm routes the exact same
// (graph, source, target) triples of a cell. Deterministic in base_seed,
// independent of parallelism.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned parallelism = 1);
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned parallelism,
                                const GraphFactory& factory);

// CSV with the fixed header
// n,c,alpha,mu,algorithm,generator,trials,success_rate,mean_hops,ci95,mean_forward,mean_backtrack
std::string experiment_csv(const ExperimentResult& result);

struct ScalingFit {
    AlgorithmKind algorithm = AlgorithmKind::NextBestOnce;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double intercept = 0.0;
    std::uint64_t points = 0;
};

// Regresses ln(mean_hops) on ln(ln n) per algorithm. Slopes are trend
// diagnostics only; the deliverable comparison is their ordering.
std::vector<ScalingFit> fit_scaling(const ExperimentResult& result);

}  // namespace sorsim
