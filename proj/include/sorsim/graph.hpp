#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sorsim/rng.hpp"

namespace sorsim {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;  // stored with first < second

enum class GeneratorKind : std::uint8_t { exact, poisson };
enum class EdgeKind : std::uint8_t { short_range, long_range };

std::string to_string(GeneratorKind kind);
std::optional<GeneratorKind> parse_generator(const std::string& name);

// Parameters of one instance of the embedded-overlay model: a ring of n
// nodes whose short-range links may miss the exact lattice neighbour by up
// to c positions, plus label-weighted long-range links with scale-free
// label exponent alpha truncated at mu.
struct GraphParams {
    std::uint32_t n = 0;
    std::uint32_t c = 1;
    double alpha = 2.5;
    std::uint32_t mu = 1;
    std::uint64_t seed = 0;
    GeneratorKind generator = GeneratorKind::poisson;

    // Throws std::invalid_argument naming the violated constraint; returns
    // human-readable warnings for accepted-but-dubious values.
    std::vector<std::string> validate() const;

    static std::uint32_t default_mu(std::uint32_t n);
};

// Ring (wrap-around) distance between two positions.
inline std::uint32_t ring_distance(NodeId u, NodeId v, std::uint32_t n) {
    const std::uint32_t a = u < v ? v - u : u - v;
    return a < n - a ? a : n - a;
}

// Open ball: contains(u) iff ring_distance(u, center) < radius.
struct BallSpec {
    NodeId center = 0;
    std::uint32_t radius = 0;
    bool contains(NodeId u, std::uint32_t n) const {
        return ring_distance(u, center, n) < radius;
    }
};

// Truncated scale-free label law: P(k) proportional to k^-alpha, 1 <= k <= mu.
class LabelDistribution {
public:
    LabelDistribution(double alpha, std::uint32_t mu);
    std::uint32_t sample(Rng& rng) const;
    double pmf(std::uint32_t k) const;
    double mean() const { return mean_; }
    std::uint32_t mu() const { return mu_; }

private:
    std::uint32_t mu_;
    double mean_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
};

std::uint32_t sample_label(Rng& rng, double alpha, std::uint32_t mu);

// P(long-range link | labels, distance) = 1 - exp(-l_u*l_v/(d*gamma)).
double long_range_probability(std::uint32_t l_u, std::uint32_t l_v, std::uint32_t d, double gamma);

// Expected number of long-range links of a label-1 node under gamma.
// Exact pair counts are used: two nodes per distance, one at the antipode
// of an even ring.
double expected_label1_degree(std::uint32_t n, double alpha, std::uint32_t mu, double gamma);

// Solves expected_label1_degree(gamma) == 1 by bracketed bisection; the
// function is strictly decreasing in gamma so the root is unique.
double calibrate_gamma(std::uint32_t n, double alpha, std::uint32_t mu, double tol = 1e-10);

// Per-node labels, one derived stream per node.
std::vector<std::uint32_t> sample_labels(std::uint32_t n, double alpha, std::uint32_t mu,
                                         std::uint64_t seed);

// Short-range edges: every node picks one neighbour uniformly in
// {v+1..v+c} and one in {v-c..v-1} (mod n); returns the deduplicated
// undirected union.
std::vector<Edge> generate_short_range(std::uint32_t n, std::uint32_t c, std::uint64_t seed);

inline constexpr std::uint32_t kExactGeneratorDefaultCap = 1u << 15;

// Quadratic generator: every unordered pair is an independent Bernoulli
// draw with the long-range probability.
std::vector<Edge> generate_long_range_exact(std::span<const std::uint32_t> labels, double gamma,
                                            std::uint64_t seed,
                                            std::uint32_t n_cap = kExactGeneratorDefaultCap);

struct PoissonGenStats {
    std::uint64_t events = 0;
    std::uint64_t accepted = 0;
};

// Scalable generator with the identical joint edge distribution: an edge
// is present iff a Poisson count with rate l_u*l_v/(d*gamma) is >= 1.
// Events are drawn from an envelope with per-pair rate mu^2/(d*gamma) and
// thinned with probability l_u*l_v/mu^2.
std::vector<Edge> generate_long_range_poisson(std::span<const std::uint32_t> labels, double gamma,
                                              std::uint64_t seed,
                                              PoissonGenStats* stats = nullptr);

class OverlayGraph {
public:
    // Assembles a graph from raw parts; validates the model invariants
    // unless told otherwise (tests build deliberately broken graphs).
    static OverlayGraph from_parts(GraphParams params, double gamma,
                                   std::vector<std::uint32_t> labels, std::vector<Edge> edges,
                                   std::vector<EdgeKind> kinds, bool validate = true);

    const GraphParams& params() const { return params_; }
    std::uint32_t n() const { return params_.n; }
    double gamma() const { return gamma_; }

    std::uint32_t label(NodeId v) const { return labels_[v]; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }

    std::span<const NodeId> neighbors(NodeId v) const {
        return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
    }
    std::uint32_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

    // Canonical edge list: pairs (u, v) with u < v, lexicographically sorted.
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<EdgeKind>& edge_kinds() const { return kinds_; }
    std::uint64_t edge_count(EdgeKind kind) const;

    bool operator==(const OverlayGraph& other) const;

private:
    OverlayGraph() = default;
    void build_adjacency();
    void check_edge_invariants() const;
    void check_structure_invariants() const;

    GraphParams params_;
    double gamma_ = 0.0;
    std::vector<std::uint32_t> labels_;
    std::vector<Edge> edges_;
    std::vector<EdgeKind> kinds_;
    std::vector<std::uint32_t> offsets_;
    std::vector<NodeId> adj_;
};

// Calibrates gamma, samples labels, generates short- and long-range edges
// and merges them into an immutable graph; a pure function of params.
OverlayGraph build_graph(const GraphParams& params);
OverlayGraph build_graph(const GraphParams& params, double gamma);

}  // namespace sorsim
