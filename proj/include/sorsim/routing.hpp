#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sorsim/graph.hpp"

namespace sorsim {

enum class AlgorithmKind : std::uint8_t {
    Greedy,
    DistanceDirectedDFS,
    NextBestOnce,
    NextBestOnceNoN,
};

std::string to_string(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm(const std::string& name);

// Identifier set a node advertises for next-hop selection: its own id, or
// (for the NoN variant) its own id plus all neighbour ids.
std::vector<NodeId> ids_of(NodeId u, const OverlayGraph& graph, AlgorithmKind algorithm);

struct RouteQuery {
    NodeId source = 0;
    NodeId target = 0;
    AlgorithmKind algorithm = AlgorithmKind::NextBestOnce;
    std::uint64_t hop_cap = 0;  // 0 means the default 4*(1+c)*n

    std::uint64_t effective_hop_cap(const GraphParams& p) const {
        return hop_cap != 0 ? hop_cap
                            : 4ull * (1ull + p.c) * static_cast<std::uint64_t>(p.n);
    }
};

enum class RouteOutcome : std::uint8_t { success, failure, aborted };

std::string to_string(RouteOutcome outcome);

// Full audit record of one query. path holds every message transfer,
// forward and backtrack alike. x_sequence has one entry per forward-visited
// node (the source first): the ring distance to the target of that node's
// closest neighbour.
struct RouteTrace {
    std::vector<NodeId> path;
    std::uint64_t forward_hops = 0;
    std::uint64_t backtrack_hops = 0;
    std::uint64_t marked_count = 0;
    RouteOutcome outcome = RouteOutcome::failure;
    std::vector<std::uint32_t> x_sequence;
};

// Reusable per-query workspace; all state is logically reset between
// queries so route stays a pure function of (graph, query).
class RoutingScratch {
public:
    void prepare(std::uint32_t n);

private:
    friend RouteTrace route(const OverlayGraph&, const RouteQuery&, RoutingScratch&);
    std::vector<std::uint32_t> mark_epoch_;
    std::vector<std::vector<NodeId>> stacks_;
    std::vector<NodeId> touched_stacks_;
    std::uint32_t epoch_ = 0;
};

RouteTrace route(const OverlayGraph& graph, const RouteQuery& query);
RouteTrace route(const OverlayGraph& graph, const RouteQuery& query, RoutingScratch& scratch);

struct HalvingBin {
    std::uint32_t d_lo = 0;   // inclusive
    std::uint32_t d_hi = 0;   // exclusive
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double frequency = 0.0;   // NaN when the bin has no samples
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct HalvingProfile {
    std::vector<HalvingBin> bins;
    std::uint64_t observations = 0;
};

// Empirical frequency of the event X_{i+2} <= X_i / 2 over the recorded
// x-sequences, binned by powers of two of d = X_i. When r is given, only
// observations with d > exp((ln n)^r) are counted.
HalvingProfile halving_statistics(std::span<const RouteTrace> traces, std::uint32_t n,
                                  std::optional<double> r = std::nullopt);

// Reported statistic, not an invariant: the fraction of consecutive
// x-sequence steps with X_{i+1} <= X_i among steps where X_i > threshold
// (the closest-neighbour distance rarely worsens above the short-range
// scale, but backtracking can raise it).
double x_monotone_fraction(std::span<const RouteTrace> traces, std::uint32_t threshold);

}  // namespace sorsim
