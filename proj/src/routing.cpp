#include "sorsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sorsim/stats.hpp"

namespace sorsim {

std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::Greedy: return "Greedy";
        case AlgorithmKind::DistanceDirectedDFS: return "DistanceDirectedDFS";
        case AlgorithmKind::NextBestOnce: return "NextBestOnce";
        case AlgorithmKind::NextBestOnceNoN: return "NextBestOnceNoN";
    }
    return "?";
}

std::optional<AlgorithmKind> parse_algorithm(const std::string& name) {
    if (name == "Greedy" || name == "greedy") return AlgorithmKind::Greedy;
    if (name == "DistanceDirectedDFS" || name == "ddfs") return AlgorithmKind::DistanceDirectedDFS;
    if (name == "NextBestOnce" || name == "nbo") return AlgorithmKind::NextBestOnce;
    if (name == "NextBestOnceNoN" || name == "non") return AlgorithmKind::NextBestOnceNoN;
    return std::nullopt;
}

std::string to_string(RouteOutcome outcome) {
    switch (outcome) {
        case RouteOutcome::success: return "success";
        case RouteOutcome::failure: return "failure";
        case RouteOutcome::aborted: return "aborted";
    }
    return "?";
}

std::vector<NodeId> ids_of(NodeId u, const OverlayGraph& graph, AlgorithmKind algorithm) {
    if (u >= graph.n()) throw std::invalid_argument("ids_of: node out of range");
    if (graph.degree(u) == 0)
        throw std::invalid_argument("ids_of: node " + std::to_string(u) +
                                    " has no neighbours, which the model excludes");
    std::vector<NodeId> ids{u};
    if (algorithm == AlgorithmKind::NextBestOnceNoN) {
        const auto nb = graph.neighbors(u);
        ids.insert(ids.end(), nb.begin(), nb.end());
    }
    return ids;
}

void RoutingScratch::prepare(std::uint32_t n) {
    if (mark_epoch_.size() != n) {
        mark_epoch_.assign(n, 0);
        stacks_.assign(n, {});
        epoch_ = 0;
    }
    for (NodeId v : touched_stacks_) stacks_[v].clear();
    touched_stacks_.clear();
    ++epoch_;
    if (epoch_ == 0) {  // epoch counter wrapped; rare enough to just reset
        mark_epoch_.assign(n, 0);
        epoch_ = 1;
    }
}

namespace {

// Selection key per Algorithm 1: minimum distance over the advertised
// identifier set, ties broken by the candidate's own distance, then by id.
struct CandidateKey {
    std::uint32_t ids_dist;
    std::uint32_t own_dist;
    NodeId node;
    bool operator<(const CandidateKey& o) const {
        if (ids_dist != o.ids_dist) return ids_dist < o.ids_dist;
        if (own_dist != o.own_dist) return own_dist < o.own_dist;
        return node < o.node;
    }
};

std::uint32_t closest_neighbor_distance(const OverlayGraph& g, NodeId v, NodeId t) {
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (NodeId w : g.neighbors(v)) best = std::min(best, ring_distance(w, t, g.n()));
    return best;
}

RouteTrace route_greedy(const OverlayGraph& g, const RouteQuery& q) {
    const std::uint32_t n = g.n();
    const NodeId t = q.target;
    const std::uint64_t cap = q.effective_hop_cap(g.params());
    RouteTrace trace;
    NodeId v = q.source;
    trace.path.push_back(v);
    for (;;) {
        if (g.degree(v) > 0)
            trace.x_sequence.push_back(closest_neighbor_distance(g, v, t));
        if (v == t) {
            trace.outcome = RouteOutcome::success;
            return trace;
        }
        if (g.degree(v) == 0)
            throw std::invalid_argument("route: node without neighbours encountered");
        if (trace.forward_hops >= cap) {
            trace.outcome = RouteOutcome::aborted;
            return trace;
        }
        const std::uint32_t here = ring_distance(v, t, n);
        CandidateKey best{std::numeric_limits<std::uint32_t>::max(), 0, 0};
        bool found = false;
        for (NodeId u : g.neighbors(v)) {
            const std::uint32_t du = ring_distance(u, t, n);
            if (du >= here) continue;  // forward only to strictly closer neighbours
            const CandidateKey key{du, du, u};
            if (!found || key < best) {
                best = key;
                found = true;
            }
        }
        if (!found) {
            trace.outcome = RouteOutcome::failure;  // local minimum
            return trace;
        }
        v = best.node;
        trace.path.push_back(v);
        ++trace.forward_hops;
    }
}

}  // namespace

RouteTrace route(const OverlayGraph& graph, const RouteQuery& query, RoutingScratch& scratch) {
    const std::uint32_t n = graph.n();
    if (query.source >= n || query.target >= n)
        throw std::invalid_argument("route: source or target out of range");
    if (query.algorithm == AlgorithmKind::Greedy) return route_greedy(graph, query);

    const bool ddfs = query.algorithm == AlgorithmKind::DistanceDirectedDFS;
    const bool non = query.algorithm == AlgorithmKind::NextBestOnceNoN;
    const NodeId t = query.target;
    const std::uint64_t cap = query.effective_hop_cap(graph.params());

    scratch.prepare(n);
    auto& mark_epoch = scratch.mark_epoch_;
    auto& stacks = scratch.stacks_;
    const std::uint32_t epoch = scratch.epoch_;
    const auto marked = [&](NodeId u) { return mark_epoch[u] == epoch; };

    RouteTrace trace;
    std::uint64_t marked_count = 0;
    const auto mark = [&](NodeId u) {
        if (mark_epoch[u] != epoch) {
            mark_epoch[u] = epoch;
            ++marked_count;
        }
    };

    NodeId v = query.source;
    NodeId predecessor = v;   // meaningful only after the first transfer
    bool backtracking = false;
    bool initial_arrival = true;
    trace.path.push_back(v);

    for (;;) {
        if (!backtracking && graph.degree(v) > 0)
            trace.x_sequence.push_back(closest_neighbor_distance(graph, v, t));
        if (v == t) {
            trace.outcome = RouteOutcome::success;
            break;
        }
        if (graph.degree(v) == 0)
            throw std::invalid_argument("route: node without neighbours encountered");
        if (!backtracking && !initial_arrival) {
            if (stacks[v].empty()) scratch.touched_stacks_.push_back(v);
            stacks[v].push_back(predecessor);
        }
        if (ddfs) mark(v);  // distance-directed DFS marks on first contact
        initial_arrival = false;

        if (trace.forward_hops + trace.backtrack_hops >= cap) {
            trace.outcome = RouteOutcome::aborted;
            break;
        }

        NodeId next;
        CandidateKey best{std::numeric_limits<std::uint32_t>::max(), 0, 0};
        bool have_candidate = false;
        for (NodeId u : graph.neighbors(v)) {
            if (marked(u)) continue;
            const std::uint32_t own = ring_distance(u, t, n);
            std::uint32_t ids = own;
            if (non)
                ids = std::min(ids, closest_neighbor_distance(graph, u, t));
            const CandidateKey key{ids, own, u};
            if (!have_candidate || key < best) {
                best = key;
                have_candidate = true;
            }
        }
        if (have_candidate) {
            next = best.node;
            backtracking = false;
            // Marking compares representative (own) identifiers only.
            if (!ddfs && ring_distance(next, t, n) >= ring_distance(v, t, n)) mark(v);
            ++trace.forward_hops;
        } else {
            mark(v);
            if (stacks[v].empty()) {
                trace.outcome = RouteOutcome::failure;
                break;
            }
            next = stacks[v].back();
            stacks[v].pop_back();
            backtracking = true;
            ++trace.backtrack_hops;
        }
        predecessor = v;
        v = next;
        trace.path.push_back(v);
    }
    trace.marked_count = marked_count;
    return trace;
}

RouteTrace route(const OverlayGraph& graph, const RouteQuery& query) {
    RoutingScratch scratch;
    return route(graph, query, scratch);
}

HalvingProfile halving_statistics(std::span<const RouteTrace> traces, std::uint32_t n,
                                  std::optional<double> r) {
    double d_floor = 0.0;
    if (r) d_floor = std::exp(std::pow(std::log(static_cast<double>(n)), *r));

    // Power-of-two bins indexed by floor(log2 d).
    std::vector<std::uint64_t> trials, successes;
    const auto bin_of = [](std::uint32_t d) {
        std::uint32_t b = 0;
        while ((2u << b) <= d) ++b;
        return b;
    };
    HalvingProfile profile;
    for (const auto& trace : traces) {
        const auto& x = trace.x_sequence;
        for (std::size_t i = 0; i + 2 < x.size(); ++i) {
            const std::uint32_t d = x[i];
            if (d == 0) continue;
            if (static_cast<double>(d) <= d_floor) continue;
            const std::uint32_t b = bin_of(d);
            if (b >= trials.size()) {
                trials.resize(b + 1, 0);
                successes.resize(b + 1, 0);
            }
            ++trials[b];
            if (2ull * x[i + 2] <= d) ++successes[b];
            ++profile.observations;
        }
    }
    for (std::size_t b = 0; b < trials.size(); ++b) {
        HalvingBin bin;
        bin.d_lo = 1u << b;
        bin.d_hi = 2u << b;
        bin.trials = trials[b];
        bin.successes = successes[b];
        if (trials[b] == 0) {
            bin.frequency = std::numeric_limits<double>::quiet_NaN();
        } else {
            bin.frequency = static_cast<double>(successes[b]) / static_cast<double>(trials[b]);
            const auto ci = stats::wilson_interval(successes[b], trials[b]);
            bin.ci_lo = ci.lo;
            bin.ci_hi = ci.hi;
        }
        profile.bins.push_back(bin);
    }
    return profile;
}

double x_monotone_fraction(std::span<const RouteTrace> traces, std::uint32_t threshold) {
    std::uint64_t steps = 0, monotone = 0;
    for (const auto& trace : traces) {
        const auto& x = trace.x_sequence;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            if (x[i] <= threshold) continue;
            ++steps;
            if (x[i + 1] <= x[i]) ++monotone;
        }
    }
    if (steps == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(monotone) / static_cast<double>(steps);
}

}  // namespace sorsim
