#include "sorsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sorsim {

std::string to_string(GeneratorKind kind) {
    return kind == GeneratorKind::exact ? "exact" : "poisson";
}

std::optional<GeneratorKind> parse_generator(const std::string& name) {
    if (name == "exact") return GeneratorKind::exact;
    if (name == "poisson") return GeneratorKind::poisson;
    return std::nullopt;
}

std::uint32_t GraphParams::default_mu(std::uint32_t n) {
    std::uint32_t bits = 0;
    while ((1ull << bits) < n) ++bits;
    return std::max<std::uint32_t>(2, bits);
}

std::vector<std::string> GraphParams::validate() const {
    if (n < 4) throw std::invalid_argument("graph params: n must be >= 4");
    if (c < 1) throw std::invalid_argument("graph params: c must be >= 1");
    if (4ull * c >= n)
        throw std::invalid_argument("graph params: c must satisfy 1 <= c < n/4");
    if (!(alpha > 2.0) || !(alpha < 3.0))
        throw std::invalid_argument("graph params: alpha must lie strictly inside (2, 3)");
    if (mu < 1) throw std::invalid_argument("graph params: mu must be >= 1");
    std::vector<std::string> warnings;
    if (static_cast<double>(c) > 0.25 * std::pow(static_cast<double>(n), 0.25))
        warnings.push_back("c exceeds n^(1/4)/4; the lower-bound regime no longer applies");
    return warnings;
}

LabelDistribution::LabelDistribution(double alpha, std::uint32_t mu) : mu_(mu) {
    if (mu < 1) throw std::invalid_argument("label distribution: mu must be >= 1");
    if (!(alpha > 1.0)) throw std::invalid_argument("label distribution: alpha must be > 1");
    pmf_.resize(mu);
    double z = 0.0;
    for (std::uint32_t k = 1; k <= mu; ++k) {
        pmf_[k - 1] = std::pow(static_cast<double>(k), -alpha);
        z += pmf_[k - 1];
    }
    cdf_.resize(mu);
    double acc = 0.0;
    mean_ = 0.0;
    for (std::uint32_t k = 1; k <= mu; ++k) {
        pmf_[k - 1] /= z;
        mean_ += k * pmf_[k - 1];
        acc += pmf_[k - 1];
        cdf_[k - 1] = acc;
    }
    cdf_[mu - 1] = 1.0;
}

std::uint32_t LabelDistribution::sample(Rng& rng) const {
    const double u = rng.next_double();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(it - cdf_.begin()) + 1;
}

double LabelDistribution::pmf(std::uint32_t k) const {
    if (k < 1 || k > mu_) return 0.0;
    return pmf_[k - 1];
}

std::uint32_t sample_label(Rng& rng, double alpha, std::uint32_t mu) {
    return LabelDistribution(alpha, mu).sample(rng);
}

double long_range_probability(std::uint32_t l_u, std::uint32_t l_v, std::uint32_t d,
                              double gamma) {
    if (d == 0) throw std::domain_error("long_range_probability: distance must be positive");
    if (l_u < 1 || l_v < 1) throw std::invalid_argument("long_range_probability: labels are >= 1");
    if (!(gamma > 0)) throw std::invalid_argument("long_range_probability: gamma must be positive");
    const double rate =
        static_cast<double>(l_u) * static_cast<double>(l_v) / (static_cast<double>(d) * gamma);
    return -std::expm1(-rate);
}

namespace {

// Number of nodes at ring distance d from a fixed node.
inline double nodes_at_distance(std::uint32_t n, std::uint32_t d) {
    return (n % 2 == 0 && d == n / 2) ? 1.0 : 2.0;
}

}  // namespace

double expected_label1_degree(std::uint32_t n, double alpha, std::uint32_t mu, double gamma) {
    const LabelDistribution labels(alpha, mu);
    const std::uint32_t dmax = n / 2;
    // d-major with compensated accumulation; the sum is a hair above 1 at
    // the root and the calibration tolerance is 1e-10.
    double sum = 0.0, comp = 0.0;
    for (std::uint32_t d = 1; d <= dmax; ++d) {
        double inner = 0.0;
        for (std::uint32_t l = 1; l <= mu; ++l)
            inner += labels.pmf(l) * -std::expm1(-static_cast<double>(l) /
                                                 (static_cast<double>(d) * gamma));
        const double term = nodes_at_distance(n, d) * inner;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double calibrate_gamma(std::uint32_t n, double alpha, std::uint32_t mu, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("calibrate_gamma: tol must be positive");
    double lo = 1e-6;
    double hi = 1e3 * mu * std::log(static_cast<double>(n));
    int doublings = 0;
    while (expected_label1_degree(n, alpha, mu, hi) > 1.0) {
        hi *= 2.0;
        if (++doublings > 200)
            throw std::runtime_error("calibrate_gamma: bracket expansion failed");
    }
    for (int iter = 0; iter < 500; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f = expected_label1_degree(n, alpha, mu, mid);
        if (std::fabs(f - 1.0) <= tol) return mid;
        if (f > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) break;
    }
    throw std::runtime_error("calibrate_gamma: bisection did not reach tolerance");
}

std::vector<std::uint32_t> sample_labels(std::uint32_t n, double alpha, std::uint32_t mu,
                                         std::uint64_t seed) {
    const LabelDistribution dist(alpha, mu);
    std::vector<std::uint32_t> labels(n);
    for (NodeId v = 0; v < n; ++v) {
        Rng rng = Rng::substream(seed, StreamKind::graph_labels, v);
        labels[v] = dist.sample(rng);
    }
    return labels;
}

namespace {

inline Edge make_edge(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }

void sort_dedup(std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

std::vector<Edge> generate_short_range(std::uint32_t n, std::uint32_t c, std::uint64_t seed) {
    std::vector<Edge> edges;
    edges.reserve(2ull * n);
    for (NodeId v = 0; v < n; ++v) {
        Rng rng = Rng::substream(seed, StreamKind::graph_short_range, v);
        const auto up = 1 + static_cast<std::uint32_t>(rng.next_below(c));
        const auto down = 1 + static_cast<std::uint32_t>(rng.next_below(c));
        edges.push_back(make_edge(v, (v + up) % n));
        edges.push_back(make_edge(v, (v + n - down) % n));
    }
    sort_dedup(edges);
    return edges;
}

std::vector<Edge> generate_long_range_exact(std::span<const std::uint32_t> labels, double gamma,
                                            std::uint64_t seed, std::uint32_t n_cap) {
    const auto n = static_cast<std::uint32_t>(labels.size());
    if (n > n_cap)
        throw std::invalid_argument(
            "generate_long_range_exact: n exceeds the quadratic-generation cap; "
            "use the poisson generator");
    Rng rng = Rng::substream(seed, StreamKind::graph_long_range, 0);
    std::vector<Edge> edges;
    // One draw per unordered pair, pair-major order (u ascending, then v).
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            const double p =
                long_range_probability(labels[u], labels[v], ring_distance(u, v, n), gamma);
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
        }
    }
    return edges;  // already sorted and unique by construction
}

namespace {

// Walker alias table for the long-range distance law (weight m(d)/d).
class AliasTable {
public:
    explicit AliasTable(const std::vector<double>& weights) {
        const std::size_t k = weights.size();
        prob_.resize(k);
        alias_.resize(k);
        double total = 0;
        for (double w : weights) total += w;
        std::vector<double> scaled(k);
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < k; ++i) {
            scaled[i] = weights[i] * static_cast<double>(k) / total;
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            const auto s = small.back();
            const auto l = large.back();
            small.pop_back();
            large.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        for (auto i : small) prob_[i] = 1.0;
        for (auto i : large) prob_[i] = 1.0;
    }

    std::uint32_t sample(Rng& rng) const {
        const auto i = static_cast<std::uint32_t>(rng.next_below(prob_.size()));
        return rng.next_double() < prob_[i] ? i : alias_[i];
    }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

}  // namespace

std::vector<Edge> generate_long_range_poisson(std::span<const std::uint32_t> labels, double gamma,
                                              std::uint64_t seed, PoissonGenStats* stats) {
    const auto n = static_cast<std::uint32_t>(labels.size());
    const std::uint32_t dmax = n / 2;
    std::uint32_t mu = 1;
    for (auto l : labels) mu = std::max(mu, l);

    // Envelope: pairs at distance d carry weight (#pairs at d)/d, where
    // #pairs is n except n/2 at the antipode of an even ring.
    std::vector<double> weights(dmax);
    double weight_sum = 0;
    for (std::uint32_t d = 1; d <= dmax; ++d) {
        const double pairs = nodes_at_distance(n, d) * static_cast<double>(n) / 2.0;
        weights[d - 1] = pairs / static_cast<double>(d);
        weight_sum += weights[d - 1];
    }
    const double mu2 = static_cast<double>(mu) * static_cast<double>(mu);
    const double envelope_rate = mu2 / gamma * weight_sum;

    AliasTable alias(weights);
    Rng rng = Rng::substream(seed, StreamKind::graph_long_range, 1);
    const std::uint64_t events = sample_poisson(rng, envelope_rate);

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(envelope_rate / mu2 * 2.0) + 16);
    for (std::uint64_t e = 0; e < events; ++e) {
        const std::uint32_t d = alias.sample(rng) + 1;
        const auto u = static_cast<NodeId>(rng.next_below(n));
        const bool forward = (rng.next() & 1) != 0;
        const NodeId v = forward ? (u + d) % n : (u + n - d) % n;
        const double accept =
            static_cast<double>(labels[u]) * static_cast<double>(labels[v]) / mu2;
        if (rng.next_double() < accept) {
            edges.push_back(make_edge(u, v));
            if (stats) ++stats->accepted;
        }
    }
    if (stats) stats->events = events;
    sort_dedup(edges);
    return edges;
}

std::uint64_t OverlayGraph::edge_count(EdgeKind kind) const {
    std::uint64_t count = 0;
    for (auto k : kinds_)
        if (k == kind) ++count;
    return count;
}

bool OverlayGraph::operator==(const OverlayGraph& other) const {
    return params_.n == other.params_.n && params_.c == other.params_.c &&
           params_.alpha == other.params_.alpha && params_.mu == other.params_.mu &&
           params_.seed == other.params_.seed && params_.generator == other.params_.generator &&
           gamma_ == other.gamma_ && labels_ == other.labels_ && edges_ == other.edges_ &&
           kinds_ == other.kinds_;
}

void OverlayGraph::build_adjacency() {
    const std::uint32_t n = params_.n;
    offsets_.assign(n + 1, 0);
    for (const auto& [u, v] : edges_) {
        ++offsets_[u + 1];
        ++offsets_[v + 1];
    }
    for (std::uint32_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adj_.resize(edges_.size() * 2);
    std::vector<std::uint32_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges_) {
        adj_[cursor[u]++] = v;
        adj_[cursor[v]++] = u;
    }
    for (std::uint32_t v = 0; v < n; ++v)
        std::sort(adj_.begin() + offsets_[v], adj_.begin() + offsets_[v + 1]);
}

void OverlayGraph::check_edge_invariants() const {
    const std::uint32_t n = params_.n;
    if (labels_.size() != n) throw std::invalid_argument("graph invariant: labels size mismatch");
    for (NodeId v = 0; v < n; ++v)
        if (labels_[v] < 1 || labels_[v] > params_.mu)
            throw std::invalid_argument("graph invariant: label out of range at node " +
                                        std::to_string(v));
    if (kinds_.size() != edges_.size())
        throw std::invalid_argument("graph invariant: edge kind array size mismatch");
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& [u, v] = edges_[i];
        if (u >= n || v >= n)
            throw std::invalid_argument("graph invariant: edge endpoint out of range");
        if (u >= v)
            throw std::invalid_argument(
                "graph invariant: asymmetric adjacency: edge (" + std::to_string(u) + "," +
                std::to_string(v) + ") is not listed in canonical u < v order");
        if (i > 0 && !(edges_[i - 1] < edges_[i]))
            throw std::invalid_argument("graph invariant: edges not sorted or duplicated");
    }
}

void OverlayGraph::check_structure_invariants() const {
    const std::uint32_t n = params_.n;
    // Short-range guarantee: a neighbour within c in each ring direction.
    for (NodeId v = 0; v < n; ++v) {
        bool up = false, down = false;
        for (NodeId w : neighbors(v)) {
            const std::uint32_t fwd = (w + n - v) % n;
            if (fwd >= 1 && fwd <= params_.c) up = true;
            const std::uint32_t back = (v + n - w) % n;
            if (back >= 1 && back <= params_.c) down = true;
        }
        if (!up || !down)
            throw std::invalid_argument(
                "graph invariant: node " + std::to_string(v) +
                " lacks a short-range neighbour within c in each direction");
    }
}

OverlayGraph OverlayGraph::from_parts(GraphParams params, double gamma,
                                      std::vector<std::uint32_t> labels, std::vector<Edge> edges,
                                      std::vector<EdgeKind> kinds, bool validate) {
    OverlayGraph g;
    g.params_ = params;
    g.gamma_ = gamma;
    g.labels_ = std::move(labels);
    g.edges_ = std::move(edges);
    g.kinds_ = std::move(kinds);
    for (const auto& [u, v] : g.edges_)
        if (u >= g.params_.n || v >= g.params_.n)
            throw std::invalid_argument("graph invariant: edge endpoint out of range");
    if (validate) g.check_edge_invariants();
    g.build_adjacency();
    if (validate) g.check_structure_invariants();
    return g;
}

OverlayGraph build_graph(const GraphParams& params, double gamma) {
    params.validate();
    auto labels = sample_labels(params.n, params.alpha, params.mu, params.seed);
    auto short_edges = generate_short_range(params.n, params.c, params.seed);
    auto long_edges = params.generator == GeneratorKind::exact
                          ? generate_long_range_exact(labels, gamma, params.seed)
                          : generate_long_range_poisson(labels, gamma, params.seed);

    // Merge; a long-range edge that coincides with a short-range one
    // collapses into a single edge tagged short_range.
    struct Tagged {
        Edge e;
        EdgeKind k;
        bool operator<(const Tagged& o) const {
            return e < o.e || (e == o.e && k < o.k);
        }
    };
    std::vector<Tagged> tagged;
    tagged.reserve(short_edges.size() + long_edges.size());
    for (const auto& e : short_edges) tagged.push_back({e, EdgeKind::short_range});
    for (const auto& e : long_edges) tagged.push_back({e, EdgeKind::long_range});
    std::sort(tagged.begin(), tagged.end());

    std::vector<Edge> edges;
    std::vector<EdgeKind> kinds;
    edges.reserve(tagged.size());
    kinds.reserve(tagged.size());
    for (const auto& t : tagged) {
        if (!edges.empty() && edges.back() == t.e) continue;
        edges.push_back(t.e);
        kinds.push_back(t.k);
    }
    return OverlayGraph::from_parts(params, gamma, std::move(labels), std::move(edges),
                                    std::move(kinds));
}

OverlayGraph build_graph(const GraphParams& params) {
    params.validate();
    return build_graph(params, calibrate_gamma(params.n, params.alpha, params.mu));
}

}  // namespace sorsim
