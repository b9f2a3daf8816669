#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "sorsim/analysis.hpp"
#include "sorsim/graph.hpp"
#include "sorsim/rng.hpp"
#include "sorsim/stats.hpp"

using namespace sorsim;

TEST_CASE("ring distance basics") {
    CHECK(ring_distance(3, 3, 10) == 0);
    CHECK(ring_distance(1, 9, 10) == 2);
    CHECK(ring_distance(0, 5, 10) == 5);
}

TEST_CASE("ring distance properties") {
    Rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        const std::uint32_t n = 4 + static_cast<std::uint32_t>(rng.next_below(1000));
        const auto u = static_cast<NodeId>(rng.next_below(n));
        const auto v = static_cast<NodeId>(rng.next_below(n));
        const auto w = static_cast<NodeId>(rng.next_below(n));
        CHECK(ring_distance(u, v, n) == ring_distance(v, u, n));
        CHECK(ring_distance(u, v, n) <= n / 2);
        CHECK((ring_distance(u, v, n) == 0) == (u == v));
        CHECK(ring_distance(u, w, n) <= ring_distance(u, v, n) + ring_distance(v, w, n));
    }
}

TEST_CASE("ball membership is an open ball") {
    const BallSpec ball{10, 3};
    CHECK(ball.contains(10, 64));
    CHECK(ball.contains(12, 64));
    CHECK_FALSE(ball.contains(13, 64));
    CHECK(ball.contains(8, 64));
    CHECK_FALSE(BallSpec{10, 0}.contains(10, 64));
}

TEST_CASE("graph params validation") {
    GraphParams p{.n = 1 << 16, .c = 2, .alpha = 2.5, .mu = 5, .seed = 1};
    CHECK(p.validate().empty());  // c below n^(1/4)/4: no warning
    p.n = 100;
    CHECK_FALSE(p.validate().empty());  // same c is above the regime at n=100
    p.n = 1 << 16;
    p.c = 1 << 14;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.c = 2;
    p.alpha = 3.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.alpha = 2.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.alpha = 2.5;
    p.mu = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.mu = 5;
    p.n = 3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    // accepted above the lower-bound regime, but flagged
    GraphParams q{.n = 256, .c = 32, .alpha = 2.5, .mu = 5, .seed = 1};
    CHECK_FALSE(q.validate().empty());

    CHECK(GraphParams::default_mu(1024) == 10);
    CHECK(GraphParams::default_mu(4) == 2);
}

TEST_CASE("label distribution pmf") {
    const LabelDistribution single(2.0, 1);
    Rng rng(7);
    for (int i = 0; i < 50; ++i) CHECK(single.sample(rng) == 1);

    const LabelDistribution two(2.0, 2);
    CHECK(two.pmf(1) == doctest::Approx(0.8));
    CHECK(two.pmf(2) == doctest::Approx(0.2));
    CHECK_THROWS_AS(LabelDistribution(2.5, 0), std::invalid_argument);
}

TEST_CASE("label sampling matches the exact pmf (chi-square)") {
    const double alpha = 2.5;
    const std::uint32_t mu = 32;
    const LabelDistribution dist(alpha, mu);
    std::vector<std::uint64_t> counts(mu, 0);
    Rng rng(20240601);
    const int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) ++counts[dist.sample(rng) - 1];

    // expected pmf by direct summation, independently of LabelDistribution
    std::vector<double> expected(mu);
    double z = 0;
    for (std::uint32_t k = 1; k <= mu; ++k) z += std::pow(k, -alpha);
    for (std::uint32_t k = 1; k <= mu; ++k) expected[k - 1] = std::pow(k, -alpha) / z;

    const auto r = stats::chi_square_test(counts, expected);
    CHECK(r.p_value > 0.01);
}

TEST_CASE("long range probability") {
    CHECK(long_range_probability(1, 1, 1, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(long_range_probability(2, 3, 10, 3.0) == doctest::Approx(1.0 - std::exp(-0.2)));
    CHECK(long_range_probability(1, 1, 1000000, 1e6) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(long_range_probability(1, 1, 0, 1.0), std::domain_error);
}

TEST_CASE("gamma calibration") {
    // F is strictly decreasing in gamma
    CHECK(expected_label1_degree(1000, 2.5, 8, 5.0) > expected_label1_degree(1000, 2.5, 8, 9.0));

    // frozen value from the independent bisection oracle
    const double gamma = calibrate_gamma(100, 2.5, 10, 1e-10);
    CHECK(gamma == doctest::Approx(13.1173853435).epsilon(1e-8));
    CHECK(std::fabs(expected_label1_degree(100, 2.5, 10, gamma) - 1.0) <= 1e-10);
}

TEST_CASE("gamma grows like log n") {
    const double g10 = calibrate_gamma(1 << 10, 2.5, GraphParams::default_mu(1 << 10));
    const double g16 = calibrate_gamma(1 << 16, 2.5, GraphParams::default_mu(1 << 16));
    const double ratio = g16 / g10;  // log-ratio is 16/10; constants shift it a bit
    CHECK(ratio > 1.2);
    CHECK(ratio < 2.0);
}

TEST_CASE("short range edges: c=1 gives exactly the ring") {
    const std::uint32_t n = 64;
    const auto edges = generate_short_range(n, 1, 99);
    REQUIRE(edges.size() == n);
    for (std::uint32_t v = 0; v < n; ++v) {
        const Edge want = v + 1 < n ? Edge{v, v + 1} : Edge{0, n - 1};
        CHECK(std::find(edges.begin(), edges.end(), want) != edges.end());
    }
}

TEST_CASE("short range edges: degree at least two and offsets within c") {
    const std::uint32_t n = 500, c = 7;
    const auto edges = generate_short_range(n, c, 5);
    std::vector<int> degree(n, 0);
    for (const auto& [u, v] : edges) {
        CHECK(ring_distance(u, v, n) <= c);
        CHECK(ring_distance(u, v, n) >= 1);
        ++degree[u];
        ++degree[v];
    }
    for (std::uint32_t v = 0; v < n; ++v) CHECK(degree[v] >= 2);
}

TEST_CASE("short range offsets are uniform on {1..c} (chi-square)") {
    // An edge at offset o exists iff either endpoint picked it, with the
    // same probability for every o, so edge offsets must be uniform.
    const std::uint32_t n = 10'000, c = 8;
    std::vector<std::uint64_t> counts(c, 0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto edges = generate_short_range(n, c, seed);
        for (const auto& [u, v] : edges) ++counts[ring_distance(u, v, n) - 1];
    }
    const std::vector<double> expected(c, 1.0 / c);
    CHECK(stats::chi_square_test(counts, expected).p_value > 0.01);
}

TEST_CASE("exact generator: vanishing rate gives an empty edge set") {
    const std::vector<std::uint32_t> labels(128, 1);
    const auto edges = generate_long_range_exact(labels, 1e15, 3);
    CHECK(edges.empty());
}

TEST_CASE("exact generator: per-pair inclusion matches the edge law") {
    // fixed pair (0, 1) at distance 1 with labels mu; 10^4 seeded runs
    const std::uint32_t n = 16, mu = 4;
    const double gamma = 20.0;
    std::vector<std::uint32_t> labels(n, 1);
    labels[0] = labels[1] = mu;
    const double p = long_range_probability(mu, mu, 1, gamma);

    std::uint64_t hits = 0;
    const std::uint64_t reps = 10'000;
    for (std::uint64_t seed = 0; seed < reps; ++seed) {
        const auto edges = generate_long_range_exact(labels, gamma, seed);
        if (std::find(edges.begin(), edges.end(), Edge{0, 1}) != edges.end()) ++hits;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(reps);
    const double z99 = 2.5758293035489004;
    CHECK(std::fabs(rate - p) <=
          z99 * std::sqrt(p * (1 - p) / static_cast<double>(reps)));
}

TEST_CASE("exact generator refuses n above the quadratic cap") {
    const std::vector<std::uint32_t> labels(1 << 16, 1);
    CHECK_THROWS_AS(generate_long_range_exact(labels, 10.0, 1), std::invalid_argument);
}

TEST_CASE("label-1 nodes have mean long-range degree 1 (exact generator)") {
    GraphParams p{.n = 2048, .c = 2, .alpha = 2.5, .mu = 11, .seed = 31,
                  .generator = GeneratorKind::exact};
    const auto report = estimate_label1_degree(p, 3000);
    REQUIRE(report.defined);
    const double se = (report.ci_hi - report.ci_lo) / 2.0 / stats::kZ95;
    CHECK(std::fabs(report.point - 1.0) <= 3.0 * se);
}

TEST_CASE("poisson generator: mu = 1 never thins") {
    const std::vector<std::uint32_t> labels(256, 1);
    PoissonGenStats st;
    generate_long_range_poisson(labels, 8.0, 11, &st);
    CHECK(st.events > 0);
    CHECK(st.accepted == st.events);
}

TEST_CASE("generator equivalence: edge lengths, degrees, edge counts") {
    const std::uint32_t n = 512, mu = 9;
    const double alpha = 2.5;
    const double gamma = calibrate_gamma(n, alpha, mu);
    const int seeds = 40;

    std::vector<double> len_exact, len_poisson, cnt_exact, cnt_poisson;
    std::vector<std::uint64_t> deg_exact(32, 0), deg_poisson(32, 0);
    for (int k = 0; k < seeds; ++k) {
        const auto labels_a = sample_labels(n, alpha, mu, 1000 + k);
        const auto ea = generate_long_range_exact(labels_a, gamma, 1000 + k);
        const auto labels_b = sample_labels(n, alpha, mu, 5000 + k);
        const auto eb = generate_long_range_poisson(labels_b, gamma, 5000 + k);
        cnt_exact.push_back(static_cast<double>(ea.size()));
        cnt_poisson.push_back(static_cast<double>(eb.size()));
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
            ++deg_exact[std::min<std::uint32_t>(da[v], 31)];
            ++deg_poisson[std::min<std::uint32_t>(db[v], 31)];
        }
    }
    CHECK(stats::ks_two_sample(len_exact, len_poisson).p_value > 0.01);
    CHECK(stats::ks_two_sample(cnt_exact, cnt_poisson).p_value > 0.01);
    CHECK(stats::chi_square_two_sample(deg_exact, deg_poisson).p_value > 0.01);
}

TEST_CASE("build_graph determinism") {
    const GraphParams p{.n = 512, .c = 3, .alpha = 2.5, .mu = 9, .seed = 77,
                        .generator = GeneratorKind::poisson};
    const auto a = build_graph(p);
    const auto b = build_graph(p);
    CHECK(a == b);

    GraphParams q = p;
    q.seed = 78;
    CHECK_FALSE(a == build_graph(q));
}

TEST_CASE("build_graph with c=1 contains the full ring") {
    const GraphParams p{.n = 1024, .c = 1, .alpha = 2.5, .mu = 10, .seed = 3};
    const auto g = build_graph(p);
    for (std::uint32_t v = 0; v < p.n; ++v) {
        const auto nb = g.neighbors(v);
        CHECK(std::find(nb.begin(), nb.end(), (v + 1) % p.n) != nb.end());
    }
}

TEST_CASE("graph invariants hold for random parameter sets") {
    Rng rng(1234);
    for (int rep = 0; rep < 8; ++rep) {
        GraphParams p;
        p.n = 64 + static_cast<std::uint32_t>(rng.next_below(512));
        p.c = 1 + static_cast<std::uint32_t>(rng.next_below(std::min(8u, p.n / 4 - 1)));
        p.alpha = 2.1 + 0.8 * rng.next_double();
        p.mu = GraphParams::default_mu(p.n);
        p.seed = rng.next();
        p.generator = rep % 2 == 0 ? GeneratorKind::exact : GeneratorKind::poisson;
        const auto g = build_graph(p);

        // symmetric, no self loops, no duplicates, neighbours sorted
        std::set<Edge> edge_set(g.edges().begin(), g.edges().end());
        CHECK(edge_set.size() == g.edges().size());
        for (std::uint32_t v = 0; v < p.n; ++v) {
            const auto nb = g.neighbors(v);
            CHECK(std::is_sorted(nb.begin(), nb.end()));
            for (NodeId w : nb) {
                CHECK(w != v);
                CHECK(edge_set.count(w < v ? Edge{w, v} : Edge{v, w}) == 1);
            }
        }
        // short-range guarantee, checked by direct scan
        for (std::uint32_t v = 0; v < p.n; ++v) {
            bool up = false, down = false;
            for (NodeId w : g.neighbors(v)) {
                const std::uint32_t fwd = (w + p.n - v) % p.n;
                if (fwd >= 1 && fwd <= p.c) up = true;
                const std::uint32_t back = (v + p.n - w) % p.n;
                if (back >= 1 && back <= p.c) down = true;
            }
            CHECK(up);
            CHECK(down);
        }
        CHECK(g.edge_count(EdgeKind::short_range) + g.edge_count(EdgeKind::long_range) ==
              g.edges().size());
    }
}
