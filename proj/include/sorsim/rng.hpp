#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sorsim {

// Deterministic random streams. All sampling in the library goes through
// this generator rather than <random> distributions, whose output is
// implementation-defined; equal seeds must give byte-identical artifacts
// on every platform.
//
// Stream derivation contract (documented, relied on by tests):
//   * a stream is identified by (seed, kind, index),
//   * derive_seed mixes the three words through SplitMix64,
//   * the derived seed initialises a xoshiro256** generator.
// Graph construction uses one stream per node for labels and short-range
// choices and a single sequential stream per long-range generator, so the
// exact and poisson generators see identical labels for equal seeds.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class StreamKind : std::uint64_t {
    graph_labels = 1,
    graph_short_range = 2,
    graph_long_range = 3,
    experiment_graph = 4,
    experiment_pairs = 5,
    estimator_graph = 6,
    estimator_pairs = 7,
};

inline std::uint64_t derive_seed(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t h = splitmix64_next(s);
    s ^= static_cast<std::uint64_t>(kind) * 0xd1b54a32d192ed03ULL;
    h ^= splitmix64_next(s);
    s ^= index * 0x8cb92ba72f3d8dd7ULL;
    h ^= splitmix64_next(s);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64_next(s);
    }

    static Rng substream(std::uint64_t seed, StreamKind kind, std::uint64_t index) {
        return Rng(derive_seed(seed, kind, index));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53 mantissa bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

// Exact Poisson sampling by Knuth's product method, chunked so that
// exp(-mean) stays representable for large means.
inline std::uint64_t sample_poisson(Rng& rng, double mean) {
    if (mean < 0) throw std::invalid_argument("sample_poisson: mean must be nonnegative");
    std::uint64_t total = 0;
    constexpr double chunk = 30.0;
    while (mean > chunk) {
        total += sample_poisson(rng, chunk);
        mean -= chunk;
    }
    const double limit = std::exp(-mean);
    double prod = rng.next_double();
    while (prod >= limit) {
        ++total;
        prod *= rng.next_double();
    }
    return total;
}

}  // namespace sorsim
