#pragma once

#include <cstdint>

namespace g2node::rng {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic pseudo-random stream (splitmix64 sequence).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    double log_uniform(double lo, double hi);

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n);

private:
    std::uint64_t state_;
};

// Derive a child seed from (seed, index); used for per-example streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Counter-based stream keyed by (seed, i, j). Draws for a given key are
// identical no matter which order bins are visited, so parallel noise
// generation is bit-reproducible.
Stream keyed_stream(std::uint64_t seed, std::uint64_t i, std::uint64_t j);

// Exact Poisson sampler: CDF inversion for small rates, PTRS
// transformed rejection above. Throws NumericalError for rates
// beyond 2^53 where the integer arithmetic stops being exact.
std::uint64_t poisson(Stream& stream, double rate);

}  // namespace g2node::rng
