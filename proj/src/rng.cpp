#include "g2node/rng.hpp"

#include <cmath>

#include "g2node/errors.hpp"

namespace g2node::rng {

double Stream::log_uniform(double lo, double hi) {
    if (lo == hi) return lo;
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

std::uint64_t Stream::next_below(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642FULL * (index + 1));
    splitmix64_next(s);
    return splitmix64_next(s);
}

Stream keyed_stream(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    std::uint64_t s = seed;
    s ^= 0x8BB84B93962EACC9ULL * (i + 1);
    splitmix64_next(s);
    s ^= 0x2D358DCCAA6C78A5ULL * (j + 1);
    splitmix64_next(s);
    return Stream(s);
}

namespace {

std::uint64_t poisson_inversion(Stream& stream, double rate) {
    // Sequential search over the CDF; fine for rate < ~30 in doubles.
    const double u = stream.next_unit();
    double p = std::exp(-rate);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && k < 1000) {
        ++k;
        p *= rate / static_cast<double>(k);
        cdf += p;
    }
    return k;
}

// PTRS transformed rejection (Hörmann 1993), exact for rate >= 10.
std::uint64_t poisson_ptrs(Stream& stream, double rate) {
    const double slam = std::sqrt(rate);
    const double loglam = std::log(rate);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = stream.next_unit() - 0.5;
        const double v = stream.next_unit();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + rate + 0.43);
        if (kf < 0.0) continue;
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (us < 0.013 && v > us) continue;
        const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
        const double rhs = kf * loglam - rate - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
}

}  // namespace

std::uint64_t poisson(Stream& stream, double rate) {
    if (!(rate >= 0.0)) throw NumericalError("poisson: rate must be nonnegative");
    if (rate > 9007199254740992.0)  // 2^53
        throw NumericalError("poisson: rate exceeds 2^53, sampler validity lost");
    if (rate == 0.0) return 0;
    if (rate < 30.0) return poisson_inversion(stream, rate);
    return poisson_ptrs(stream, rate);
}

}  // namespace g2node::rng
