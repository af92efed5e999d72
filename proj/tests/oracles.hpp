#pragma once

// Independent test oracles: brute-force implementations kept free of the
// library's FFT/GEMM code paths so they can arbitrate them.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracles {

// c[m] = sum_j s[j] s[(j+m) mod n], O(n^2).
inline std::vector<double> direct_circular_autocorr(const std::vector<double>& s) {
    const std::size_t n = s.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += s[j] * s[(j + m) % n];
        c[m] = acc;
    }
    return c;
}

// out[m] = sum_j a[j] b[(m-j) mod n], O(n^2).
inline std::vector<double> direct_circular_convolve(const std::vector<double>& a,
                                                    const std::vector<double>& b) {
    const std::size_t n = a.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[(m + n - j) % n];
        out[m] = acc;
    }
    return out;
}

// FWHM of a sampled symmetric peak by linear interpolation of the
// half-maximum crossings.
inline double measure_fwhm(const std::vector<double>& y, const std::vector<double>& x) {
    std::size_t peak = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i] > y[peak]) peak = i;
    const double half = 0.5 * y[peak];
    double left = x.front(), right = x.back();
    for (std::size_t i = peak; i-- > 0;) {
        if (y[i] <= half) {
            const double f = (half - y[i]) / (y[i + 1] - y[i]);
            left = x[i] + f * (x[i + 1] - x[i]);
            break;
        }
    }
    for (std::size_t i = peak + 1; i < y.size(); ++i) {
        if (y[i] <= half) {
            const double f = (y[i - 1] - half) / (y[i - 1] - y[i]);
            right = x[i - 1] + f * (x[i] - x[i - 1]);
            break;
        }
    }
    return right - left;
}

// Discrete second moment sum_i x_i^2 p_i of a unit-mass kernel.
inline double second_moment(const std::vector<double>& p, const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) acc += x[i] * x[i] * p[i];
    return acc;
}

// Real part of the unnormalized DFT along the first axis of a column:
// out[k] = sum_n cos(2 pi k n / N) v[n], O(N^2).
inline std::vector<double> direct_real_dft(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> out(n, 0.0);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += std::cos(two_pi * static_cast<double>(k) * static_cast<double>(j) /
                            static_cast<double>(n)) *
                   v[j];
        out[k] = acc;
    }
    return out;
}

// Trapezoid quadrature of f over [a, b] with n panels.
template <typename F>
double trapezoid(F f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double acc = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) acc += f(a + h * static_cast<double>(i));
    return acc * h;
}

// Central finite difference of a scalar function of one coordinate.
template <typename F>
double central_difference(F f, double* slot, double eps = 1e-5) {
    const double saved = *slot;
    *slot = saved + eps;
    const double up = f();
    *slot = saved - eps;
    const double down = f();
    *slot = saved;
    return (up - down) / (2.0 * eps);
}

}  // namespace oracles
