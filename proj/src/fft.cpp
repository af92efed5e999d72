#include "fft.hpp"

#include <cmath>
#include <numbers>

#include "g2node/errors.hpp"

namespace g2node::physics::detail {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw NumericalError("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> u = a[i + j];
                const std::complex<double> v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv_n;
    }
}

std::vector<double> circular_autocorr(const std::vector<double>& s) {
    const std::size_t n = s.size();
    std::vector<double> out(n, 0.0);
    if (is_pow2(n)) {
        std::vector<std::complex<double>> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = s[i];
        fft_inplace(a, false);
        for (auto& x : a) x = std::norm(x);
        fft_inplace(a, true);
        for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
        return out;
    }
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += s[j] * s[(j + m) % n];
        out[m] = acc;
    }
    return out;
}

std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw NumericalError("circular_convolve: length mismatch");
    std::vector<double> out(n, 0.0);
    if (is_pow2(n)) {
        std::vector<std::complex<double>> fa(n), fb(n);
        for (std::size_t i = 0; i < n; ++i) {
            fa[i] = a[i];
            fb[i] = b[i];
        }
        fft_inplace(fa, false);
        fft_inplace(fb, false);
        for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
        fft_inplace(fa, true);
        for (std::size_t i = 0; i < n; ++i) out[i] = fa[i].real();
        return out;
    }
    for (std::size_t m = 0; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[(m - j + n) % n];
        out[m] = acc;
    }
    return out;
}

}  // namespace g2node::physics::detail
