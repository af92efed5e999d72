#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace g2node::physics::detail {

bool is_pow2(std::size_t n);

// Iterative radix-2 FFT, n must be a power of two. inverse includes the
// 1/n normalization.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

// c[m] = sum_j s[j] * s[(j+m) mod n]. FFT path for power-of-two n,
// direct sum otherwise.
std::vector<double> circular_autocorr(const std::vector<double>& s);

// out[m] = sum_j a[j] * b[(m-j) mod n]
std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace g2node::physics::detail
