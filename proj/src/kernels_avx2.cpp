#include "g2node/kernels.hpp"

#if defined(G2NODE_AVX2_TU)

#include <immintrin.h>

#include <cstring>

namespace g2node::kernels::avx2 {

static inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void add(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(const double* a, double alpha, double* out, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(a + i)));
    }
    for (; i < n; ++i) out[i] = alpha * a[i];
}

// Broadcast-FMA over contiguous C/B rows. The j loop is the vector axis.
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    if (!accumulate) std::memset(C, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = A + i * k;
        double* c_row = C + i * n;
        std::size_t p = 0;
        for (; p + 2 <= k; p += 2) {
            const __m256d va0 = _mm256_set1_pd(a_row[p]);
            const __m256d va1 = _mm256_set1_pd(a_row[p + 1]);
            const double* b0 = B + p * n;
            const double* b1 = B + (p + 1) * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vc = _mm256_loadu_pd(c_row + j);
                vc = _mm256_fmadd_pd(va0, _mm256_loadu_pd(b0 + j), vc);
                vc = _mm256_fmadd_pd(va1, _mm256_loadu_pd(b1 + j), vc);
                _mm256_storeu_pd(c_row + j, vc);
            }
            for (; j < n; ++j) c_row[j] += a_row[p] * b0[j] + a_row[p + 1] * b1[j];
        }
        for (; p < k; ++p) {
            const __m256d va = _mm256_set1_pd(a_row[p]);
            const double* b_row = B + p * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vc = _mm256_loadu_pd(c_row + j);
                vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(b_row + j), vc);
                _mm256_storeu_pd(c_row + j, vc);
            }
            for (; j < n; ++j) c_row[j] += a_row[p] * b_row[j];
        }
    }
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = A + i * k;
        double* c_row = C + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = dot(a_row, B + j * k, k);
            c_row[j] = accumulate ? c_row[j] + d : d;
        }
    }
}

void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    if (!accumulate) std::memset(C, 0, m * n * sizeof(double));
    for (std::size_t p = 0; p < k; ++p) {
        const double* a_row = A + p * m;
        const double* b_row = B + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d va = _mm256_set1_pd(a_row[i]);
            double* c_row = C + i * n;
            std::size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vc = _mm256_loadu_pd(c_row + j);
                vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(b_row + j), vc);
                _mm256_storeu_pd(c_row + j, vc);
            }
            for (; j < n; ++j) c_row[j] += a_row[i] * b_row[j];
        }
    }
}

}  // namespace g2node::kernels::avx2

#endif  // G2NODE_AVX2_TU
