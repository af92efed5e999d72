#include "g2node/kernels.hpp"

#include <cstring>

namespace g2node::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(const double* a, double alpha, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * a[i];
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    if (!accumulate) std::memset(C, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = A + i * k;
        double* c_row = C + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double a = a_row[p];
            const double* b_row = B + p * n;
            for (std::size_t j = 0; j < n; ++j) c_row[j] += a * b_row[j];
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
            const double a = a_row[i];
            double* c_row = C + i * n;
            for (std::size_t j = 0; j < n; ++j) c_row[j] += a * b_row[j];
        }
    }
}

}  // namespace g2node::kernels::scalar
