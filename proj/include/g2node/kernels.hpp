#pragma once

#include <cstddef>

// Dense double-precision inner loops used by the autodiff ops, the
// interferogram transforms and the optimizer. Every kernel exists as a
// scalar reference implementation and (on x86-64) an AVX2/FMA variant;
// the dispatched entry points below select the widest supported path at
// runtime. The two paths are equivalence-tested against each other.
namespace g2node::kernels {

enum class Backend { Scalar, Avx2 };

// Selected backend. Honors the G2NODE_KERNELS env var ("scalar" | "avx2")
// on first use.
Backend active_backend();
const char* backend_name();

// Test hook: pin a backend (throws if unavailable on this CPU).
void force_backend(Backend b);

// Worker threads used for large GEMMs. Partitioning is by fixed row
// blocks, so results are bit-identical for any thread count.
int max_threads();
void set_max_threads(int n);

double dot(const double* a, const double* b, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
// out = alpha * a
void scale(const double* a, double alpha, double* out, std::size_t n);

// Row-major GEMM family, C is m x n.
//   nn: C (+)= A[m x k] · B[k x n]
//   nt: C (+)= A[m x k] · B[n x k]ᵀ
//   tn: C (+)= A[k x m]ᵀ · B[k x n]
// accumulate=false overwrites C, true adds into it.
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void scale(const double* a, double alpha, double* out, std::size_t n);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
}  // namespace scalar

#if defined(G2NODE_AVX2_TU)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void add(const double* a, const double* b, double* out, std::size_t n);
void sub(const double* a, const double* b, double* out, std::size_t n);
void mul(const double* a, const double* b, double* out, std::size_t n);
void scale(const double* a, double alpha, double* out, std::size_t n);
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate);
}  // namespace avx2
#endif

}  // namespace g2node::kernels
