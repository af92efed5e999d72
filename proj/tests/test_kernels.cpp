#include "doctest.h"

#include <cmath>
#include <vector>

#include "g2node/kernels.hpp"
#include "g2node/rng.hpp"

using namespace g2node;

namespace {

std::vector<double> random_vec(rng::Stream& s, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = s.uniform(-1.0, 1.0);
    return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), 1.0});
        worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
    }
    return worst;
}

struct BackendGuard {
    kernels::Backend saved = kernels::active_backend();
    ~BackendGuard() { kernels::force_backend(saved); }
};

bool have_avx2() {
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

TEST_CASE("scalar and avx2 elementwise kernels agree") {
    if (!have_avx2()) return;
    rng::Stream s(11);
    BackendGuard guard;
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{17},
                          std::size_t{256}, std::size_t{1023}}) {
        const auto a = random_vec(s, n);
        const auto b = random_vec(s, n);
        std::vector<double> ref(n), simd(n);

        kernels::force_backend(kernels::Backend::Scalar);
        kernels::add(a.data(), b.data(), ref.data(), n);
        kernels::force_backend(kernels::Backend::Avx2);
        kernels::add(a.data(), b.data(), simd.data(), n);
        CHECK(ref == simd);

        kernels::force_backend(kernels::Backend::Scalar);
        kernels::mul(a.data(), b.data(), ref.data(), n);
        kernels::force_backend(kernels::Backend::Avx2);
        kernels::mul(a.data(), b.data(), simd.data(), n);
        CHECK(ref == simd);

        kernels::force_backend(kernels::Backend::Scalar);
        kernels::scale(a.data(), -1.7, ref.data(), n);
        kernels::force_backend(kernels::Backend::Avx2);
        kernels::scale(a.data(), -1.7, simd.data(), n);
        CHECK(ref == simd);

        std::vector<double> y0 = b, y1 = b;
        kernels::force_backend(kernels::Backend::Scalar);
        kernels::axpy(0.37, a.data(), y0.data(), n);
        kernels::force_backend(kernels::Backend::Avx2);
        kernels::axpy(0.37, a.data(), y1.data(), n);
        CHECK(max_rel_diff(y0, y1) < 1e-15);
    }
}

TEST_CASE("scalar and avx2 dot agree") {
    if (!have_avx2()) return;
    rng::Stream s(12);
    BackendGuard guard;
    for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{64}, std::size_t{500},
                          std::size_t{4096}}) {
        const auto a = random_vec(s, n);
        const auto b = random_vec(s, n);
        kernels::force_backend(kernels::Backend::Scalar);
        const double d0 = kernels::dot(a.data(), b.data(), n);
        kernels::force_backend(kernels::Backend::Avx2);
        const double d1 = kernels::dot(a.data(), b.data(), n);
        CHECK(std::fabs(d0 - d1) < 1e-12 * std::max(1.0, std::fabs(d0)));
    }
}

TEST_CASE("scalar and avx2 gemm variants agree") {
    if (!have_avx2()) return;
    rng::Stream s(13);
    BackendGuard guard;
    struct Dims {
        std::size_t m, n, k;
    };
    for (const auto dims : {Dims{1, 1, 1}, Dims{3, 5, 7}, Dims{32, 17, 64}, Dims{64, 200, 512}}) {
        const auto [m, n, k] = dims;
        const auto A = random_vec(s, m * k);
        const auto B = random_vec(s, k * n);
        const auto Bt = random_vec(s, n * k);
        const auto At = random_vec(s, k * m);
        const auto C0 = random_vec(s, m * n);

        for (bool acc : {false, true}) {
            std::vector<double> ref = C0, simd = C0;
            kernels::force_backend(kernels::Backend::Scalar);
            kernels::gemm_nn(m, n, k, A.data(), B.data(), ref.data(), acc);
            kernels::force_backend(kernels::Backend::Avx2);
            kernels::gemm_nn(m, n, k, A.data(), B.data(), simd.data(), acc);
            CHECK(max_rel_diff(ref, simd) < 1e-12);

            ref = C0;
            simd = C0;
            kernels::force_backend(kernels::Backend::Scalar);
            kernels::gemm_nt(m, n, k, A.data(), Bt.data(), ref.data(), acc);
            kernels::force_backend(kernels::Backend::Avx2);
            kernels::gemm_nt(m, n, k, A.data(), Bt.data(), simd.data(), acc);
            CHECK(max_rel_diff(ref, simd) < 1e-12);

            ref = C0;
            simd = C0;
            kernels::force_backend(kernels::Backend::Scalar);
            kernels::gemm_tn(m, n, k, At.data(), B.data(), ref.data(), acc);
            kernels::force_backend(kernels::Backend::Avx2);
            kernels::gemm_tn(m, n, k, At.data(), B.data(), simd.data(), acc);
            CHECK(max_rel_diff(ref, simd) < 1e-12);
        }
    }
}

TEST_CASE("gemm matches naive triple loop") {
    rng::Stream s(14);
    const std::size_t m = 9, n = 11, k = 13;
    const auto A = random_vec(s, m * k);
    const auto B = random_vec(s, k * n);
    std::vector<double> expected(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += A[i * k + p] * B[p * n + j];
            expected[i * n + j] = acc;
        }
    std::vector<double> got(m * n, 0.0);
    kernels::gemm_nn(m, n, k, A.data(), B.data(), got.data(), false);
    CHECK(max_rel_diff(expected, got) < 1e-13);

    // nt/tn against the same reference through explicit transposes
    std::vector<double> Bt(n * k), At(k * m);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t j = 0; j < n; ++j) Bt[j * k + p] = B[p * n + j];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) At[p * m + i] = A[i * k + p];
    std::fill(got.begin(), got.end(), 0.0);
    kernels::gemm_nt(m, n, k, A.data(), Bt.data(), got.data(), false);
    CHECK(max_rel_diff(expected, got) < 1e-13);
    std::fill(got.begin(), got.end(), 0.0);
    kernels::gemm_tn(m, n, k, At.data(), B.data(), got.data(), false);
    CHECK(max_rel_diff(expected, got) < 1e-13);
}

TEST_CASE("threaded gemm is identical to single-threaded") {
    rng::Stream s(15);
    const std::size_t m = 128, n = 96, k = 160;  // above the parallel threshold
    const auto A = random_vec(s, m * k);
    const auto B = random_vec(s, k * n);
    std::vector<double> one(m * n), many(m * n);
    const int saved = kernels::max_threads();
    kernels::set_max_threads(1);
    kernels::gemm_nn(m, n, k, A.data(), B.data(), one.data(), false);
    kernels::set_max_threads(4);
    kernels::gemm_nn(m, n, k, A.data(), B.data(), many.data(), false);
    CHECK(one == many);
    kernels::set_max_threads(1);
    kernels::gemm_nt(m, n, k, A.data(), B.data(), one.data(), false);
    kernels::set_max_threads(4);
    kernels::gemm_nt(m, n, k, A.data(), B.data(), many.data(), false);
    kernels::set_max_threads(saved);
    CHECK(one == many);
}
