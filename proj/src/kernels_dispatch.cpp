#include "g2node/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "g2node/cpu_features.hpp"

namespace g2node::kernels {

namespace {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*add)(const double*, const double*, double*, std::size_t);
    void (*sub)(const double*, const double*, double*, std::size_t);
    void (*mul)(const double*, const double*, double*, std::size_t);
    void (*scale)(const double*, double, double*, std::size_t);
    void (*gemm_nn)(std::size_t, std::size_t, std::size_t, const double*, const double*, double*, bool);
    void (*gemm_nt)(std::size_t, std::size_t, std::size_t, const double*, const double*, double*, bool);
    void (*gemm_tn)(std::size_t, std::size_t, std::size_t, const double*, const double*, double*, bool);
};

constexpr KernelTable kScalarTable = {
    scalar::dot, scalar::axpy, scalar::add, scalar::sub, scalar::mul, scalar::scale,
    scalar::gemm_nn, scalar::gemm_nt, scalar::gemm_tn,
};

#if defined(G2NODE_AVX2_TU)
constexpr KernelTable kAvx2Table = {
    avx2::dot, avx2::axpy, avx2::add, avx2::sub, avx2::mul, avx2::scale,
    avx2::gemm_nn, avx2::gemm_nt, avx2::gemm_tn,
};
#endif

bool avx2_available() {
#if defined(G2NODE_AVX2_TU)
    const auto& f = CpuFeatures::get();
    return f.avx2 && f.fma;
#else
    return false;
#endif
}

Backend detect_backend() {
    if (const char* env = std::getenv("G2NODE_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_available())
                throw std::runtime_error("G2NODE_KERNELS=avx2 but AVX2+FMA is not available");
            return Backend::Avx2;
        }
        throw std::runtime_error(std::string("unknown G2NODE_KERNELS value: ") + env);
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

struct State {
    Backend backend = detect_backend();
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

State& state() {
    static State s;
    return s;
}

const KernelTable& table() {
#if defined(G2NODE_AVX2_TU)
    if (state().backend == Backend::Avx2) return kAvx2Table;
#endif
    return kScalarTable;
}

// Persistent fork-join pool for GEMM row blocks. Each worker owns a
// slot that a job is handed to explicitly, and run() joins on every
// slot, so the job can never be touched outside run()'s lifetime.
// Scheduling only decides who computes a block; every block is one
// self-contained kernel call, so results are partition-invariant.
class Pool {
public:
    static Pool& get() {
        static Pool pool;
        return pool;
    }

    // fn(block) for block in [0, blocks); the caller participates.
    // Concurrent callers (e.g. dataset-generation workers) fall back to
    // running their blocks inline.
    void run(int blocks, const std::function<void(int)>& fn) {
        if (busy_.test_and_set(std::memory_order_acquire)) {
            for (int b = 0; b < blocks; ++b) fn(b);
            return;
        }
        ensure_workers(blocks - 1);
        blocks_ = blocks;
        next_.store(0, std::memory_order_relaxed);
        for (auto& s : slots_) {
            std::unique_lock lock(s->m);
            s->job = &fn;
            s->done = false;
            s->cv.notify_one();
        }
        steal_loop(fn);
        for (auto& s : slots_) {
            std::unique_lock lock(s->m);
            s->cv.wait(lock, [&] { return s->done; });
        }
        busy_.clear(std::memory_order_release);
    }

private:
    struct Slot {
        std::mutex m;
        std::condition_variable cv;
        const std::function<void(int)>* job = nullptr;
        bool done = true;
        bool stop = false;
    };

    void ensure_workers(int n) {
        while (static_cast<int>(workers_.size()) < n) {
            slots_.push_back(std::make_unique<Slot>());
            Slot* slot = slots_.back().get();
            workers_.emplace_back([this, slot] { worker_loop(*slot); });
        }
    }

    void steal_loop(const std::function<void(int)>& fn) {
        for (;;) {
            const int b = next_.fetch_add(1, std::memory_order_relaxed);
            if (b >= blocks_) break;
            fn(b);
        }
    }

    void worker_loop(Slot& slot) {
        for (;;) {
            const std::function<void(int)>* job = nullptr;
            {
                std::unique_lock lock(slot.m);
                slot.cv.wait(lock, [&] { return slot.stop || slot.job != nullptr; });
                if (slot.stop) return;
                job = slot.job;
                slot.job = nullptr;
            }
            steal_loop(*job);
            std::unique_lock lock(slot.m);
            slot.done = true;
            slot.cv.notify_all();
        }
    }

    ~Pool() {
        for (auto& s : slots_) {
            std::unique_lock lock(s->m);
            s->stop = true;
            s->cv.notify_one();
        }
        for (auto& w : workers_) w.join();
    }

    std::vector<std::thread> workers_;
    std::vector<std::unique_ptr<Slot>> slots_;
    std::atomic<int> next_{0};
    int blocks_ = 0;
    std::atomic_flag busy_ = ATOMIC_FLAG_INIT;
};

constexpr std::size_t kParallelFlopThreshold = 1u << 21;

template <typename GemmFn>
void gemm_rows_parallel(GemmFn fn, std::size_t m, std::size_t n, std::size_t k,
                        const double* A, const double* B, double* C, bool accumulate) {
    const std::size_t flops = 2 * m * n * k;
    const int want = std::min<int>(state().threads, static_cast<int>(m));
    if (want <= 1 || flops < kParallelFlopThreshold) {
        fn(m, n, k, A, B, C, accumulate);
        return;
    }
    // Fixed blocks: each output row is produced by exactly one gemm call
    // over a contiguous row range, so the result is partition-invariant.
    const std::size_t per = (m + want - 1) / want;
    const int blocks = static_cast<int>((m + per - 1) / per);
    Pool::get().run(blocks, [&](int b) {
        const std::size_t r0 = static_cast<std::size_t>(b) * per;
        const std::size_t r1 = std::min(m, r0 + per);
        if (r0 >= r1) return;
        fn(r1 - r0, n, k, A + r0 * k, B, C + r0 * n, accumulate);
    });
}

}  // namespace

Backend active_backend() { return state().backend; }

const char* backend_name() {
    return state().backend == Backend::Avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available())
        throw std::runtime_error("AVX2 backend unavailable on this CPU/build");
    state().backend = b;
}

int max_threads() { return state().threads; }

void set_max_threads(int n) { state().threads = std::max(1, n); }

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { table().axpy(alpha, x, y, n); }
void add(const double* a, const double* b, double* out, std::size_t n) { table().add(a, b, out, n); }
void sub(const double* a, const double* b, double* out, std::size_t n) { table().sub(a, b, out, n); }
void mul(const double* a, const double* b, double* out, std::size_t n) { table().mul(a, b, out, n); }
void scale(const double* a, double alpha, double* out, std::size_t n) { table().scale(a, alpha, out, n); }

void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    gemm_rows_parallel(table().gemm_nn, m, n, k, A, B, C, accumulate);
}

void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    gemm_rows_parallel(table().gemm_nt, m, n, k, A, B, C, accumulate);
}

// The reduction axis is outermost here; row partitioning does not apply.
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* A, const double* B, double* C, bool accumulate) {
    table().gemm_tn(m, n, k, A, B, C, accumulate);
}

}  // namespace g2node::kernels
