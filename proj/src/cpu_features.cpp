#include "g2node/cpu_features.hpp"

namespace g2node {

static CpuFeatures detect() {
    CpuFeatures f;
#if defined(__x86_64__) || defined(_M_X64)
    f.avx2 = __builtin_cpu_supports("avx2");
    f.fma = __builtin_cpu_supports("fma");
#endif
    return f;
}

const CpuFeatures& CpuFeatures::get() {
    static const CpuFeatures features = detect();
    return features;
}

}  // namespace g2node
