#pragma once

namespace g2node {

struct CpuFeatures {
    bool avx2 = false;
    bool fma = false;

    static const CpuFeatures& get();
};

}  // namespace g2node
