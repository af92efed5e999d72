#pragma once

#include <cstddef>
#include <vector>

namespace g2node::physics {

// Symmetric energy axis in µeV: values[i] = -e_max + i*step with
// step = 2*e_max/n, so the grid is periodic, contains 0 at n/2 and
// excludes +e_max. Even length >= 256.
struct EnergyGrid {
    std::vector<double> values;
    double step = 0.0;

    static EnergyGrid make(std::size_t n, double e_max);

    double e_max() const { return -values.front(); }
    std::size_t size() const { return values.size(); }

    void validate() const;
};

// Logarithmic photon-lag axis in seconds, 1e-7 .. 1e-1.
struct TauGrid {
    std::vector<double> values;

    static constexpr double kTauMin = 1e-7;
    static constexpr double kTauMax = 1e-1;

    static TauGrid make(std::size_t n);

    std::size_t size() const { return values.size(); }

    void validate() const;
};

// Uniform optical-delay axis in ps starting at 0.
struct DelayGrid {
    std::vector<double> values;

    static DelayGrid make(std::size_t n, double t_max_ps);

    double step() const { return values.size() > 1 ? values[1] - values[0] : 0.0; }
    std::size_t size() const { return values.size(); }

    void validate() const;
};

}  // namespace g2node::physics
