#include "g2node/grids.hpp"

#include <cmath>
#include <string>

#include "g2node/errors.hpp"

namespace g2node::physics {

EnergyGrid EnergyGrid::make(std::size_t n, double e_max) {
    if (n < 256 || n % 2 != 0)
        throw ConfigError("EnergyGrid: length must be even and >= 256, got " + std::to_string(n));
    if (!(e_max > 0.0)) throw ConfigError("EnergyGrid: e_max must be positive");
    EnergyGrid g;
    g.step = 2.0 * e_max / static_cast<double>(n);
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = (static_cast<double>(i) - static_cast<double>(n) / 2.0) * g.step;
    g.validate();
    return g;
}

void EnergyGrid::validate() const {
    const std::size_t n = values.size();
    if (n < 256 || n % 2 != 0)
        throw ConfigError("EnergyGrid: length must be even and >= 256, got " + std::to_string(n));
    for (std::size_t i = 1; i < n; ++i) {
        const double d = values[i] - values[i - 1];
        if (std::fabs(d - step) > 1e-9 * step)
            throw ConfigError("EnergyGrid: non-uniform spacing at index " + std::to_string(i));
    }
    if (std::fabs(values[n / 2]) > 1e-9 * step)
        throw ConfigError("EnergyGrid: grid is not symmetric about 0");
}

TauGrid TauGrid::make(std::size_t n) {
    if (n < 2) throw ConfigError("TauGrid: need at least 2 points");
    TauGrid g;
    g.values.resize(n);
    const double log_min = std::log(kTauMin);
    const double log_max = std::log(kTauMax);
    for (std::size_t i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        g.values[i] = std::exp(log_min + f * (log_max - log_min));
    }
    g.values.front() = kTauMin;
    g.values.back() = kTauMax;
    g.validate();
    return g;
}

void TauGrid::validate() const {
    const std::size_t n = values.size();
    if (n < 2) throw ConfigError("TauGrid: need at least 2 points");
    if (std::fabs(values.front() - kTauMin) > 1e-9 * kTauMin ||
        std::fabs(values.back() - kTauMax) > 1e-9 * kTauMax)
        throw ConfigError("TauGrid: endpoints must be 1e-7 s and 1e-1 s");
    const double ratio = std::pow(kTauMax / kTauMin, 1.0 / static_cast<double>(n - 1));
    for (std::size_t i = 1; i < n; ++i) {
        if (values[i] <= values[i - 1])
            throw ConfigError("TauGrid: values must be strictly increasing");
        const double r = values[i] / values[i - 1];
        if (std::fabs(r - ratio) > 1e-9 * ratio)
            throw ConfigError("TauGrid: spacing is not log-uniform at index " + std::to_string(i));
    }
}

DelayGrid DelayGrid::make(std::size_t n, double t_max_ps) {
    if (n < 2) throw ConfigError("DelayGrid: need at least 2 points");
    if (!(t_max_ps > 0.0)) throw ConfigError("DelayGrid: t_max must be positive");
    DelayGrid g;
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        g.values[i] = t_max_ps * static_cast<double>(i) / static_cast<double>(n - 1);
    g.values.front() = 0.0;
    g.validate();
    return g;
}

void DelayGrid::validate() const {
    const std::size_t n = values.size();
    if (n < 2) throw ConfigError("DelayGrid: need at least 2 points");
    if (values.front() != 0.0) throw ConfigError("DelayGrid: first delay must be 0");
    const double d0 = values[1] - values[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double d = values[i] - values[i - 1];
        if (std::fabs(d - d0) > 1e-9 * d0)
            throw ConfigError("DelayGrid: non-uniform spacing at index " + std::to_string(i));
    }
}

}  // namespace g2node::physics
