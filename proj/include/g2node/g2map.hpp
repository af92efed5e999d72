#pragma once

#include <cstddef>
#include <vector>

#include "g2node/diffusion.hpp"
#include "g2node/grids.hpp"

namespace g2node::physics {

// g2(tau, t) over the photon-lag x optical-delay grid, row-major
// [n_tau x n_t].
struct G2Map {
    TauGrid tau;
    DelayGrid t;
    std::vector<double> values;
    bool is_noisy = false;
    double kappa = 0.5;

    std::size_t n_tau() const { return tau.size(); }
    std::size_t n_t() const { return t.size(); }
    const double* row(std::size_t i) const { return values.data() + i * n_t(); }
    double* row(std::size_t i) { return values.data() + i * n_t(); }

    // Clean-map bounds: 1-kappa <= v <= 1+1e-9 and v(t=0) = 1-kappa.
    void validate_clean() const;
};

// I(tau_i, t_j) = sum_z p(tau_i, z) cos(zeta_z t_j / hbar) dzeta, rows
// normalized to I(tau, 0) = 1. Delays must stay below the alias period
// 2*pi*hbar/dzeta of the discrete zeta grid.
std::vector<double> interferogram(const SpectralCorrelationMap& p, const DelayGrid& t);

// g2 = 1 - kappa * I, kappa in [0, 1].
G2Map g2_from_interferogram(const std::vector<double>& interferogram_rows,
                            const TauGrid& tau, const DelayGrid& t, double kappa);

}  // namespace g2node::physics
