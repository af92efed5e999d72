#pragma once

#include <cstddef>
#include <vector>

#include "g2node/grids.hpp"

namespace g2node::physics {

enum class DiffusionMechanism { Wiener, Poisson };

struct DiffusionSpec {
    DiffusionMechanism mechanism = DiffusionMechanism::Wiener;
    // Wiener: kernel is a Gaussian of variance 2*D*tau.
    double diffusivity_uev2_per_s = 1e3;
    // Poisson: compound jump kernel sum_n P(n; rate*tau) G(n * sigma^2)
    // truncated at max_jumps with the tail mass folded into the last term.
    double jump_rate_per_s = 1e3;
    double jump_sigma_uev = 20.0;
    std::size_t max_jumps = 32;

    void validate() const;
};

// p(tau, zeta): spectral correlation per photon lag on the energy grid.
// values is row-major [n_tau x n_zeta].
struct SpectralCorrelationMap {
    TauGrid tau;
    EnergyGrid zeta;
    std::vector<double> values;

    std::size_t n_tau() const { return tau.size(); }
    std::size_t n_zeta() const { return zeta.size(); }
    const double* row(std::size_t i) const { return values.data() + i * n_zeta(); }
    double* row(std::size_t i) { return values.data() + i * n_zeta(); }

    // Row symmetry about zeta=0, row maxima at zeta=0, nonnegativity.
    void validate() const;
};

// Unit-sum diffusion kernel over the zeta grid at lag tau (seconds).
// Throws NumericalError when the kernel variance exceeds (e_max/4)^2 and
// circular convolution would wrap.
std::vector<double> diffusion_kernel(const DiffusionSpec& spec, double tau_s,
                                     const EnergyGrid& grid);

// Row i = circular convolution of rho_h with the kernel at tau_i,
// rescaled so every row keeps the original rho_h mass.
SpectralCorrelationMap compose_spectral_correlation(const std::vector<double>& rho_h,
                                                    const DiffusionSpec& spec,
                                                    const TauGrid& tau_grid,
                                                    const EnergyGrid& grid);

}  // namespace g2node::physics
