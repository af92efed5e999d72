#include "g2node/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "g2node/errors.hpp"

namespace g2node::physics {

void DiffusionSpec::validate() const {
    if (mechanism == DiffusionMechanism::Wiener) {
        if (!(diffusivity_uev2_per_s > 0.0))
            throw ConfigError("DiffusionSpec: wiener diffusivity must be positive");
    } else {
        if (!(jump_rate_per_s > 0.0))
            throw ConfigError("DiffusionSpec: poisson jump rate must be positive");
        if (!(jump_sigma_uev > 0.0))
            throw ConfigError("DiffusionSpec: poisson jump width must be positive");
        if (max_jumps < 1) throw ConfigError("DiffusionSpec: max_jumps must be >= 1");
    }
}

void SpectralCorrelationMap::validate() const {
    const std::size_t nz = n_zeta();
    const std::size_t center = nz / 2;
    for (std::size_t i = 0; i < n_tau(); ++i) {
        const double* r = row(i);
        const double peak = r[center];
        for (std::size_t z = 0; z < nz; ++z) {
            if (r[z] < 0.0)
                throw NumericalError("SpectralCorrelationMap: negative value in row " +
                                     std::to_string(i));
            if (r[z] > peak * (1.0 + 1e-12))
                throw NumericalError("SpectralCorrelationMap: row " + std::to_string(i) +
                                     " maximum is not at zeta=0");
        }
        for (std::size_t z = 1; z < nz; ++z) {
            if (std::fabs(r[z] - r[nz - z]) > 1e-10 * peak)
                throw NumericalError("SpectralCorrelationMap: row " + std::to_string(i) +
                                     " is not symmetric about zeta=0");
        }
    }
}

namespace {

// Discrete unit-mass Gaussian centered on the zeta=0 bin.
std::vector<double> sampled_gaussian(double variance, const EnergyGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<double> g(n, 0.0);
    const std::size_t center = n / 2;
    if (variance <= 0.0) {
        g[center] = 1.0;
        return g;
    }
    double mass = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
        const double x = grid.values[z];
        g[z] = std::exp(-x * x / (2.0 * variance));
        mass += g[z];
    }
    if (mass <= 0.0) {
        // Width far below the grid step: all mass lands in the center bin.
        g[center] = 1.0;
        return g;
    }
    for (auto& v : g) v /= mass;
    return g;
}

double poisson_pmf_iterate(double mean, std::size_t n, double prev) {
    return prev * mean / static_cast<double>(n);
}

}  // namespace

std::vector<double> diffusion_kernel(const DiffusionSpec& spec, double tau_s,
                                     const EnergyGrid& grid) {
    if (!(tau_s > 0.0)) throw ConfigError("diffusion_kernel: tau must be positive");
    spec.validate();
    const std::size_t n = grid.size();
    const double guard = grid.e_max() / 4.0;

    if (spec.mechanism == DiffusionMechanism::Wiener) {
        const double variance = 2.0 * spec.diffusivity_uev2_per_s * tau_s;
        if (variance > guard * guard)
            throw NumericalError(
                "diffusion_kernel: wiener variance " + std::to_string(variance) +
                " ueV^2 exceeds (e_max/4)^2; kernel would wrap under circular convolution");
        return sampled_gaussian(variance, grid);
    }

    // Compound Poisson: n jumps of width sigma compose to a Gaussian of
    // variance n*sigma^2; fold the truncated tail into the last term.
    const double mean_jumps = spec.jump_rate_per_s * tau_s;
    const std::size_t nmax = spec.max_jumps;
    std::vector<double> weights(nmax + 1, 0.0);
    if (mean_jumps < 700.0) {
        double p = std::exp(-mean_jumps);
        double total = p;
        weights[0] = p;
        for (std::size_t j = 1; j <= nmax; ++j) {
            p = poisson_pmf_iterate(mean_jumps, j, p);
            weights[j] = p;
            total += p;
        }
        weights[nmax] += 1.0 - total;
    } else {
        // Mean far beyond the truncation order: everything folds into the
        // last (saturated) term.
        weights[nmax] = 1.0;
    }

    const double sigma2 = spec.jump_sigma_uev * spec.jump_sigma_uev;
    double variance = 0.0;
    for (std::size_t j = 0; j <= nmax; ++j) variance += weights[j] * static_cast<double>(j) * sigma2;
    if (variance > guard * guard)
        throw NumericalError(
            "diffusion_kernel: poisson kernel variance " + std::to_string(variance) +
            " ueV^2 exceeds (e_max/4)^2; kernel would wrap under circular convolution");

    std::vector<double> kernel(n, 0.0);
    kernel[n / 2] = weights[0];
    for (std::size_t j = 1; j <= nmax; ++j) {
        if (weights[j] <= 0.0) continue;
        const std::vector<double> g = sampled_gaussian(static_cast<double>(j) * sigma2, grid);
        for (std::size_t z = 0; z < n; ++z) kernel[z] += weights[j] * g[z];
    }
    double mass = 0.0;
    for (double v : kernel) mass += v;
    for (auto& v : kernel) v /= mass;
    return kernel;
}

SpectralCorrelationMap compose_spectral_correlation(const std::vector<double>& rho_h,
                                                    const DiffusionSpec& spec,
                                                    const TauGrid& tau_grid,
                                                    const EnergyGrid& grid) {
    const std::size_t n = grid.size();
    if (rho_h.size() != n)
        throw DataError("compose_spectral_correlation: rho_h length " +
                        std::to_string(rho_h.size()) + " != grid length " + std::to_string(n));
    double rho_mass = 0.0;
    for (double v : rho_h) rho_mass += v;

    SpectralCorrelationMap map;
    map.tau = tau_grid;
    map.zeta = grid;
    map.values.resize(tau_grid.size() * n);
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        std::vector<double> kernel = diffusion_kernel(spec, tau_grid.values[i], grid);
        // The convolution kernel is indexed by circular offset; re-index
        // from the symmetric grid layout (center bin = offset 0).
        std::vector<double> kernel_circ(n);
        for (std::size_t z = 0; z < n; ++z) kernel_circ[(z + n / 2) % n] = kernel[z];
        std::vector<double> row = detail::circular_convolve(rho_h, kernel_circ);
        double mass = 0.0;
        for (double v : row) mass += v;
        const double fix = rho_mass / mass;
        double* dst = map.row(i);
        // FFT roundoff can leave ~1e-16-scale negatives in the far tails.
        for (std::size_t z = 0; z < n; ++z) dst[z] = std::max(row[z] * fix, 0.0);
    }
    return map;
}

}  // namespace g2node::physics
