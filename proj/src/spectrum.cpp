#include "g2node/spectrum.hpp"

#include <cmath>
#include <string>

#include "fft.hpp"
#include "g2node/errors.hpp"

namespace g2node::physics {

Spectrum build_spectrum(const std::vector<PeakSpec>& components, const EnergyGrid& grid) {
    if (components.empty() || components.size() > 3)
        throw ConfigError("build_spectrum: need 1-3 components, got " +
                          std::to_string(components.size()));
    grid.validate();
    const double lo = grid.values.front();
    const double hi = grid.values.back();
    for (std::size_t c = 0; c < components.size(); ++c) {
        const auto& p = components[c];
        if (!(p.fwhm_uev > 0.0))
            throw ConfigError("build_spectrum: component " + std::to_string(c) +
                              " has nonpositive fwhm");
        if (!(p.center_uev > lo && p.center_uev < hi))
            throw ConfigError("build_spectrum: component " + std::to_string(c) +
                              " center " + std::to_string(p.center_uev) +
                              " ueV lies outside the energy grid");
        if (p.kind == PeakKind::LorentzianWithSideband && !(p.sideband_cutoff_uev > 0.0))
            throw ConfigError("build_spectrum: component " + std::to_string(c) +
                              " has nonpositive sideband cutoff");
    }

    Spectrum s;
    s.grid = grid;
    s.components = components;
    s.intensity.assign(grid.size(), 0.0);
    for (const auto& p : components) {
        const double hwhm = 0.5 * p.fwhm_uev;
        const double hwhm2 = hwhm * hwhm;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double d = grid.values[i] - p.center_uev;
            s.intensity[i] += p.amplitude * hwhm2 / (d * d + hwhm2);
            if (p.kind == PeakKind::LorentzianWithSideband && d > 0.0) {
                const double x = d / p.sideband_cutoff_uev;
                s.intensity[i] += p.amplitude * p.sideband_weight * x * x * x * std::exp(-x * x);
            }
        }
    }
    return s;
}

std::vector<double> autocorrelate(const Spectrum& spectrum) {
    const std::size_t n = spectrum.grid.size();
    if (spectrum.intensity.size() != n)
        throw DataError("autocorrelate: intensity/grid length mismatch");
    const std::vector<double> c = detail::circular_autocorr(spectrum.intensity);
    // Re-index from circular offsets to the symmetric zeta grid and apply
    // the integration weight so rho_h(0) matches the direct sum.
    std::vector<double> rho(n);
    for (std::size_t z = 0; z < n; ++z) {
        const std::size_t m = (z + n / 2) % n;
        rho[z] = c[m] * spectrum.grid.step;
    }
    return rho;
}

}  // namespace g2node::physics
