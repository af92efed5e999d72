#pragma once

#include <vector>

#include "g2node/grids.hpp"

namespace g2node::physics {

enum class PeakKind { Lorentzian, LorentzianWithSideband };

struct PeakSpec {
    PeakKind kind = PeakKind::Lorentzian;
    double center_uev = 0.0;
    double fwhm_uev = 10.0;
    double amplitude = 1.0;
    // Acoustic sideband on the high-energy flank: a_sb * x^3 * exp(-x^2)
    // with x = (w - w0)/cutoff, scaled by the peak amplitude.
    double sideband_weight = 0.3;
    double sideband_cutoff_uev = 60.0;
};

struct Spectrum {
    EnergyGrid grid;
    std::vector<double> intensity;
    std::vector<PeakSpec> components;
};

// Sum of 1-3 Lorentzian peaks (optionally with sidebands) sampled on the
// energy grid. Centers must lie strictly inside the grid.
Spectrum build_spectrum(const std::vector<PeakSpec>& components, const EnergyGrid& grid);

// Static spectral correlation rho_h(zeta) = sum_w s(w) s(w+zeta) dw on
// the same symmetric grid, with periodic wraparound. FFT-backed for
// power-of-two lengths.
std::vector<double> autocorrelate(const Spectrum& spectrum);

}  // namespace g2node::physics
