#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "g2node/errors.hpp"
#include "g2node/g2map.hpp"
#include "g2node/kernels.hpp"
#include "g2node/sim_params.hpp"
#include "g2node/units.hpp"

namespace g2node::physics {

void G2Map::validate_clean() const {
    if (is_noisy) throw DataError("G2Map: expected a clean map");
    const double lo = 1.0 - kappa;
    for (std::size_t i = 0; i < n_tau(); ++i) {
        const double* r = row(i);
        if (std::fabs(r[0] - lo) > 1e-9)
            throw NumericalError("G2Map: row " + std::to_string(i) +
                                 " does not reach full contrast at t=0");
        for (std::size_t j = 0; j < n_t(); ++j) {
            if (r[j] < lo - 1e-9 || r[j] > 1.0 + 1e-9)
                throw NumericalError("G2Map: value " + std::to_string(r[j]) + " at (" +
                                     std::to_string(i) + "," + std::to_string(j) +
                                     ") outside [1-kappa, 1]");
        }
    }
}

std::vector<double> interferogram(const SpectralCorrelationMap& p, const DelayGrid& t) {
    const std::size_t n_tau = p.n_tau();
    const std::size_t n_zeta = p.n_zeta();
    const std::size_t n_t = t.size();
    t.validate();
    const double alias_period = 2.0 * std::numbers::pi * kHbarMicroEvPs / p.zeta.step;
    if (t.values.back() >= alias_period)
        throw ConfigError("interferogram: delay " + std::to_string(t.values.back()) +
                          " ps is at or beyond the resolvable range " +
                          std::to_string(alias_period) + " ps of this energy grid");

    // cosine_weights[z, j] = cos(zeta_z t_j / hbar) * dzeta
    std::vector<double> cosine_weights(n_zeta * n_t);
    for (std::size_t z = 0; z < n_zeta; ++z) {
        const double zeta = p.zeta.values[z];
        double* row = cosine_weights.data() + z * n_t;
        for (std::size_t j = 0; j < n_t; ++j)
            row[j] = std::cos(zeta * t.values[j] / kHbarMicroEvPs) * p.zeta.step;
    }

    std::vector<double> out(n_tau * n_t);
    kernels::gemm_nn(n_tau, n_t, n_zeta, p.values.data(), cosine_weights.data(), out.data(),
                     false);
    for (std::size_t i = 0; i < n_tau; ++i) {
        double* r = out.data() + i * n_t;
        const double at_zero = r[0];
        if (!(at_zero > 0.0))
            throw NumericalError("interferogram: nonpositive row mass at tau index " +
                                 std::to_string(i));
        // Off-node delays can dip ~1e-4 negative when spectral tails reach
        // the grid edge; physical contrast is nonnegative, and node-aligned
        // delays are exact, so clip from below only.
        for (std::size_t j = 0; j < n_t; ++j) r[j] = std::max(r[j] / at_zero, 0.0);
    }
    return out;
}

G2Map g2_from_interferogram(const std::vector<double>& interferogram_rows, const TauGrid& tau,
                            const DelayGrid& t, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw ConfigError("g2_from_interferogram: kappa must be in [0, 1], got " +
                          std::to_string(kappa));
    if (interferogram_rows.size() != tau.size() * t.size())
        throw DataError("g2_from_interferogram: interferogram size mismatch");
    G2Map map;
    map.tau = tau;
    map.t = t;
    map.kappa = kappa;
    map.is_noisy = false;
    map.values.resize(interferogram_rows.size());
    for (std::size_t i = 0; i < interferogram_rows.size(); ++i)
        map.values[i] = 1.0 - kappa * interferogram_rows[i];
    return map;
}

SimResult simulate(const SimParams& params) {
    const EnergyGrid zeta = EnergyGrid::make(params.grids.n_zeta, params.grids.e_max_uev);
    const TauGrid tau = TauGrid::make(params.grids.n_tau);
    const DelayGrid t = DelayGrid::make(params.grids.n_t, params.grids.t_max_ps);

    const Spectrum spectrum = build_spectrum(params.components, zeta);
    const std::vector<double> rho_h = autocorrelate(spectrum);
    SimResult result;
    result.p = compose_spectral_correlation(rho_h, params.diffusion, tau, zeta);
    const std::vector<double> interf = interferogram(result.p, t);
    result.clean = g2_from_interferogram(interf, tau, t, params.kappa);
    return result;
}

}  // namespace g2node::physics
