#include "g2node/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "g2node/errors.hpp"
#include "g2node/rng.hpp"

namespace g2node::noise {

void NoiseSpec::validate() const {
    if (!(intensity_scale > 0.0))
        throw ConfigError("NoiseSpec: intensity_scale must be positive");
}

std::vector<double> bin_widths(const physics::TauGrid& tau) {
    const auto& v = tau.values;
    const std::size_t n = v.size();
    std::vector<double> w(n);
    // Virtual neighbors by local geometric extrapolation keep the width
    // ratio constant across a log-uniform grid, ends included.
    const double before = v[0] * v[0] / v[1];
    const double after = v[n - 1] * v[n - 1] / v[n - 2];
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = (i == 0) ? before : v[i - 1];
        const double next = (i == n - 1) ? after : v[i + 1];
        w[i] = std::sqrt(next * v[i]) - std::sqrt(v[i] * prev);
    }
    return w;
}

physics::G2Map add_shot_noise(const physics::G2Map& clean, const NoiseSpec& spec) {
    if (clean.is_noisy) throw DataError("add_shot_noise: input map is already noisy");
    spec.validate();
    const std::vector<double> widths = bin_widths(clean.tau);
    const double w_max = *std::max_element(widths.begin(), widths.end());

    physics::G2Map out = clean;
    out.is_noisy = true;
    for (std::size_t i = 0; i < clean.n_tau(); ++i) {
        const double gain = spec.intensity_scale * widths[i] / w_max;
        double* r = out.row(i);
        for (std::size_t j = 0; j < clean.n_t(); ++j) {
            const double rate = r[j] * gain;
            rng::Stream stream = rng::keyed_stream(spec.seed, i, j);
            r[j] = static_cast<double>(rng::poisson(stream, rate)) / gain;
        }
    }
    return out;
}

std::vector<InputCurve> draw_input_slices(const physics::G2Map& map,
                                          const std::vector<std::size_t>& t_indices,
                                          double window_ps) {
    if (t_indices.empty()) throw DataError("draw_input_slices: empty index list");
    for (std::size_t k = 0; k < t_indices.size(); ++k) {
        if (t_indices[k] >= map.n_t())
            throw DataError("draw_input_slices: index " + std::to_string(t_indices[k]) +
                            " out of range (n_t = " + std::to_string(map.n_t()) + ")");
        if (k > 0 && t_indices[k] <= t_indices[k - 1])
            throw DataError("draw_input_slices: indices must be strictly increasing");
        const double tv = map.t.values[t_indices[k]];
        if (window_ps >= 0.0 && tv > window_ps)
            throw DataError("draw_input_slices: delay " + std::to_string(tv) +
                            " ps exceeds the input window of " + std::to_string(window_ps) +
                            " ps");
    }
    std::vector<InputCurve> curves(t_indices.size());
    for (std::size_t k = 0; k < t_indices.size(); ++k) {
        curves[k].t_ps = map.t.values[t_indices[k]];
        curves[k].values.resize(map.n_tau());
        for (std::size_t i = 0; i < map.n_tau(); ++i)
            curves[k].values[i] = map.row(i)[t_indices[k]];
    }
    return curves;
}

std::vector<std::size_t> default_input_indices(const physics::DelayGrid& t,
                                               std::size_t n_inputs, double window_ps) {
    if (n_inputs < 1 || n_inputs > t.size())
        throw ConfigError("default_input_indices: invalid input count");
    const double step = t.step();
    std::vector<std::size_t> indices;
    indices.reserve(n_inputs);
    indices.push_back(0);
    // Log-spaced targets from the first nonzero grid point to the window
    // edge; collisions bump to the next free index.
    const double lo = step;
    const double hi = window_ps;
    const double denom = static_cast<double>(std::max<std::size_t>(n_inputs, 3) - 2);
    for (std::size_t k = 1; k < n_inputs; ++k) {
        const double f = static_cast<double>(k - 1) / denom;
        const double target = lo * std::pow(hi / lo, f);
        std::size_t idx = static_cast<std::size_t>(std::llround(target / step));
        idx = std::min(idx, t.size() - 1);
        if (idx > 0 && t.values[idx] > window_ps) --idx;
        if (idx <= indices.back()) idx = indices.back() + 1;
        if (idx >= t.size() || t.values[idx] > window_ps)
            throw ConfigError("default_input_indices: window too dense for this delay grid");
        indices.push_back(idx);
    }
    return indices;
}

}  // namespace g2node::noise
