#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "g2node/g2map.hpp"

namespace g2node::noise {

struct NoiseSpec {
    // Expected counts per unit relative bin width; the noisiest (first)
    // tau bin gets rate ~ intensity_scale * w_first / w_max.
    double intensity_scale = 2e7;
    std::uint64_t seed = 0;

    void validate() const;
};

// Geometric-midpoint bin widths w_i = sqrt(t_{i+1} t_i) - sqrt(t_i t_{i-1})
// with geometric extrapolation at both ends. Positive and increasing on a
// log grid.
std::vector<double> bin_widths(const physics::TauGrid& tau);

// Poisson shot noise: rate_ij = v_ij * scale * w_i / w_max, sampled with a
// per-bin keyed stream and rescaled back. Pure function of (map, spec).
physics::G2Map add_shot_noise(const physics::G2Map& clean, const NoiseSpec& spec);

struct InputCurve {
    double t_ps = 0.0;
    std::vector<double> values;  // over tau
};

// Extract the measured-input curves at the given delay indices (strictly
// increasing). When window_ps >= 0, delays beyond it are rejected.
std::vector<InputCurve> draw_input_slices(const physics::G2Map& map,
                                          const std::vector<std::size_t>& t_indices,
                                          double window_ps = -1.0);

// Default input placement: the n_inputs grid points closest to log-spaced
// targets in [0, window_ps], always including t = 0, bumped forward where
// targets collide.
std::vector<std::size_t> default_input_indices(const physics::DelayGrid& t,
                                               std::size_t n_inputs, double window_ps);

}  // namespace g2node::noise
