#pragma once

#include <cstdint>
#include <vector>

#include "g2node/diffusion.hpp"
#include "g2node/noise.hpp"
#include "g2node/spectrum.hpp"

namespace g2node {

struct GridParams {
    std::size_t n_zeta = 512;
    double e_max_uev = 2400.0;
    std::size_t n_tau = 128;
    std::size_t n_t = 200;
    double t_max_ps = 65.0;
};

// Spectrum + diffusion of the optional second experiment blended in by
// the mixing augmentation; it shares grids, kappa and noise settings.
struct MixPartner {
    std::vector<physics::PeakSpec> components;
    physics::DiffusionSpec diffusion;
};

// Everything that defines one simulated experiment.
struct SimParams {
    std::vector<physics::PeakSpec> components;
    physics::DiffusionSpec diffusion;
    double kappa = 0.5;
    GridParams grids;
    noise::NoiseSpec noise;
    // Weight of the partner experiment in the mixed map; 0 = no mixing.
    double mix_weight = 0.0;
    std::vector<MixPartner> partner;  // empty or one entry
    std::uint64_t seed = 0;
};

namespace physics {

struct SimResult {
    G2Map clean;
    SpectralCorrelationMap p;
};

// Spectrum -> static correlation -> diffusion -> interferogram -> g2.
// Deterministic; no noise, no mixing.
SimResult simulate(const SimParams& params);

}  // namespace physics
}  // namespace g2node
