#include "g2node/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "g2node/errors.hpp"
#include "g2node/rng.hpp"

namespace g2node::dataset {

namespace {

void check_range(const char* name, const FieldRange& r, bool positive) {
    if (!(r.lo <= r.hi))
        throw ConfigError(std::string("ParamRanges: ") + name + " has min > max");
    if (positive && !(r.lo > 0.0))
        throw ConfigError(std::string("ParamRanges: ") + name + " must be positive");
}

std::vector<physics::PeakSpec> sample_spectrum(rng::Stream& stream, const ParamRanges& ranges,
                                               const GridParams& grids) {
    const bool sideband = stream.next_unit() < ranges.sideband_probability;
    const std::size_t count =
        1 + static_cast<std::size_t>(stream.next_below(sideband ? 2 : 3));

    // successive splittings, then recenter about zero
    std::vector<double> centers(count, 0.0);
    for (std::size_t i = 1; i < count; ++i)
        centers[i] =
            centers[i - 1] + stream.uniform(ranges.splitting_uev.lo, ranges.splitting_uev.hi);
    double mean = 0.0;
    for (const double c : centers) mean += c;
    mean /= static_cast<double>(count);

    std::vector<physics::PeakSpec> components(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto& p = components[i];
        p.kind = sideband ? physics::PeakKind::LorentzianWithSideband
                          : physics::PeakKind::Lorentzian;
        p.center_uev = centers[i] - mean;
        p.fwhm_uev = stream.log_uniform(ranges.fwhm_uev.lo, ranges.fwhm_uev.hi);
        p.amplitude = stream.uniform(ranges.amplitude.lo, ranges.amplitude.hi);
        if (sideband) {
            p.sideband_weight =
                stream.uniform(ranges.sideband_weight.lo, ranges.sideband_weight.hi);
            p.sideband_cutoff_uev =
                stream.uniform(ranges.sideband_cutoff_uev.lo, ranges.sideband_cutoff_uev.hi);
        } else {
            p.sideband_weight = 0.0;
        }
    }
    (void)grids;
    return components;
}

physics::DiffusionSpec sample_diffusion(rng::Stream& stream, const ParamRanges& ranges) {
    physics::DiffusionSpec spec;
    if (stream.next_unit() < 0.5) {
        spec.mechanism = physics::DiffusionMechanism::Wiener;
        spec.diffusivity_uev2_per_s =
            stream.log_uniform(ranges.diffusivity_uev2_per_s.lo, ranges.diffusivity_uev2_per_s.hi);
    } else {
        spec.mechanism = physics::DiffusionMechanism::Poisson;
        spec.jump_rate_per_s =
            stream.log_uniform(ranges.jump_rate_per_s.lo, ranges.jump_rate_per_s.hi);
        spec.jump_sigma_uev = stream.uniform(ranges.jump_sigma_uev.lo, ranges.jump_sigma_uev.hi);
        spec.max_jumps = 32;
    }
    return spec;
}

}  // namespace

void ParamRanges::validate() const {
    check_range("fwhm_uev", fwhm_uev, true);
    check_range("splitting_uev", splitting_uev, true);
    check_range("amplitude", amplitude, true);
    check_range("sideband_weight", sideband_weight, false);
    check_range("sideband_cutoff_uev", sideband_cutoff_uev, true);
    check_range("diffusivity_uev2_per_s", diffusivity_uev2_per_s, true);
    check_range("jump_rate_per_s", jump_rate_per_s, true);
    check_range("jump_sigma_uev", jump_sigma_uev, true);
    check_range("mix_weight", mix_weight, false);
    if (sideband_probability < 0.0 || sideband_probability > 1.0 || mix_probability < 0.0 ||
        mix_probability > 1.0)
        throw ConfigError("ParamRanges: probabilities must be within [0, 1]");
    if (mix_weight.lo < 0.0 || mix_weight.hi > 1.0)
        throw ConfigError("ParamRanges: mix_weight must be within [0, 1]");
}

SimParams sample_params(std::uint64_t seed, const ParamRanges& ranges, const GridParams& grids,
                        double kappa, double noise_intensity_scale) {
    ranges.validate();
    rng::Stream stream(seed);
    SimParams params;
    params.seed = seed;
    params.grids = grids;
    params.kappa = kappa;
    params.components = sample_spectrum(stream, ranges, grids);
    params.diffusion = sample_diffusion(stream, ranges);
    if (stream.next_unit() < ranges.mix_probability) {
        params.mix_weight = stream.uniform(ranges.mix_weight.lo, ranges.mix_weight.hi);
        MixPartner partner;
        partner.components = sample_spectrum(stream, ranges, grids);
        partner.diffusion = sample_diffusion(stream, ranges);
        params.partner.push_back(std::move(partner));
    }
    params.noise.intensity_scale = noise_intensity_scale;
    params.noise.seed = stream.next_u64();
    return params;
}

physics::G2Map mix(const physics::G2Map& a, const physics::G2Map& b, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ConfigError("mix: alpha must be in [0, 1], got " + std::to_string(alpha));
    if (a.is_noisy || b.is_noisy) throw DataError("mix: inputs must be clean maps");
    if (a.tau.values != b.tau.values || a.t.values != b.t.values)
        throw DataError("mix: grid mismatch between the two maps");
    if (a.kappa != b.kappa) throw DataError("mix: contrast mismatch between the two maps");
    physics::G2Map out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = alpha * a.values[i] + (1.0 - alpha) * b.values[i];
    return out;
}

Example make_example(const SimParams& params, const std::vector<std::size_t>& input_indices,
                     double input_window_ps) {
    const physics::SimResult main = physics::simulate(params);
    physics::G2Map clean = main.clean;
    if (params.mix_weight > 0.0 && !params.partner.empty()) {
        SimParams partner_params = params;
        partner_params.components = params.partner[0].components;
        partner_params.diffusion = params.partner[0].diffusion;
        partner_params.partner.clear();
        partner_params.mix_weight = 0.0;
        const physics::SimResult partner = physics::simulate(partner_params);
        clean = mix(partner.clean, main.clean, params.mix_weight);
    }
    const physics::G2Map noisy = noise::add_shot_noise(clean, params.noise);

    Example example;
    example.inputs = noise::draw_input_slices(noisy, input_indices, input_window_ps);
    example.target = std::move(clean);
    example.params = params;
    return example;
}

void DatasetConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("DatasetConfig: train_fraction must be in (0, 1)");
    if (n_inputs < 1) throw ConfigError("DatasetConfig: n_inputs must be >= 1");
    if (!(input_window_ps > 0.0))
        throw ConfigError("DatasetConfig: input_window_ps must be positive");
    if (!(kappa > 0.0 && kappa <= 1.0))
        throw ConfigError("DatasetConfig: kappa must be in (0, 1]");
    if (!(noise_intensity_scale > 0.0))
        throw ConfigError("DatasetConfig: noise_intensity_scale must be positive");
    train_ranges.validate();
    test_ranges.validate();
    if (n_test > 0 && test_ranges == train_ranges)
        throw ConfigError(
            "DatasetConfig: test ranges coincide with train ranges; the test split must come "
            "from a shifted parameter distribution");
}

}  // namespace g2node::dataset
