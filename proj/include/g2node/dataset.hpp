#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "g2node/noise.hpp"
#include "g2node/sim_params.hpp"

namespace g2node::dataset {

struct FieldRange {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const FieldRange&) const = default;
};

// Sampling ranges for one split. All recorded in the manifest so they
// are data, not code.
struct ParamRanges {
    FieldRange fwhm_uev{1.0, 50.0};             // log-uniform
    FieldRange splitting_uev{20.0, 500.0};
    FieldRange amplitude{0.2, 1.0};
    FieldRange sideband_weight{0.1, 0.5};
    FieldRange sideband_cutoff_uev{30.0, 120.0};
    FieldRange diffusivity_uev2_per_s{1e1, 1e6};  // log-uniform
    FieldRange jump_rate_per_s{1e1, 1e5};         // log-uniform
    FieldRange jump_sigma_uev{5.0, 100.0};
    double sideband_probability = 0.5;
    double mix_probability = 0.5;
    FieldRange mix_weight{0.2, 0.8};

    void validate() const;
    bool operator==(const ParamRanges&) const = default;
};

// Deterministic draw of one experiment's parameters from the ranges.
SimParams sample_params(std::uint64_t seed, const ParamRanges& ranges, const GridParams& grids,
                        double kappa, double noise_intensity_scale);

struct Example {
    std::vector<noise::InputCurve> inputs;
    physics::G2Map target;  // clean (possibly mixed) map
    std::optional<SimParams> params;
};

// alpha * a + (1 - alpha) * b; grids and contrast must agree, both clean.
physics::G2Map mix(const physics::G2Map& a, const physics::G2Map& b, double alpha);

// simulate -> mix (partner weight from params) -> shot noise on the
// inputs only -> slice the configured delays. The target stays clean.
Example make_example(const SimParams& params, const std::vector<std::size_t>& input_indices,
                     double input_window_ps);

struct DatasetConfig {
    std::size_t n_examples = 2000;  // train + validation pool
    double train_fraction = 0.9;
    std::size_t n_test = 200;
    GridParams grids;
    ParamRanges train_ranges;
    ParamRanges test_ranges;
    double kappa = 0.5;
    double noise_intensity_scale = 2e7;
    std::size_t n_inputs = 10;
    double input_window_ps = 10.0;
    std::uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency

    void validate() const;
};

enum class Split { Train, Val, Test };
const char* split_name(Split split);

struct DatasetManifest {
    std::uint32_t version = 1;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::size_t n_test = 0;
    GridParams grids;
    ParamRanges train_ranges;
    ParamRanges test_ranges;
    double kappa = 0.5;
    double noise_intensity_scale = 2e7;
    std::size_t n_inputs = 10;
    double input_window_ps = 10.0;
    std::vector<std::size_t> input_indices;
    std::uint64_t seed = 0;
    // standardization constants of (1 - g2) over the train targets
    double norm_mean = 0.0;
    double norm_scale = 1.0;
    std::int64_t created_unix = 0;

    std::size_t count(Split split) const;
    std::string to_text() const;
    static DatasetManifest from_text(const std::string& text);
};

// Generates every example (parallel over examples, one record file per
// example, per-example seeds) and writes manifest.txt last. Output bytes
// are identical for any worker count.
DatasetManifest build_dataset(const DatasetConfig& config, const std::string& out_dir);

// Streaming reader; each record is checksum-validated on access.
class DatasetReader {
public:
    explicit DatasetReader(const std::string& dir);

    const DatasetManifest& manifest() const { return manifest_; }
    std::uint64_t manifest_hash() const { return manifest_hash_; }
    std::size_t count(Split split) const { return manifest_.count(split); }
    Example read(Split split, std::size_t index) const;
    std::string record_path(Split split, std::size_t index) const;

private:
    std::string dir_;
    DatasetManifest manifest_;
    std::uint64_t manifest_hash_ = 0;
};

}  // namespace g2node::dataset
