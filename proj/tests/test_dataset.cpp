#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "g2node/dataset.hpp"
#include "g2node/errors.hpp"
#include "g2node/rng.hpp"

using namespace g2node;
using namespace g2node::dataset;
namespace fs = std::filesystem;

namespace {

GridParams small_grids() {
    GridParams g;
    g.n_zeta = 256;
    g.e_max_uev = 1500.0;
    g.n_tau = 16;
    g.n_t = 40;
    g.t_max_ps = 65.0;
    return g;
}

ParamRanges small_test_ranges() {
    ParamRanges r;
    r.fwhm_uev = {2.0, 60.0};
    r.splitting_uev = {50.0, 550.0};
    r.diffusivity_uev2_per_s = {3e1, 1e6};
    return r;
}

DatasetConfig small_config(const std::string&) {
    DatasetConfig c;
    c.n_examples = 10;
    c.train_fraction = 0.9;
    c.n_test = 3;
    c.grids = small_grids();
    c.test_ranges = small_test_ranges();
    c.n_inputs = 6;
    c.input_window_ps = 10.0;
    c.seed = 42;
    c.workers = 2;
    // Keep diffusion mild so the 1500 ueV guard never trips in tests.
    c.train_ranges.diffusivity_uev2_per_s = {1e1, 1e5};
    c.train_ranges.jump_sigma_uev = {5.0, 60.0};
    c.test_ranges.diffusivity_uev2_per_s = {3e1, 1e5};
    c.test_ranges.jump_sigma_uev = {8.0, 60.0};
    return c;
}

std::string read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("sample_params determinism and degenerate ranges") {
    ParamRanges ranges;
    const GridParams grids = small_grids();
    const SimParams a = sample_params(7, ranges, grids, 0.5, 2e7);
    const SimParams b = sample_params(7, ranges, grids, 0.5, 2e7);
    CHECK(a.components.size() == b.components.size());
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        CHECK(a.components[i].center_uev == b.components[i].center_uev);
        CHECK(a.components[i].fwhm_uev == b.components[i].fwhm_uev);
        CHECK(a.components[i].amplitude == b.components[i].amplitude);
    }
    CHECK(a.noise.seed == b.noise.seed);
    CHECK(a.mix_weight == b.mix_weight);

    ParamRanges degenerate;
    degenerate.fwhm_uev = {10.0, 10.0};
    degenerate.splitting_uev = {100.0, 100.0};
    degenerate.amplitude = {0.5, 0.5};
    degenerate.diffusivity_uev2_per_s = {1e3, 1e3};
    degenerate.jump_rate_per_s = {1e3, 1e3};
    degenerate.jump_sigma_uev = {20.0, 20.0};
    degenerate.sideband_probability = 0.0;
    degenerate.mix_probability = 0.0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const SimParams p = sample_params(seed, degenerate, grids, 0.5, 2e7);
        for (const auto& c : p.components) {
            CHECK(c.fwhm_uev == 10.0);
            CHECK(c.amplitude == 0.5);
        }
    }
}

TEST_CASE("component counts are uniform") {
    ParamRanges ranges;
    ranges.sideband_probability = 0.0;  // plain Lorentzian type: counts on {1,2,3}
    ranges.mix_probability = 0.0;
    const GridParams grids = small_grids();
    const int draws = 10000;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < draws; ++i) {
        const SimParams p = sample_params(rng::derive_seed(555, static_cast<std::uint64_t>(i)),
                                          ranges, grids, 0.5, 2e7);
        REQUIRE(p.components.size() >= 1);
        REQUIRE(p.components.size() <= 3);
        ++counts[p.components.size()];
    }
    const double sigma = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / draws);
    for (int k = 1; k <= 3; ++k) {
        const double freq = static_cast<double>(counts[k]) / draws;
        CHECK(std::fabs(freq - 1.0 / 3.0) < 3.0 * sigma);
    }

    ranges.sideband_probability = 1.0;  // sideband type: counts on {1,2}
    int counts2[3] = {0, 0, 0};
    for (int i = 0; i < draws; ++i) {
        const SimParams p = sample_params(rng::derive_seed(777, static_cast<std::uint64_t>(i)),
                                          ranges, grids, 0.5, 2e7);
        REQUIRE(p.components.size() <= 2);
        ++counts2[p.components.size()];
    }
    const double sigma2 = std::sqrt(0.25 / draws);
    for (int k = 1; k <= 2; ++k) {
        const double freq = static_cast<double>(counts2[k]) / draws;
        CHECK(std::fabs(freq - 0.5) < 3.0 * sigma2);
    }
}

TEST_CASE("mix basics") {
    ParamRanges ranges;
    ranges.mix_probability = 0.0;
    const GridParams grids = small_grids();
    const SimParams pa = sample_params(1, ranges, grids, 0.5, 2e7);
    const SimParams pb = sample_params(2, ranges, grids, 0.5, 2e7);
    const physics::G2Map a = physics::simulate(pa).clean;
    const physics::G2Map b = physics::simulate(pb).clean;

    const physics::G2Map full = mix(a, b, 1.0);
    CHECK(full.values == a.values);
    const physics::G2Map self = mix(a, a, 0.5);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(self.values[i] == doctest::Approx(a.values[i]).epsilon(1e-15));
    const physics::G2Map half = mix(a, b, 0.37);
    for (std::size_t i = 0; i < half.values.size(); ++i) {
        CHECK(half.values[i] >= 1.0 - 0.5 - 1e-9);
        CHECK(half.values[i] <= 1.0 + 1e-9);
    }
    CHECK_THROWS_AS(mix(a, b, 1.5), ConfigError);

    SimParams pc = pb;
    pc.grids.n_t = 30;
    const physics::G2Map c = physics::simulate(pc).clean;
    CHECK_THROWS_AS(mix(a, c, 0.5), DataError);
}

TEST_CASE("make_example contracts") {
    const GridParams grids = small_grids();
    const physics::DelayGrid t_grid = physics::DelayGrid::make(grids.n_t, grids.t_max_ps);
    const auto indices = noise::default_input_indices(t_grid, 6, 10.0);

    SUBCASE("no mixing: target equals the simulated clean map") {
        ParamRanges ranges;
        ranges.mix_probability = 0.0;
        const SimParams params = sample_params(11, ranges, grids, 0.5, 2e7);
        const Example ex = make_example(params, indices, 10.0);
        const physics::G2Map clean = physics::simulate(params).clean;
        CHECK(ex.target.values == clean.values);
        CHECK_FALSE(ex.target.is_noisy);
    }

    SUBCASE("mixing changes the target but keeps bounds") {
        ParamRanges ranges;
        ranges.mix_probability = 1.0;
        const SimParams params = sample_params(13, ranges, grids, 0.5, 2e7);
        REQUIRE(params.partner.size() == 1);
        REQUIRE(params.mix_weight > 0.0);
        const Example ex = make_example(params, indices, 10.0);
        const physics::G2Map main_only = physics::simulate(params).clean;
        CHECK(ex.target.values != main_only.values);
        ex.target.validate_clean();
    }

    SUBCASE("inputs are noisy but unbiased") {
        ParamRanges ranges;
        ranges.mix_probability = 0.0;
        SimParams params = sample_params(17, ranges, grids, 0.5, 2e7);
        const Example ex = make_example(params, indices, 10.0);
        const physics::G2Map clean = physics::simulate(params).clean;
        bool any_diff = false;
        for (std::size_t k = 0; k < indices.size(); ++k)
            for (std::size_t i = 0; i < grids.n_tau; ++i)
                any_diff |= ex.inputs[k].values[i] != clean.row(i)[indices[k]];
        CHECK(any_diff);

        // Monte Carlo mean over noise seeds approaches the clean value.
        const std::size_t i = grids.n_tau / 2;
        const std::size_t j = indices[2];
        double mean = 0.0;
        const int reps = 3000;
        for (int r = 0; r < reps; ++r) {
            params.noise.seed = static_cast<std::uint64_t>(r);
            const Example e2 = make_example(params, indices, 10.0);
            mean += e2.inputs[2].values[i];
        }
        mean /= reps;
        const std::vector<double> widths = noise::bin_widths(clean.tau);
        const double gain = params.noise.intensity_scale * widths[i] / widths.back();
        const double se = std::sqrt(clean.row(i)[j] / gain / reps);
        CHECK(std::fabs(mean - clean.row(i)[j]) < 4.0 * se);
    }

    SUBCASE("fixed seed gives a bit-identical example") {
        ParamRanges ranges;
        const SimParams params = sample_params(23, ranges, grids, 0.5, 2e7);
        const Example a = make_example(params, indices, 10.0);
        const Example b = make_example(params, indices, 10.0);
        CHECK(a.target.values == b.target.values);
        for (std::size_t k = 0; k < a.inputs.size(); ++k)
            CHECK(a.inputs[k].values == b.inputs[k].values);
    }
}

TEST_CASE("dataset build, read and integrity") {
    setenv("G2NODE_CREATED_UNIX", "1700000000", 1);
    TempDir dir("g2node_ds_a");
    DatasetConfig config = small_config(dir.path.string());
    const DatasetManifest manifest = build_dataset(config, dir.path.string());

    CHECK(manifest.n_train == 9);
    CHECK(manifest.n_val == 1);
    CHECK(manifest.n_test == 3);
    CHECK(manifest.norm_scale > 0.0);

    DatasetReader reader(dir.path.string());
    CHECK(reader.count(Split::Train) == 9);
    CHECK(reader.count(Split::Val) == 1);
    CHECK(reader.count(Split::Test) == 3);

    SUBCASE("records round trip against direct generation") {
        // train example 0 corresponds to global index 0
        const SimParams params =
            sample_params(rng::derive_seed(config.seed, 0), config.train_ranges, config.grids,
                          config.kappa, config.noise_intensity_scale);
        const Example direct = make_example(params, manifest.input_indices,
                                            config.input_window_ps);
        const Example loaded = reader.read(Split::Train, 0);
        REQUIRE(loaded.inputs.size() == direct.inputs.size());
        for (std::size_t k = 0; k < loaded.inputs.size(); ++k) {
            CHECK(loaded.inputs[k].t_ps ==
                  static_cast<double>(static_cast<float>(direct.inputs[k].t_ps)));
            for (std::size_t i = 0; i < loaded.inputs[k].values.size(); ++i)
                CHECK(loaded.inputs[k].values[i] ==
                      static_cast<double>(static_cast<float>(direct.inputs[k].values[i])));
        }
        for (std::size_t i = 0; i < loaded.target.values.size(); ++i)
            CHECK(loaded.target.values[i] ==
                  static_cast<double>(static_cast<float>(direct.target.values[i])));
    }

    SUBCASE("manifest text round trips") {
        const DatasetManifest parsed = DatasetManifest::from_text(manifest.to_text());
        CHECK(parsed.to_text() == manifest.to_text());
        CHECK(parsed.train_ranges == manifest.train_ranges);
        CHECK(parsed.test_ranges == manifest.test_ranges);
        CHECK(parsed.input_indices == manifest.input_indices);
    }

    SUBCASE("corrupting a byte raises a checksum error naming the record") {
        const std::string victim = reader.record_path(Split::Val, 0);
        std::string bytes = read_bytes(victim);
        bytes[bytes.size() / 2] ^= 0x5A;
        std::ofstream out(victim, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        try {
            reader.read(Split::Val, 0);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("val record 0") != std::string::npos);
            CHECK(msg.find("checksum") != std::string::npos);
        }
    }

    SUBCASE("out-of-range index is rejected") {
        CHECK_THROWS_AS(reader.read(Split::Test, 3), DataError);
    }
}

TEST_CASE("dataset generation is worker-count invariant and seed-deterministic") {
    setenv("G2NODE_CREATED_UNIX", "1700000000", 1);
    TempDir dir1("g2node_ds_b1");
    TempDir dir2("g2node_ds_b2");
    TempDir dir3("g2node_ds_b3");
    DatasetConfig config = small_config("");
    config.n_examples = 6;
    config.n_test = 2;

    config.workers = 1;
    build_dataset(config, dir1.path.string());
    config.workers = 3;
    build_dataset(config, dir2.path.string());
    build_dataset(config, dir3.path.string());

    const auto compare_dirs = [&](const fs::path& a, const fs::path& b) {
        CHECK(read_bytes((a / "manifest.txt").string()) ==
              read_bytes((b / "manifest.txt").string()));
        for (const auto& entry : fs::directory_iterator(a / "records")) {
            const auto name = entry.path().filename();
            CHECK(read_bytes(entry.path().string()) ==
                  read_bytes((b / "records" / name).string()));
        }
        CHECK(std::distance(fs::directory_iterator(a / "records"), fs::directory_iterator{}) ==
              std::distance(fs::directory_iterator(b / "records"), fs::directory_iterator{}));
    };
    compare_dirs(dir1.path, dir2.path);
    compare_dirs(dir2.path, dir3.path);
}

TEST_CASE("split seeds are disjoint") {
    DatasetConfig config = small_config("");
    std::set<std::uint64_t> seeds;
    const std::size_t total = config.n_examples + config.n_test;
    for (std::size_t i = 0; i < total; ++i)
        CHECK(seeds.insert(rng::derive_seed(config.seed, i)).second);
}

TEST_CASE("empty dataset") {
    setenv("G2NODE_CREATED_UNIX", "1700000000", 1);
    TempDir dir("g2node_ds_empty");
    DatasetConfig config = small_config("");
    config.n_examples = 1;  // train_fraction 0.9 -> 1 train, 0 val
    config.n_test = 0;
    build_dataset(config, dir.path.string());
    DatasetReader reader(dir.path.string());
    CHECK(reader.count(Split::Val) == 0);
    CHECK(reader.count(Split::Test) == 0);
    CHECK_THROWS_AS(reader.read(Split::Val, 0), DataError);
}

TEST_CASE("identical test and train ranges are rejected") {
    DatasetConfig config = small_config("");
    config.test_ranges = config.train_ranges;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.test_ranges.fwhm_uev.hi = 60.0;  // one endpoint differs
    CHECK_NOTHROW(config.validate());
}
