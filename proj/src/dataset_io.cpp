#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "g2node/dataset.hpp"
#include "g2node/errors.hpp"
#include "g2node/fnv.hpp"
#include "g2node/rng.hpp"

namespace g2node::dataset {

namespace fs = std::filesystem;

namespace {

constexpr char kRecordMagic[4] = {'G', '2', 'E', '1'};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
void put(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& off, const std::string& context) {
    if (off + sizeof(T) > buf.size()) throw DataError(context + ": truncated record");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

std::string encode_record(const Example& example) {
    const std::uint32_t n_tau = static_cast<std::uint32_t>(example.target.n_tau());
    const std::uint32_t n_t = static_cast<std::uint32_t>(example.target.n_t());
    const std::uint32_t n_inputs = static_cast<std::uint32_t>(example.inputs.size());
    std::string buf;
    buf.append(kRecordMagic, 4);
    put(buf, n_tau);
    put(buf, n_t);
    put(buf, n_inputs);
    for (const auto& curve : example.inputs) put(buf, static_cast<float>(curve.t_ps));
    for (const auto& curve : example.inputs) {
        if (curve.values.size() != n_tau)
            throw DataError("encode_record: input curve length mismatch");
        for (const double v : curve.values) put(buf, static_cast<float>(v));
    }
    for (const double v : example.target.values) put(buf, static_cast<float>(v));
    put(buf, fnv1a(buf.data(), buf.size()));
    return buf;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

const char* split_name(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

std::size_t DatasetManifest::count(Split split) const {
    switch (split) {
        case Split::Train: return n_train;
        case Split::Val: return n_val;
        case Split::Test: return n_test;
    }
    return 0;
}

namespace {

void put_ranges(std::ostringstream& out, const std::string& prefix, const ParamRanges& r) {
    const auto field = [&](const char* name, const FieldRange& f) {
        out << prefix << '.' << name << ": " << fmt_double(f.lo) << ' ' << fmt_double(f.hi)
            << '\n';
    };
    field("fwhm_uev", r.fwhm_uev);
    field("splitting_uev", r.splitting_uev);
    field("amplitude", r.amplitude);
    field("sideband_weight", r.sideband_weight);
    field("sideband_cutoff_uev", r.sideband_cutoff_uev);
    field("diffusivity_uev2_per_s", r.diffusivity_uev2_per_s);
    field("jump_rate_per_s", r.jump_rate_per_s);
    field("jump_sigma_uev", r.jump_sigma_uev);
    out << prefix << ".sideband_probability: " << fmt_double(r.sideband_probability) << '\n';
    out << prefix << ".mix_probability: " << fmt_double(r.mix_probability) << '\n';
    out << prefix << ".mix_weight: " << fmt_double(r.mix_weight.lo) << ' '
        << fmt_double(r.mix_weight.hi) << '\n';
}

class KvParser {
public:
    explicit KvParser(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            const auto colon = line.find(": ");
            if (colon == std::string::npos)
                throw DataError("manifest: malformed line '" + line + "'");
            kv_[line.substr(0, colon)] = line.substr(colon + 2);
        }
    }

    const std::string& str(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw DataError("manifest: missing key '" + key + "'");
        return it->second;
    }
    double num(const std::string& key) const { return std::strtod(str(key).c_str(), nullptr); }
    std::uint64_t u64(const std::string& key) const {
        return std::strtoull(str(key).c_str(), nullptr, 10);
    }
    FieldRange range(const std::string& key) const {
        std::istringstream in(str(key));
        FieldRange r;
        if (!(in >> r.lo >> r.hi)) throw DataError("manifest: malformed range '" + key + "'");
        return r;
    }

private:
    std::map<std::string, std::string> kv_;
};

ParamRanges take_ranges(const KvParser& kv, const std::string& prefix) {
    ParamRanges r;
    r.fwhm_uev = kv.range(prefix + ".fwhm_uev");
    r.splitting_uev = kv.range(prefix + ".splitting_uev");
    r.amplitude = kv.range(prefix + ".amplitude");
    r.sideband_weight = kv.range(prefix + ".sideband_weight");
    r.sideband_cutoff_uev = kv.range(prefix + ".sideband_cutoff_uev");
    r.diffusivity_uev2_per_s = kv.range(prefix + ".diffusivity_uev2_per_s");
    r.jump_rate_per_s = kv.range(prefix + ".jump_rate_per_s");
    r.jump_sigma_uev = kv.range(prefix + ".jump_sigma_uev");
    r.sideband_probability = kv.num(prefix + ".sideband_probability");
    r.mix_probability = kv.num(prefix + ".mix_probability");
    r.mix_weight = kv.range(prefix + ".mix_weight");
    return r;
}

}  // namespace

std::string DatasetManifest::to_text() const {
    std::ostringstream out;
    out << "format: g2node-dataset\n";
    out << "version: " << version << '\n';
    out << "created_unix: " << created_unix << '\n';
    out << "seed: " << seed << '\n';
    out << "n_train: " << n_train << '\n';
    out << "n_val: " << n_val << '\n';
    out << "n_test: " << n_test << '\n';
    out << "n_zeta: " << grids.n_zeta << '\n';
    out << "e_max_uev: " << fmt_double(grids.e_max_uev) << '\n';
    out << "n_tau: " << grids.n_tau << '\n';
    out << "n_t: " << grids.n_t << '\n';
    out << "t_max_ps: " << fmt_double(grids.t_max_ps) << '\n';
    out << "kappa: " << fmt_double(kappa) << '\n';
    out << "noise_intensity_scale: " << fmt_double(noise_intensity_scale) << '\n';
    out << "n_inputs: " << n_inputs << '\n';
    out << "input_window_ps: " << fmt_double(input_window_ps) << '\n';
    out << "input_indices:";
    for (const auto i : input_indices) out << ' ' << i;
    out << '\n';
    put_ranges(out, "train", train_ranges);
    put_ranges(out, "test", test_ranges);
    out << "norm_mean: " << fmt_double(norm_mean) << '\n';
    out << "norm_scale: " << fmt_double(norm_scale) << '\n';
    return out.str();
}

DatasetManifest DatasetManifest::from_text(const std::string& text) {
    const KvParser kv(text);
    if (kv.str("format") != "g2node-dataset")
        throw DataError("manifest: unexpected format '" + kv.str("format") + "'");
    DatasetManifest m;
    m.version = static_cast<std::uint32_t>(kv.u64("version"));
    if (m.version != 1)
        throw DataError("manifest: unsupported version " + std::to_string(m.version));
    m.created_unix = static_cast<std::int64_t>(kv.u64("created_unix"));
    m.seed = kv.u64("seed");
    m.n_train = kv.u64("n_train");
    m.n_val = kv.u64("n_val");
    m.n_test = kv.u64("n_test");
    m.grids.n_zeta = kv.u64("n_zeta");
    m.grids.e_max_uev = kv.num("e_max_uev");
    m.grids.n_tau = kv.u64("n_tau");
    m.grids.n_t = kv.u64("n_t");
    m.grids.t_max_ps = kv.num("t_max_ps");
    m.kappa = kv.num("kappa");
    m.noise_intensity_scale = kv.num("noise_intensity_scale");
    m.n_inputs = kv.u64("n_inputs");
    m.input_window_ps = kv.num("input_window_ps");
    {
        std::istringstream in(kv.str("input_indices"));
        std::size_t idx;
        while (in >> idx) m.input_indices.push_back(idx);
        if (m.input_indices.size() != m.n_inputs)
            throw DataError("manifest: input_indices count disagrees with n_inputs");
    }
    m.train_ranges = take_ranges(kv, "train");
    m.test_ranges = take_ranges(kv, "test");
    m.norm_mean = kv.num("norm_mean");
    m.norm_scale = kv.num("norm_scale");
    return m;
}

DatasetManifest build_dataset(const DatasetConfig& config, const std::string& out_dir) {
    config.validate();
    fs::create_directories(fs::path(out_dir) / "records");

    const physics::DelayGrid t_grid =
        physics::DelayGrid::make(config.grids.n_t, config.grids.t_max_ps);
    const std::vector<std::size_t> input_indices =
        noise::default_input_indices(t_grid, config.n_inputs, config.input_window_ps);

    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(static_cast<double>(config.n_examples) *
                                              config.train_fraction));
    const std::size_t n_val = config.n_examples - n_train;
    const std::size_t total = config.n_examples + config.n_test;

    struct Sums {
        double sum = 0.0;
        double sumsq = 0.0;
        std::size_t count = 0;
    };
    std::vector<Sums> train_sums(total);

    const auto locate = [&](std::size_t i) -> std::pair<Split, std::size_t> {
        if (i < n_train) return {Split::Train, i};
        if (i < config.n_examples) return {Split::Val, i - n_train};
        return {Split::Test, i - config.n_examples};
    };

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total || failed.load()) break;
            try {
                const auto [split, index] = locate(i);
                const ParamRanges& ranges =
                    split == Split::Test ? config.test_ranges : config.train_ranges;
                const SimParams params =
                    sample_params(rng::derive_seed(config.seed, i), ranges, config.grids,
                                  config.kappa, config.noise_intensity_scale);
                const Example example = make_example(params, input_indices,
                                                     config.input_window_ps);
                char name[64];
                std::snprintf(name, sizeof(name), "%s_%06zu.bin", split_name(split), index);
                write_file((fs::path(out_dir) / "records" / name).string(),
                           encode_record(example));
                if (split == Split::Train) {
                    Sums s;
                    for (const double v : example.target.values) {
                        const double x = 1.0 - v;
                        s.sum += x;
                        s.sumsq += x * x;
                        ++s.count;
                    }
                    train_sums[i] = s;
                }
            } catch (const std::exception& e) {
                std::scoped_lock lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
            }
        }
    };

    int n_workers = config.workers > 0
                        ? config.workers
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    n_workers = std::min<int>(n_workers, static_cast<int>(std::max<std::size_t>(total, 1)));
    std::vector<std::thread> threads;
    for (int w = 1; w < n_workers; ++w) threads.emplace_back(worker);
    worker();
    for (auto& th : threads) th.join();
    if (failed.load()) throw DataError("build_dataset: " + first_error);

    // Deterministic reduction in example order regardless of worker count.
    double sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_train; ++i) {
        sum += train_sums[i].sum;
        sumsq += train_sums[i].sumsq;
        count += train_sums[i].count;
    }

    DatasetManifest manifest;
    manifest.n_train = n_train;
    manifest.n_val = n_val;
    manifest.n_test = config.n_test;
    manifest.grids = config.grids;
    manifest.train_ranges = config.train_ranges;
    manifest.test_ranges = config.test_ranges;
    manifest.kappa = config.kappa;
    manifest.noise_intensity_scale = config.noise_intensity_scale;
    manifest.n_inputs = config.n_inputs;
    manifest.input_window_ps = config.input_window_ps;
    manifest.input_indices = input_indices;
    manifest.seed = config.seed;
    if (count > 0) {
        manifest.norm_mean = sum / static_cast<double>(count);
        const double var =
            std::max(sumsq / static_cast<double>(count) - manifest.norm_mean * manifest.norm_mean,
                     1e-30);
        manifest.norm_scale = std::sqrt(var);
    }
    if (const char* fixed = std::getenv("G2NODE_CREATED_UNIX"))
        manifest.created_unix = std::strtoll(fixed, nullptr, 10);
    else
        manifest.created_unix = static_cast<std::int64_t>(std::time(nullptr));

    write_file((fs::path(out_dir) / "manifest.txt").string(), manifest.to_text());
    return manifest;
}

DatasetReader::DatasetReader(const std::string& dir) : dir_(dir) {
    const std::string text = read_file((fs::path(dir) / "manifest.txt").string());
    manifest_ = DatasetManifest::from_text(text);
    manifest_hash_ = fnv1a(text.data(), text.size());
}

std::string DatasetReader::record_path(Split split, std::size_t index) const {
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%06zu.bin", split_name(split), index);
    return (fs::path(dir_) / "records" / name).string();
}

Example DatasetReader::read(Split split, std::size_t index) const {
    if (index >= manifest_.count(split))
        throw DataError("DatasetReader: record index " + std::to_string(index) +
                        " out of range for split " + split_name(split));
    const std::string path = record_path(split, index);
    const std::string buf = read_file(path);
    const std::string context = std::string(split_name(split)) + " record " +
                                std::to_string(index) + " (" + path + ")";

    if (buf.size() < 16 + sizeof(std::uint64_t) || std::memcmp(buf.data(), kRecordMagic, 4) != 0)
        throw DataError(context + ": bad magic");
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + buf.size() - sizeof(std::uint64_t), sizeof(stored));
    if (fnv1a(buf.data(), buf.size() - sizeof(std::uint64_t)) != stored)
        throw DataError(context + ": checksum mismatch, record corrupt");

    std::size_t off = 4;
    const auto n_tau = take<std::uint32_t>(buf, off, context);
    const auto n_t = take<std::uint32_t>(buf, off, context);
    const auto n_inputs = take<std::uint32_t>(buf, off, context);
    if (n_tau != manifest_.grids.n_tau || n_t != manifest_.grids.n_t ||
        n_inputs != manifest_.n_inputs)
        throw DataError(context + ": record dimensions disagree with the manifest");
    const std::size_t expect =
        16 + sizeof(float) * (n_inputs + static_cast<std::size_t>(n_inputs) * n_tau +
                              static_cast<std::size_t>(n_tau) * n_t) +
        sizeof(std::uint64_t);
    if (buf.size() != expect) throw DataError(context + ": unexpected record size");

    Example ex;
    ex.inputs.resize(n_inputs);
    for (auto& curve : ex.inputs) curve.t_ps = static_cast<double>(take<float>(buf, off, context));
    for (auto& curve : ex.inputs) {
        curve.values.resize(n_tau);
        for (auto& v : curve.values) v = static_cast<double>(take<float>(buf, off, context));
    }
    ex.target.tau = physics::TauGrid::make(n_tau);
    ex.target.t = physics::DelayGrid::make(n_t, manifest_.grids.t_max_ps);
    ex.target.kappa = manifest_.kappa;
    ex.target.is_noisy = false;
    ex.target.values.resize(static_cast<std::size_t>(n_tau) * n_t);
    for (auto& v : ex.target.values) v = static_cast<double>(take<float>(buf, off, context));
    return ex;
}

}  // namespace g2node::dataset
