#include "g2node/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "g2node/errors.hpp"
#include "g2node/fnv.hpp"

namespace g2node::models {

using autodiff::Shape;
using autodiff::Tensor;

namespace {

constexpr char kMagic[4] = {'G', '2', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& buf, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf.append(p, sizeof(T));
}

template <typename T>
T take(const std::string& buf, std::size_t& off, const std::string& path) {
    if (off + sizeof(T) > buf.size())
        throw DataError("checkpoint " + path + ": truncated file");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelCheckpoint& checkpoint) {
    std::string buf;
    buf.append(kMagic, 4);
    put(buf, kVersion);
    put(buf, checkpoint.step);
    put(buf, checkpoint.best_val_loss);
    put(buf, checkpoint.dataset_manifest_hash);
    put(buf, static_cast<std::uint64_t>(checkpoint.config_text.size()));
    buf.append(checkpoint.config_text);
    put(buf, static_cast<std::uint32_t>(checkpoint.params.size()));
    for (const auto& [name, tensor] : checkpoint.params) {
        put(buf, static_cast<std::uint32_t>(name.size()));
        buf.append(name);
        put(buf, static_cast<std::uint32_t>(tensor.shape().size()));
        for (const auto d : tensor.shape()) put(buf, static_cast<std::uint64_t>(d));
        for (const double v : tensor.value()) put(buf, static_cast<float>(v));
    }
    put(buf, fnv1a(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("checkpoint " + path + ": cannot open for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("checkpoint " + path + ": write failed");
}

ModelCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint " + path + ": cannot open");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 12 + sizeof(std::uint64_t) || std::memcmp(buf.data(), kMagic, 4) != 0)
        throw DataError("checkpoint " + path + ": bad magic");
    const std::uint64_t stored_sum =
        fnv1a(buf.data(), buf.size() - sizeof(std::uint64_t));
    std::uint64_t file_sum;
    std::memcpy(&file_sum, buf.data() + buf.size() - sizeof(std::uint64_t), sizeof(file_sum));
    if (stored_sum != file_sum)
        throw DataError("checkpoint " + path + ": checksum mismatch, file corrupt or truncated");

    std::size_t off = 4;
    ModelCheckpoint ck;
    const auto version = take<std::uint32_t>(buf, off, path);
    if (version != kVersion)
        throw DataError("checkpoint " + path + ": unsupported version " +
                        std::to_string(version));
    ck.step = take<std::uint64_t>(buf, off, path);
    ck.best_val_loss = take<double>(buf, off, path);
    ck.dataset_manifest_hash = take<std::uint64_t>(buf, off, path);
    const auto config_len = take<std::uint64_t>(buf, off, path);
    if (off + config_len > buf.size()) throw DataError("checkpoint " + path + ": truncated file");
    ck.config_text = buf.substr(off, config_len);
    off += config_len;
    const auto n_params = take<std::uint32_t>(buf, off, path);
    for (std::uint32_t p = 0; p < n_params; ++p) {
        const auto name_len = take<std::uint32_t>(buf, off, path);
        if (off + name_len > buf.size()) throw DataError("checkpoint " + path + ": truncated file");
        std::string name = buf.substr(off, name_len);
        off += name_len;
        const auto ndim = take<std::uint32_t>(buf, off, path);
        Shape shape(ndim);
        std::int64_t numel = 1;
        for (auto& d : shape) {
            d = static_cast<std::int64_t>(take<std::uint64_t>(buf, off, path));
            numel *= d;
        }
        std::vector<double> values(static_cast<std::size_t>(numel));
        for (auto& v : values) v = static_cast<double>(take<float>(buf, off, path));
        ck.params.emplace_back(std::move(name), Tensor::from(std::move(shape), std::move(values)));
    }
    return ck;
}

void apply_checkpoint(const ModelCheckpoint& checkpoint,
                      const std::vector<autodiff::Parameter>& params) {
    if (checkpoint.params.size() != params.size())
        throw DataError("checkpoint: parameter count mismatch, file has " +
                        std::to_string(checkpoint.params.size()) + ", model has " +
                        std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& [name, stored] = checkpoint.params[i];
        if (name != params[i].name)
            throw DataError("checkpoint: parameter name mismatch at index " + std::to_string(i) +
                            ": file has '" + name + "', model has '" + params[i].name + "'");
        if (stored.shape() != params[i].tensor.shape())
            throw DataError("checkpoint: shape mismatch for '" + name + "': file has " +
                            autodiff::shape_str(stored.shape()) + ", model has " +
                            autodiff::shape_str(params[i].tensor.shape()));
        params[i].tensor.data()->value = stored.value();
    }
}

std::vector<std::pair<std::string, Tensor>> snapshot_parameters(
    const std::vector<autodiff::Parameter>& params) {
    std::vector<std::pair<std::string, Tensor>> out;
    out.reserve(params.size());
    for (const auto& p : params) {
        std::vector<double> rounded(p.tensor.value().size());
        for (std::size_t i = 0; i < rounded.size(); ++i)
            rounded[i] = static_cast<double>(static_cast<float>(p.tensor.value()[i]));
        out.emplace_back(p.name, Tensor::from(p.tensor.shape(), std::move(rounded)));
    }
    return out;
}

}  // namespace g2node::models
