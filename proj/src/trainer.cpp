#include "g2node/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "g2node/errors.hpp"
#include "g2node/losses.hpp"
#include "g2node/ops.hpp"
#include "g2node/rng.hpp"

namespace g2node::train {

using autodiff::NoGradGuard;
using autodiff::Parameter;
using autodiff::Tensor;
namespace fs = std::filesystem;

void TrainConfig::validate() const {
    if (batch_size < 1 || max_epochs < 1) throw ConfigError("TrainConfig: batch/epochs must be positive");
    if (!(lr > 0.0)) throw ConfigError("TrainConfig: learning rate must be positive");
    if (fourier_weight < 0.0) throw ConfigError("TrainConfig: fourier weight must be >= 0");
    if (model_kind != "lstm-ode" && model_kind != "resnet1d")
        throw ConfigError("TrainConfig: unknown model kind '" + model_kind + "'");
    if (lr_schedule != "cosine" && lr_schedule != "constant")
        throw ConfigError("TrainConfig: unknown lr schedule '" + lr_schedule + "'");
}

LoadedSplit load_split(const dataset::DatasetReader& reader, dataset::Split split) {
    const auto& manifest = reader.manifest();
    LoadedSplit out;
    out.n_examples = static_cast<std::int64_t>(reader.count(split));
    out.n_inputs = static_cast<std::int64_t>(manifest.n_inputs);
    out.n_tau = static_cast<std::int64_t>(manifest.grids.n_tau);
    out.n_t = static_cast<std::int64_t>(manifest.grids.n_t);
    const double mean = manifest.norm_mean;
    const double scale = manifest.norm_scale;
    const auto std1mg2 = [&](double g2) { return (1.0 - g2 - mean) / scale; };

    out.inputs.resize(static_cast<std::size_t>(out.n_examples * out.n_inputs * out.n_tau));
    out.targets.resize(static_cast<std::size_t>(out.n_examples * out.n_t * out.n_tau));
    for (std::int64_t e = 0; e < out.n_examples; ++e) {
        const dataset::Example ex = reader.read(split, static_cast<std::size_t>(e));
        if (e == 0) {
            out.t_norm.resize(ex.inputs.size());
            for (std::size_t k = 0; k < ex.inputs.size(); ++k)
                out.t_norm[k] = ex.inputs[k].t_ps / manifest.grids.t_max_ps;
        }
        double* in = out.inputs.data() + e * out.n_inputs * out.n_tau;
        for (std::int64_t k = 0; k < out.n_inputs; ++k)
            for (std::int64_t i = 0; i < out.n_tau; ++i)
                in[k * out.n_tau + i] =
                    std1mg2(ex.inputs[static_cast<std::size_t>(k)]
                                .values[static_cast<std::size_t>(i)]);
        double* tg = out.targets.data() + e * out.n_t * out.n_tau;
        // record targets are tau-major; training uses t-major sequences
        for (std::int64_t i = 0; i < out.n_tau; ++i)
            for (std::int64_t j = 0; j < out.n_t; ++j)
                tg[j * out.n_tau + i] =
                    std1mg2(ex.target.values[static_cast<std::size_t>(i * out.n_t + j)]);
    }
    return out;
}

namespace {

Tensor gather_batch(const std::vector<double>& pool, const std::vector<std::size_t>& order,
                    std::size_t begin, std::size_t end, std::int64_t rows, std::int64_t cols) {
    const std::int64_t batch = static_cast<std::int64_t>(end - begin);
    std::vector<double> data(static_cast<std::size_t>(batch * rows * cols));
    const std::size_t block = static_cast<std::size_t>(rows * cols);
    for (std::size_t b = begin; b < end; ++b)
        std::copy_n(pool.data() + order[b] * block, block,
                    data.data() + (b - begin) * block);
    return Tensor::from({batch, rows, cols}, std::move(data));
}

}  // namespace

std::string model_config_json(const TrainConfig& config,
                              const dataset::DatasetManifest& manifest) {
    nlohmann::json j;
    j["model"] = config.model_kind;
    j["n_tau"] = manifest.grids.n_tau;
    j["n_inputs"] = manifest.n_inputs;
    j["n_t"] = manifest.grids.n_t;
    j["hidden"] = config.hidden;
    j["latent"] = config.latent;
    j["enc_layers"] = config.enc_layers;
    j["dec_layers"] = config.dec_layers;
    j["field_depth"] = config.field_depth;
    j["field_width"] = config.field_width;
    j["field_time_dependent"] = config.field_time_dependent;
    j["ode_substeps"] = config.ode_substeps;
    j["resnet_blocks"] = config.resnet_blocks;
    j["t_max_ps"] = manifest.grids.t_max_ps;
    j["kappa"] = manifest.kappa;
    j["norm_mean"] = manifest.norm_mean;
    j["norm_scale"] = manifest.norm_scale;
    j["input_window_ps"] = manifest.input_window_ps;
    std::vector<double> t_ps;
    const physics::DelayGrid grid =
        physics::DelayGrid::make(manifest.grids.n_t, manifest.grids.t_max_ps);
    for (const auto idx : manifest.input_indices) t_ps.push_back(grid.values[idx]);
    j["input_t_ps"] = t_ps;
    return j.dump();
}

std::unique_ptr<models::Model> model_from_config_json(const std::string& json_text,
                                                      std::uint64_t seed) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    const std::string kind = j.at("model").get<std::string>();
    if (kind == "lstm-ode") {
        models::LstmOdeConfig c;
        c.n_tau = j.at("n_tau").get<std::int64_t>();
        c.n_inputs = j.at("n_inputs").get<std::int64_t>();
        c.n_t = j.at("n_t").get<std::int64_t>();
        c.hidden = j.at("hidden").get<std::int64_t>();
        c.latent = j.at("latent").get<std::int64_t>();
        c.enc_layers = j.at("enc_layers").get<int>();
        c.dec_layers = j.at("dec_layers").get<int>();
        c.field_depth = j.at("field_depth").get<int>();
        c.field_width = j.at("field_width").get<std::int64_t>();
        c.field_time_dependent = j.at("field_time_dependent").get<bool>();
        c.ode_substeps = j.at("ode_substeps").get<int>();
        return std::make_unique<models::LstmOdeModel>(c, seed);
    }
    if (kind == "resnet1d") {
        const auto cfg = models::ResNet1dConfig::make(
            j.at("n_tau").get<std::int64_t>(), j.at("n_inputs").get<std::int64_t>(),
            j.at("n_t").get<std::int64_t>(), j.at("resnet_blocks").get<int>());
        return std::make_unique<models::ResNet1dModel>(cfg, seed);
    }
    throw ConfigError("model_from_config_json: unknown model kind '" + kind + "'");
}

namespace {

struct Adam {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::size_t t = 0;
    std::vector<std::vector<double>> m, v;

    explicit Adam(const std::vector<Parameter>& params) {
        for (const auto& p : params) {
            m.emplace_back(p.tensor.value().size(), 0.0);
            v.emplace_back(p.tensor.value().size(), 0.0);
        }
    }

    void step(const std::vector<Parameter>& params, double current_lr) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t p = 0; p < params.size(); ++p) {
            auto& value = params[p].tensor.data()->value;
            const auto& grad = params[p].tensor.data()->grad;
            if (grad.empty()) continue;
            for (std::size_t i = 0; i < value.size(); ++i) {
                m[p][i] = beta1 * m[p][i] + (1.0 - beta1) * grad[i];
                v[p][i] = beta2 * v[p][i] + (1.0 - beta2) * grad[i] * grad[i];
                const double mhat = m[p][i] / bc1;
                const double vhat = v[p][i] / bc2;
                value[i] -= current_lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
};

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double param_l2(const std::vector<Parameter>& params, bool grads) {
    double acc = 0.0;
    for (const auto& p : params) {
        const auto& data = grads ? p.tensor.data()->grad : p.tensor.data()->value;
        for (const double v : data) acc += v * v;
    }
    return std::sqrt(acc);
}

struct BatchLoss {
    Tensor total, time, fourier;
};

BatchLoss batch_losses(const Tensor& pred_s, const Tensor& target_s, double fourier_weight,
                       const std::vector<std::int64_t>& subset, double mean, double scale) {
    using namespace autodiff::ops;
    BatchLoss l;
    l.time = time_mse(pred_s, target_s);
    // g2 = 1 - (s * scale + mean)
    const Tensor pred_g2 = rsub_scalar(1.0, add_scalar(autodiff::ops::scale(pred_s, scale), mean));
    const Tensor target_g2 =
        rsub_scalar(1.0, add_scalar(autodiff::ops::scale(target_s, scale), mean));
    l.fourier = fourier_loss(pred_g2, target_g2, subset);
    l.total = fourier_weight > 0.0
                  ? add(l.time, autodiff::ops::scale(l.fourier, fourier_weight))
                  : l.time;
    return l;
}

}  // namespace

TrainResult train(const TrainConfig& config) {
    config.validate();
    const dataset::DatasetReader reader(config.dataset_dir);
    const auto& manifest = reader.manifest();
    if (reader.count(dataset::Split::Train) == 0)
        throw DataError("train: dataset has no training split");
    if (reader.count(dataset::Split::Val) == 0)
        throw DataError("train: dataset has no validation split");
    fs::create_directories(config.out_dir);

    const LoadedSplit train_set = load_split(reader, dataset::Split::Train);
    const LoadedSplit val_set = load_split(reader, dataset::Split::Val);

    const std::string config_json = model_config_json(config, manifest);
    std::unique_ptr<models::Model> model = model_from_config_json(config_json, config.seed);
    const std::vector<Parameter> params = model->parameters();

    std::size_t start_epoch = 0;
    if (!config.resume_path.empty()) {
        const models::ModelCheckpoint ck = models::load_checkpoint(config.resume_path);
        models::apply_checkpoint(ck, params);
        start_epoch = ck.step;
    }

    std::vector<std::int64_t> subset =
        config.fourier_tau_subset.empty() ? default_tau_subset(train_set.n_tau)
                                          : config.fourier_tau_subset;

    Adam adam(params);
    adam.lr = config.lr;

    const std::string log_path = (fs::path(config.out_dir) / "metrics.tsv").string();
    std::ofstream log(log_path, start_epoch == 0 ? std::ios::trunc : std::ios::app);
    if (!log) throw DataError("train: cannot open metrics log " + log_path);

    TrainResult result;
    result.metrics_log_path = log_path;
    result.best_checkpoint_path = (fs::path(config.out_dir) / "best.ckpt").string();
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;

    const auto run_eval = [&](const LoadedSplit& split_set, double& total, double& time_c,
                              double& fourier_c) {
        NoGradGuard guard;
        double sum_total = 0.0, sum_time = 0.0, sum_fourier = 0.0;
        std::size_t n_batches = 0;
        std::vector<std::size_t> order(static_cast<std::size_t>(split_set.n_examples));
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            const Tensor inputs = gather_batch(split_set.inputs, order, begin, end,
                                               split_set.n_inputs, split_set.n_tau);
            const Tensor targets = gather_batch(split_set.targets, order, begin, end,
                                                split_set.n_t, split_set.n_tau);
            const Tensor pred = model->forward(inputs, split_set.t_norm);
            const BatchLoss l = batch_losses(pred, targets, config.fourier_weight, subset,
                                             manifest.norm_mean, manifest.norm_scale);
            sum_total += l.total.item();
            sum_time += l.time.item();
            sum_fourier += l.fourier.item();
            ++n_batches;
        }
        total = sum_total / static_cast<double>(n_batches);
        time_c = sum_time / static_cast<double>(n_batches);
        fourier_c = sum_fourier / static_cast<double>(n_batches);
    };

    std::vector<std::size_t> order(static_cast<std::size_t>(train_set.n_examples));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = start_epoch; epoch < config.max_epochs; ++epoch) {
        const auto wall_start = std::chrono::steady_clock::now();
        const double lr_now =
            config.lr_schedule == "cosine"
                ? config.lr * 0.5 *
                      (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) /
                                      static_cast<double>(config.max_epochs)))
                : config.lr;

        // seeded shuffle, same permutation for a given (seed, epoch)
        rng::Stream shuffle(rng::derive_seed(config.seed, 0x510FF1E0ULL + epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(shuffle.next_below(i));
            std::swap(order[i - 1], order[j]);
        }

        double sum_total = 0.0, sum_time = 0.0, sum_fourier = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            const Tensor inputs = gather_batch(train_set.inputs, order, begin, end,
                                               train_set.n_inputs, train_set.n_tau);
            const Tensor targets = gather_batch(train_set.targets, order, begin, end,
                                                train_set.n_t, train_set.n_tau);
            const Tensor pred = model->forward(inputs, train_set.t_norm);
            BatchLoss l = batch_losses(pred, targets, config.fourier_weight, subset,
                                       manifest.norm_mean, manifest.norm_scale);
            if (!std::isfinite(l.total.item()))
                throw NumericalError(
                    "train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                    std::to_string(n_batches) + "; |params| = " +
                    std::to_string(param_l2(params, false)) + ", |grads| = " +
                    std::to_string(param_l2(params, true)));
            for (const auto& p : params) p.tensor.zero_grad();
            autodiff::backward(l.total);
            adam.step(params, lr_now);
            sum_total += l.total.item();
            sum_time += l.time.item();
            sum_fourier += l.fourier.item();
            ++n_batches;
        }

        EpochMetrics m;
        m.epoch = epoch;
        m.train_total = sum_total / static_cast<double>(n_batches);
        m.train_time = sum_time / static_cast<double>(n_batches);
        m.train_fourier = sum_fourier / static_cast<double>(n_batches);
        run_eval(val_set, m.val_total, m.val_time, m.val_fourier);
        m.lr = lr_now;
        m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       wall_start)
                             .count();
        result.metrics.push_back(m);

        log << m.epoch << '\t' << fmt17(m.train_total) << '\t' << fmt17(m.train_time) << '\t'
            << fmt17(m.train_fourier) << '\t' << fmt17(m.val_total) << '\t' << fmt17(m.val_time)
            << '\t' << fmt17(m.val_fourier) << '\t' << fmt17(m.lr) << '\t'
            << fmt17(m.wall_seconds) << '\n';
        log.flush();

        if (m.val_total < best_val) {
            best_val = m.val_total;
            since_best = 0;
            result.best.config_text = config_json;
            result.best.params = models::snapshot_parameters(params);
            result.best.step = epoch + 1;
            result.best.best_val_loss = best_val;
            result.best.dataset_manifest_hash = reader.manifest_hash();
            result.best_epoch = epoch;
            models::save_checkpoint(result.best_checkpoint_path, result.best);
        } else {
            ++since_best;
            if (since_best >= config.patience) break;
        }

        if (config.checkpoint_every > 0 && (epoch + 1) % config.checkpoint_every == 0) {
            models::ModelCheckpoint last;
            last.config_text = config_json;
            last.params = models::snapshot_parameters(params);
            last.step = epoch + 1;
            last.best_val_loss = best_val;
            last.dataset_manifest_hash = reader.manifest_hash();
            models::save_checkpoint((fs::path(config.out_dir) / "last.ckpt").string(), last);
        }
    }
    if (result.best.params.empty())
        throw NumericalError("train: no epochs completed");
    return result;
}

namespace {

EvalReport summarize(std::vector<double> per_example, double fourier_sum, std::size_t n) {
    EvalReport r;
    r.n = per_example.size();
    r.per_example_mse = per_example;
    if (per_example.empty()) return r;
    double sum = 0.0;
    for (const double v : per_example) sum += v;
    r.mean_mse = sum / static_cast<double>(per_example.size());
    std::sort(per_example.begin(), per_example.end());
    r.median_mse = per_example[per_example.size() / 2];
    r.p95_mse = per_example[static_cast<std::size_t>(
        std::min<double>(static_cast<double>(per_example.size()) - 1.0,
                         std::ceil(0.95 * static_cast<double>(per_example.size())) - 1.0))];
    r.mean_fourier = fourier_sum / static_cast<double>(n);
    return r;
}

template <typename Forward>
EvalReport evaluate_with(const dataset::DatasetReader& reader, dataset::Split split,
                         std::size_t batch_size, Forward&& forward) {
    NoGradGuard guard;
    const auto& manifest = reader.manifest();
    if (reader.count(split) == 0)
        throw DataError(std::string("evaluate: split '") + dataset::split_name(split) +
                        "' is empty");
    const LoadedSplit set = load_split(reader, split);
    const double scale2 = manifest.norm_scale * manifest.norm_scale;
    std::vector<double> per_example;
    double fourier_sum = 0.0;
    std::size_t count = 0;
    std::vector<std::size_t> order(static_cast<std::size_t>(set.n_examples));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto subset = default_tau_subset(set.n_tau);
    for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
        const std::size_t end = std::min(order.size(), begin + batch_size);
        const Tensor inputs =
            gather_batch(set.inputs, order, begin, end, set.n_inputs, set.n_tau);
        const Tensor targets = gather_batch(set.targets, order, begin, end, set.n_t, set.n_tau);
        const Tensor pred = forward(inputs, set.t_norm);
        const std::int64_t batch = inputs.dim(0);
        const std::size_t block = static_cast<std::size_t>(set.n_t * set.n_tau);
        for (std::int64_t b = 0; b < batch; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < block; ++i) {
                const double d = pred.value()[static_cast<std::size_t>(b) * block + i] -
                                 targets.value()[static_cast<std::size_t>(b) * block + i];
                acc += d * d;
            }
            per_example.push_back(scale2 * acc / static_cast<double>(block));
        }
        const BatchLoss l =
            batch_losses(pred, targets, 1.0, subset, manifest.norm_mean, manifest.norm_scale);
        fourier_sum += l.fourier.item();
        ++count;
    }
    return summarize(std::move(per_example), fourier_sum, count);
}

}  // namespace

EvalReport evaluate(const models::Model& model, const dataset::DatasetReader& reader,
                    dataset::Split split, std::size_t batch_size) {
    return evaluate_with(reader, split, batch_size,
                         [&](const Tensor& inputs, const std::vector<double>& t_norm) {
                             return model.forward(inputs, t_norm);
                         });
}

EvalReport evaluate_persistence(const dataset::DatasetReader& reader, dataset::Split split,
                                std::size_t batch_size) {
    const std::int64_t n_t = static_cast<std::int64_t>(reader.manifest().grids.n_t);
    return evaluate_with(reader, split, batch_size,
                         [&](const Tensor& inputs, const std::vector<double>&) {
                             return persistence_baseline(inputs, n_t);
                         });
}

}  // namespace g2node::train
