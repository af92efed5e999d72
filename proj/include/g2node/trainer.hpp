#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "g2node/checkpoint.hpp"
#include "g2node/dataset.hpp"
#include "g2node/models.hpp"

namespace g2node::train {

struct TrainConfig {
    std::string dataset_dir;
    std::string out_dir;
    std::string model_kind = "lstm-ode";  // or "resnet1d"
    std::size_t batch_size = 32;
    std::size_t max_epochs = 60;
    double lr = 3e-4;
    std::string lr_schedule = "cosine";  // or "constant"
    double fourier_weight = 1.0;
    std::vector<std::int64_t> fourier_tau_subset;  // empty = {first, mid, last}
    std::size_t patience = 20;
    std::uint64_t seed = 1;
    std::size_t checkpoint_every = 5;  // epochs; 0 disables periodic saves
    std::string resume_path;           // optional checkpoint to continue from

    // model hyperparameters
    std::int64_t hidden = 128;
    std::int64_t latent = 128;
    int enc_layers = 3;
    int dec_layers = 3;
    int field_depth = 3;
    std::int64_t field_width = 256;
    bool field_time_dependent = false;
    int ode_substeps = 1;
    int resnet_blocks = 8;

    void validate() const;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double train_total = 0.0;
    double train_time = 0.0;
    double train_fourier = 0.0;
    double val_total = 0.0;
    double val_time = 0.0;
    double val_fourier = 0.0;
    double lr = 0.0;
    double wall_seconds = 0.0;
};

struct TrainResult {
    models::ModelCheckpoint best;
    std::vector<EpochMetrics> metrics;
    std::string metrics_log_path;
    std::string best_checkpoint_path;
    std::size_t best_epoch = 0;
};

// In-memory standardized split: values are ((1 - g2) - mean) / scale.
struct LoadedSplit {
    std::int64_t n_examples = 0;
    std::int64_t n_inputs = 0;
    std::int64_t n_tau = 0;
    std::int64_t n_t = 0;
    std::vector<double> inputs;    // [n_examples][n_inputs][n_tau]
    std::vector<double> targets;   // [n_examples][n_t][n_tau] (t-major)
    std::vector<double> t_norm;    // shared input delays / t_max
};

LoadedSplit load_split(const dataset::DatasetReader& reader, dataset::Split split);

// JSON config for checkpoints; carries everything a standalone forecast
// needs (dims, normalization, delays, contrast).
std::string model_config_json(const TrainConfig& config,
                              const dataset::DatasetManifest& manifest);
std::unique_ptr<models::Model> model_from_config_json(const std::string& json_text,
                                                      std::uint64_t seed);

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) on time_mse + w_F * fourier_loss,
// seeded shuffling, per-epoch validation, early stopping, best-checkpoint
// return. Metrics stream to <out_dir>/metrics.tsv, one line per epoch.
TrainResult train(const TrainConfig& config);

struct EvalReport {
    std::size_t n = 0;
    double mean_mse = 0.0;    // physical units
    double median_mse = 0.0;
    double p95_mse = 0.0;
    double mean_fourier = 0.0;
    std::vector<double> per_example_mse;
};

EvalReport evaluate(const models::Model& model, const dataset::DatasetReader& reader,
                    dataset::Split split, std::size_t batch_size = 32);
EvalReport evaluate_persistence(const dataset::DatasetReader& reader, dataset::Split split,
                                std::size_t batch_size = 32);

}  // namespace g2node::train
