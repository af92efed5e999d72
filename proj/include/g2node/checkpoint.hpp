#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "g2node/tensor.hpp"

namespace g2node::models {

// Serialized model state. Parameters are stored as little-endian f32
// blobs; the config record is free-form length-prefixed text (JSON).
struct ModelCheckpoint {
    std::string config_text;
    std::vector<std::pair<std::string, autodiff::Tensor>> params;
    std::uint64_t step = 0;
    double best_val_loss = 0.0;
    std::uint64_t dataset_manifest_hash = 0;
};

void save_checkpoint(const std::string& path, const ModelCheckpoint& checkpoint);
ModelCheckpoint load_checkpoint(const std::string& path);

// Copies checkpoint parameters into live model parameters; every
// name/shape must match exactly or the offending entry is named.
void apply_checkpoint(const ModelCheckpoint& checkpoint,
                      const std::vector<autodiff::Parameter>& params);

// Snapshot of live parameters (values are f32-rounded, matching what a
// save/load round trip would produce).
std::vector<std::pair<std::string, autodiff::Tensor>> snapshot_parameters(
    const std::vector<autodiff::Parameter>& params);

}  // namespace g2node::models
