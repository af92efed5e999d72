#pragma once

#include <cstdint>
#include <vector>

#include "g2node/tensor.hpp"

namespace g2node::train {

using autodiff::Tensor;

// Mean of squared differences over two maps of identical shape.
Tensor time_mse(const Tensor& pred, const Tensor& target);

// {first, middle, last} tau indices.
std::vector<std::int64_t> default_tau_subset(std::int64_t n_tau);

// Frequency-domain loss: for each selected tau column the real-part DFT
// along t of (1 - g2) is taken for both maps and the result is the mean
// squared difference over all selected elements. Inputs are g2-space
// maps [B, n_t, n_tau]; the transform is a dense cosine-matrix product,
// so the loss is linear in the maps and exactly differentiable.
Tensor fourier_loss(const Tensor& pred_g2, const Tensor& target_g2,
                    const std::vector<std::int64_t>& tau_subset);

// Repeats the last (largest-t) input curve for every forecast step.
// inputs [B, n_inputs, n_tau] -> [B, n_t, n_tau].
Tensor persistence_baseline(const Tensor& inputs, std::int64_t n_t);

}  // namespace g2node::train
