#include "g2node/losses.hpp"

#include <string>

#include "g2node/errors.hpp"
#include "g2node/ops.hpp"

namespace g2node::train {

using namespace autodiff;

Tensor time_mse(const Tensor& pred, const Tensor& target) { return ops::mse(pred, target); }

std::vector<std::int64_t> default_tau_subset(std::int64_t n_tau) {
    return {0, n_tau / 2, n_tau - 1};
}

Tensor fourier_loss(const Tensor& pred_g2, const Tensor& target_g2,
                    const std::vector<std::int64_t>& tau_subset) {
    if (pred_g2.shape() != target_g2.shape())
        throw ShapeError("fourier_loss: shape mismatch " + shape_str(pred_g2.shape()) + " vs " +
                         shape_str(target_g2.shape()));
    if (pred_g2.ndim() != 3)
        throw ShapeError("fourier_loss: expected [batch, n_t, n_tau], got " +
                         shape_str(pred_g2.shape()));
    if (tau_subset.empty()) throw ConfigError("fourier_loss: empty tau subset");
    const std::int64_t n_tau = pred_g2.dim(2);
    for (const auto idx : tau_subset)
        if (idx < 0 || idx >= n_tau)
            throw ConfigError("fourier_loss: tau index " + std::to_string(idx) +
                              " out of range for " + std::to_string(n_tau) + " rows");

    const auto select = [&](const Tensor& map) {
        std::vector<Tensor> cols;
        cols.reserve(tau_subset.size());
        for (const auto idx : tau_subset) cols.push_back(ops::slice(map, 2, idx, 1));
        const Tensor picked = cols.size() == 1 ? cols[0] : ops::concat(cols, 2);
        return ops::cos_dft_time(ops::rsub_scalar(1.0, picked));
    };
    return ops::mse(select(pred_g2), select(target_g2));
}

Tensor persistence_baseline(const Tensor& inputs, std::int64_t n_t) {
    if (inputs.ndim() != 3)
        throw ShapeError("persistence_baseline: expected [batch, n_inputs, n_tau], got " +
                         shape_str(inputs.shape()));
    if (inputs.dim(1) < 1)
        throw ShapeError("persistence_baseline: need at least one input curve");
    const Tensor last = ops::slice(inputs, 1, inputs.dim(1) - 1, 1);  // [B,1,n_tau]
    std::vector<Tensor> tiled(static_cast<std::size_t>(n_t), last);
    return ops::concat(tiled, 1);
}

}  // namespace g2node::train
