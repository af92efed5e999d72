#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "g2node/rng.hpp"
#include "g2node/tensor.hpp"

namespace g2node::models {

using autodiff::Parameter;
using autodiff::Tensor;

// One LSTM layer with the standard gate equations, gates packed
// [input, forget, cell, output] along the leading 4H axis.
struct LstmLayer {
    Tensor w_ih;  // [4H, in]
    Tensor w_hh;  // [4H, H]
    Tensor b_ih;  // [4H]
    Tensor b_hh;  // [4H]
    std::int64_t hidden = 0;

    static LstmLayer create(std::int64_t input, std::int64_t hidden, rng::Stream& init);

    // (h', c') from one step; x is [B, in], h/c are [B, H].
    std::pair<Tensor, Tensor> step(const Tensor& x, const Tensor& h, const Tensor& c) const;
};

// Stacked LSTM, batch-first.
struct Lstm {
    std::vector<LstmLayer> layers;
    std::int64_t input_size = 0;
    std::int64_t hidden = 0;

    static Lstm create(int n_layers, std::int64_t input, std::int64_t hidden, rng::Stream& init);

    struct Result {
        Tensor outputs;  // [B, S, H] from the top layer
        std::vector<Tensor> h_final;  // per layer, [B, H]
        std::vector<Tensor> c_final;
    };

    // h0/c0: one [B, H] tensor per layer, or empty for zero states.
    Result forward(const Tensor& sequence, const std::vector<Tensor>& h0,
                   const std::vector<Tensor>& c0) const;

    void collect_parameters(const std::string& prefix, std::vector<Parameter>& out) const;
};

// Uniform fan-in init helper shared by the model builders.
Tensor init_uniform(autodiff::Shape shape, std::int64_t fan_in, rng::Stream& init);

}  // namespace g2node::models
