#include "g2node/lstm.hpp"

#include <cmath>

#include "g2node/errors.hpp"
#include "g2node/ops.hpp"

namespace g2node::models {

using namespace autodiff;

Tensor init_uniform(Shape shape, std::int64_t fan_in, rng::Stream& init) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> v(static_cast<std::size_t>(shape_numel(shape)));
    for (auto& x : v) x = init.uniform(-bound, bound);
    return Tensor::from(std::move(shape), std::move(v), true);
}

LstmLayer LstmLayer::create(std::int64_t input, std::int64_t hidden, rng::Stream& init) {
    LstmLayer layer;
    layer.hidden = hidden;
    layer.w_ih = init_uniform({4 * hidden, input}, input, init);
    layer.w_hh = init_uniform({4 * hidden, hidden}, hidden, init);
    layer.b_ih = Tensor::zeros({4 * hidden}, true);
    layer.b_hh = Tensor::zeros({4 * hidden}, true);
    // forget-gate bias +1 for stable early training
    for (std::int64_t i = hidden; i < 2 * hidden; ++i)
        layer.b_ih.value_mut()[static_cast<std::size_t>(i)] = 1.0;
    return layer;
}

std::pair<Tensor, Tensor> LstmLayer::step(const Tensor& x, const Tensor& h,
                                          const Tensor& c) const {
    const Tensor gates =
        ops::add(ops::linear(x, w_ih, b_ih), ops::linear(h, w_hh, b_hh));  // [B, 4H]
    const Tensor i = ops::sigmoid(ops::slice(gates, 1, 0, hidden));
    const Tensor f = ops::sigmoid(ops::slice(gates, 1, hidden, hidden));
    const Tensor g = ops::tanh(ops::slice(gates, 1, 2 * hidden, hidden));
    const Tensor o = ops::sigmoid(ops::slice(gates, 1, 3 * hidden, hidden));
    const Tensor c_next = ops::add(ops::mul(f, c), ops::mul(i, g));
    const Tensor h_next = ops::mul(o, ops::tanh(c_next));
    return {h_next, c_next};
}

Lstm Lstm::create(int n_layers, std::int64_t input, std::int64_t hidden, rng::Stream& init) {
    if (n_layers < 1) throw ConfigError("Lstm: need at least one layer");
    Lstm lstm;
    lstm.input_size = input;
    lstm.hidden = hidden;
    for (int l = 0; l < n_layers; ++l)
        lstm.layers.push_back(LstmLayer::create(l == 0 ? input : hidden, hidden, init));
    return lstm;
}

Lstm::Result Lstm::forward(const Tensor& sequence, const std::vector<Tensor>& h0,
                           const std::vector<Tensor>& c0) const {
    if (sequence.ndim() != 3 || sequence.dim(2) != input_size)
        throw ShapeError("Lstm: expected input [batch, steps, " + std::to_string(input_size) +
                         "], got " + shape_str(sequence.shape()));
    if (!h0.empty() && (h0.size() != layers.size() || c0.size() != layers.size()))
        throw ShapeError("Lstm: initial state count does not match layer count");
    const std::int64_t batch = sequence.dim(0);
    const std::int64_t steps = sequence.dim(1);

    std::vector<Tensor> h(layers.size()), c(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        h[l] = h0.empty() ? Tensor::zeros({batch, hidden}) : h0[l];
        c[l] = c0.empty() ? Tensor::zeros({batch, hidden}) : c0[l];
    }

    std::vector<Tensor> top_outputs;
    top_outputs.reserve(static_cast<std::size_t>(steps));
    for (std::int64_t s = 0; s < steps; ++s) {
        Tensor x = ops::reshape(ops::slice(sequence, 1, s, 1), {batch, input_size});
        for (std::size_t l = 0; l < layers.size(); ++l) {
            auto [hn, cn] = layers[l].step(x, h[l], c[l]);
            h[l] = hn;
            c[l] = cn;
            x = hn;
        }
        top_outputs.push_back(ops::reshape(x, {batch, 1, hidden}));
    }

    Result result;
    result.outputs = ops::concat(top_outputs, 1);
    result.h_final = h;
    result.c_final = c;
    return result;
}

void Lstm::collect_parameters(const std::string& prefix, std::vector<Parameter>& out) const {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const std::string base = prefix + ".l" + std::to_string(l);
        out.push_back({base + ".w_ih", layers[l].w_ih});
        out.push_back({base + ".w_hh", layers[l].w_hh});
        out.push_back({base + ".b_ih", layers[l].b_ih});
        out.push_back({base + ".b_hh", layers[l].b_hh});
    }
}

}  // namespace g2node::models
