#include "g2node/models.hpp"

#include <cmath>

#include "g2node/errors.hpp"
#include "g2node/ode.hpp"
#include "g2node/ops.hpp"

namespace g2node::models {

using namespace autodiff;

void LstmOdeConfig::validate() const {
    if (n_tau < 1 || n_inputs < 1 || hidden < 1 || latent < 1 || field_width < 1 || n_t < 2)
        throw ConfigError("LstmOdeConfig: all dimensions must be positive (n_t >= 2)");
    if (enc_layers < 1 || dec_layers < 1 || field_depth < 1 || ode_substeps < 1)
        throw ConfigError("LstmOdeConfig: layer/substep counts must be positive");
}

LstmOdeModel::LstmOdeModel(const LstmOdeConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    rng::Stream init(seed);
    encoder_ = Lstm::create(config_.enc_layers, config_.n_tau, config_.hidden, init);

    attn_w_ = init_uniform({config_.hidden, config_.hidden}, config_.hidden, init);
    attn_b_ = Tensor::zeros({config_.hidden}, true);
    attn_v_ = init_uniform({1, config_.hidden}, config_.hidden, init);
    pool_w_ = init_uniform({config_.latent, config_.hidden}, config_.hidden, init);
    pool_b_ = Tensor::zeros({config_.latent}, true);

    const std::int64_t field_in = config_.latent + (config_.field_time_dependent ? 1 : 0);
    std::int64_t in = field_in;
    for (int l = 0; l < config_.field_depth; ++l) {
        field_w_.push_back(init_uniform({config_.field_width, in}, in, init));
        field_b_.push_back(Tensor::zeros({config_.field_width}, true));
        in = config_.field_width;
    }
    field_w_.push_back(init_uniform({config_.latent, in}, in, init));
    field_b_.push_back(Tensor::zeros({config_.latent}, true));

    decoder_ = Lstm::create(config_.dec_layers, config_.latent, config_.hidden, init);
    proj_w_ = init_uniform({config_.n_tau, config_.hidden}, config_.hidden, init);
    proj_b_ = Tensor::zeros({config_.n_tau}, true);
}

Tensor attention_weights(const Tensor& encoder_outputs, const Tensor& w, const Tensor& b,
                         const Tensor& v) {
    const Tensor keys = ops::tanh(ops::linear(encoder_outputs, w, b));  // [B,S,H]
    const Tensor scores = ops::linear(keys, v, Tensor());               // [B,S,1]
    return ops::softmax(
        ops::reshape(scores, {encoder_outputs.dim(0), encoder_outputs.dim(1)}), 1);
}

Tensor LstmOdeModel::encode(const Tensor& inputs, Lstm::Result& enc) const {
    enc = encoder_.forward(inputs, {}, {});
    const Tensor weights = attention_weights(enc.outputs, attn_w_, attn_b_, attn_v_);
    const Tensor pooled = ops::weighted_sum_seq(enc.outputs, weights);  // [B,H]
    return ops::linear(pooled, pool_w_, pool_b_);                       // [B,z]
}

Tensor LstmOdeModel::forward(const Tensor& inputs, const std::vector<double>& t_norm) const {
    if (inputs.ndim() != 3 || inputs.dim(1) != config_.n_inputs ||
        inputs.dim(2) != config_.n_tau)
        throw ShapeError("LstmOdeModel: expected inputs [batch, " +
                         std::to_string(config_.n_inputs) + ", " + std::to_string(config_.n_tau) +
                         "], got " + shape_str(inputs.shape()));
    if (t_norm.size() != static_cast<std::size_t>(config_.n_inputs))
        throw ConfigError("LstmOdeModel: got " + std::to_string(t_norm.size()) +
                          " input delays for " + std::to_string(config_.n_inputs) + " curves");
    for (std::size_t i = 0; i < t_norm.size(); ++i) {
        if (t_norm[i] < 0.0 || t_norm[i] > 1.0)
            throw ConfigError("LstmOdeModel: input delay " + std::to_string(t_norm[i]) +
                              " is not normalized to [0, 1]");
        if (i > 0 && t_norm[i] <= t_norm[i - 1])
            throw ConfigError("LstmOdeModel: input delays must be strictly increasing");
    }

    Lstm::Result enc;
    const Tensor h0 = encode(inputs, enc);

    std::vector<double> s_grid(static_cast<std::size_t>(config_.n_t));
    for (std::int64_t j = 0; j < config_.n_t; ++j)
        s_grid[static_cast<std::size_t>(j)] =
            static_cast<double>(j) / static_cast<double>(config_.n_t - 1);

    const auto field = [this](const Tensor& h, double s) {
        Tensor x = h;
        if (config_.field_time_dependent) {
            Tensor s_col = Tensor::full({h.dim(0), 1}, s);
            x = ops::concat({x, s_col}, 1);
        }
        for (std::size_t l = 0; l + 1 < field_w_.size(); ++l)
            x = ops::tanh(ops::linear(x, field_w_[l], field_b_[l]));
        return ops::linear(x, field_w_.back(), field_b_.back());
    };
    const Tensor trajectory = ode_solve(field, h0, s_grid, config_.ode_substeps);

    const Lstm::Result dec = decoder_.forward(trajectory, enc.h_final, enc.c_final);
    return ops::linear(dec.outputs, proj_w_, proj_b_);  // [B, n_t, n_tau]
}

Tensor LstmOdeModel::latent_trajectory(const Tensor& inputs, int substeps_override) const {
    Lstm::Result enc;
    const Tensor h0 = encode(inputs, enc);
    std::vector<double> s_grid(static_cast<std::size_t>(config_.n_t));
    for (std::int64_t j = 0; j < config_.n_t; ++j)
        s_grid[static_cast<std::size_t>(j)] =
            static_cast<double>(j) / static_cast<double>(config_.n_t - 1);
    const auto field = [this](const Tensor& h, double s) {
        Tensor x = h;
        if (config_.field_time_dependent) {
            Tensor s_col = Tensor::full({h.dim(0), 1}, s);
            x = ops::concat({x, s_col}, 1);
        }
        for (std::size_t l = 0; l + 1 < field_w_.size(); ++l)
            x = ops::tanh(ops::linear(x, field_w_[l], field_b_[l]));
        return ops::linear(x, field_w_.back(), field_b_.back());
    };
    const int substeps = substeps_override > 0 ? substeps_override : config_.ode_substeps;
    return ode_solve(field, h0, s_grid, substeps);
}

std::vector<Parameter> LstmOdeModel::parameters() const {
    std::vector<Parameter> out;
    encoder_.collect_parameters("encoder", out);
    out.push_back({"attention.w", attn_w_});
    out.push_back({"attention.b", attn_b_});
    out.push_back({"attention.v", attn_v_});
    out.push_back({"pool.w", pool_w_});
    out.push_back({"pool.b", pool_b_});
    for (std::size_t l = 0; l < field_w_.size(); ++l) {
        out.push_back({"field.l" + std::to_string(l) + ".w", field_w_[l]});
        out.push_back({"field.l" + std::to_string(l) + ".b", field_b_[l]});
    }
    decoder_.collect_parameters("decoder", out);
    out.push_back({"proj.w", proj_w_});
    out.push_back({"proj.b", proj_b_});
    return out;
}

ResNet1dConfig ResNet1dConfig::make(std::int64_t n_tau, std::int64_t n_inputs, std::int64_t n_t,
                                    int blocks) {
    ResNet1dConfig c;
    c.n_tau = n_tau;
    c.in_channels = n_inputs;
    c.out_channels = n_t;
    c.channels.resize(static_cast<std::size_t>(blocks) + 1);
    for (int i = 0; i <= blocks; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(blocks);
        c.channels[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::llround(
            static_cast<double>(n_inputs) *
            std::pow(static_cast<double>(n_t) / static_cast<double>(n_inputs), f)));
    }
    c.channels.front() = n_inputs;
    c.channels.back() = n_t;
    return c;
}

void ResNet1dConfig::validate() const {
    const int blocks = static_cast<int>(channels.size()) - 1;
    if (blocks < 4 || blocks > 8)
        throw ConfigError("ResNet1dConfig: block count must be in [4, 8], got " +
                          std::to_string(blocks));
    if (channels.front() != in_channels || channels.back() != out_channels)
        throw ConfigError("ResNet1dConfig: channel schedule must run from in to out channels");
    for (std::size_t i = 1; i < channels.size(); ++i)
        if (channels[i] < channels[i - 1])
            throw ConfigError("ResNet1dConfig: channel schedule must be monotone nondecreasing");
    if (kernel < 1 || kernel % 2 == 0)
        throw ConfigError("ResNet1dConfig: kernel must be odd and positive");
}

ResNet1dModel::ResNet1dModel(const ResNet1dConfig& config, std::uint64_t seed) : config_(config) {
    config_.validate();
    rng::Stream init(seed);
    for (std::size_t i = 1; i < config_.channels.size(); ++i) {
        const std::int64_t cin = config_.channels[i - 1];
        const std::int64_t cout = config_.channels[i];
        Block block;
        block.w1 = init_uniform({cout, cin, config_.kernel}, cin * config_.kernel, init);
        block.b1 = Tensor::zeros({cout}, true);
        block.w2 = init_uniform({cout, cout, config_.kernel}, cout * config_.kernel, init);
        block.b2 = Tensor::zeros({cout}, true);
        if (cin != cout) block.proj = init_uniform({cout, cin, 1}, cin, init);
        blocks_.push_back(std::move(block));
    }
}

Tensor ResNet1dModel::forward(const Tensor& inputs, const std::vector<double>& t_norm) const {
    (void)t_norm;  // delays are baked into the channel ordering
    if (inputs.ndim() != 3 || inputs.dim(1) != config_.in_channels ||
        inputs.dim(2) != config_.n_tau)
        throw ShapeError("ResNet1dModel: expected inputs [batch, " +
                         std::to_string(config_.in_channels) + ", " +
                         std::to_string(config_.n_tau) + "], got " + shape_str(inputs.shape()));
    Tensor x = inputs;
    for (const Block& block : blocks_) {
        const Tensor skip = block.proj.defined() ? ops::conv1d(x, block.proj, Tensor()) : x;
        const Tensor branch =
            ops::conv1d(ops::relu(ops::conv1d(x, block.w1, block.b1)), block.w2, block.b2);
        x = ops::add(skip, branch);
    }
    return x;  // [B, out_channels = n_t, n_tau]
}

std::vector<Parameter> ResNet1dModel::parameters() const {
    std::vector<Parameter> out;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const std::string base = "block" + std::to_string(i);
        out.push_back({base + ".w1", blocks_[i].w1});
        out.push_back({base + ".b1", blocks_[i].b1});
        out.push_back({base + ".w2", blocks_[i].w2});
        out.push_back({base + ".b2", blocks_[i].b2});
        if (blocks_[i].proj.defined()) out.push_back({base + ".proj", blocks_[i].proj});
    }
    return out;
}

std::int64_t parameter_count(const Model& model) {
    std::int64_t n = 0;
    for (const auto& p : model.parameters()) n += p.tensor.numel();
    return n;
}

}  // namespace g2node::models
