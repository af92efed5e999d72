#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "g2node/lstm.hpp"
#include "g2node/tensor.hpp"

namespace g2node::models {

struct LstmOdeConfig {
    std::int64_t n_tau = 64;      // input curve width
    std::int64_t n_inputs = 10;   // measured curves
    int enc_layers = 3;
    std::int64_t hidden = 128;
    std::int64_t latent = 128;
    int field_depth = 3;          // hidden layers of the vector-field MLP
    std::int64_t field_width = 256;
    bool field_time_dependent = false;
    int dec_layers = 3;
    std::int64_t n_t = 200;       // forecast steps
    int ode_substeps = 1;

    void validate() const;
};

struct ResNet1dConfig {
    std::int64_t n_tau = 64;
    std::int64_t in_channels = 10;    // measured curves as channels
    std::int64_t out_channels = 200;  // forecast delays as channels
    std::int64_t kernel = 3;
    // per-block output channels, monotone nondecreasing in -> out
    std::vector<std::int64_t> channels;

    static ResNet1dConfig make(std::int64_t n_tau, std::int64_t n_inputs, std::int64_t n_t,
                               int blocks);
    void validate() const;
};

// Additive attention with a learned global query:
//   score_s = v . tanh(W o_s + b),  weights = softmax(scores).
// encoder_outputs is [B, S, H]; returns [B, S], rows summing to 1.
Tensor attention_weights(const Tensor& encoder_outputs, const Tensor& w, const Tensor& b,
                         const Tensor& v);

// Shared forecaster surface: noisy input curves in, full map out.
class Model {
public:
    virtual ~Model() = default;
    // inputs [B, n_inputs, n_tau]; t_norm: the input delays divided by
    // t_max, increasing in [0, 1]. Returns [B, n_t, n_tau].
    virtual Tensor forward(const Tensor& inputs, const std::vector<double>& t_norm) const = 0;
    virtual std::vector<Parameter> parameters() const = 0;
    virtual std::string kind() const = 0;
    virtual std::int64_t n_t() const = 0;
    virtual std::int64_t n_tau() const = 0;
    virtual std::int64_t n_inputs() const = 0;
};

// Encoder LSTM -> attention pool -> latent ODE -> decoder LSTM
// (initialized with the encoder state) -> per-step projection.
class LstmOdeModel : public Model {
public:
    LstmOdeModel(const LstmOdeConfig& config, std::uint64_t seed);

    Tensor forward(const Tensor& inputs, const std::vector<double>& t_norm) const override;
    std::vector<Parameter> parameters() const override;
    std::string kind() const override { return "lstm-ode"; }
    std::int64_t n_t() const override { return config_.n_t; }
    std::int64_t n_tau() const override { return config_.n_tau; }
    std::int64_t n_inputs() const override { return config_.n_inputs; }
    const LstmOdeConfig& config() const { return config_; }

    // Latent trajectory for a given input batch, [B, n_t, z].
    Tensor latent_trajectory(const Tensor& inputs, int substeps_override = 0) const;

private:
    Tensor encode(const Tensor& inputs, Lstm::Result& enc) const;

    LstmOdeConfig config_;
    Lstm encoder_;
    Lstm decoder_;
    Tensor attn_w_, attn_b_, attn_v_;  // additive attention with a learned query
    Tensor pool_w_, pool_b_;           // hidden -> latent
    std::vector<Tensor> field_w_, field_b_;
    Tensor proj_w_, proj_b_;           // hidden -> n_tau
};

// Pre-activation residual 1-D conv stack; interferometer delays are the
// channel axis, tau length is preserved throughout.
class ResNet1dModel : public Model {
public:
    ResNet1dModel(const ResNet1dConfig& config, std::uint64_t seed);

    Tensor forward(const Tensor& inputs, const std::vector<double>& t_norm) const override;
    std::vector<Parameter> parameters() const override;
    std::string kind() const override { return "resnet1d"; }
    std::int64_t n_t() const override { return config_.out_channels; }
    std::int64_t n_tau() const override { return config_.n_tau; }
    std::int64_t n_inputs() const override { return config_.in_channels; }
    const ResNet1dConfig& config() const { return config_; }

private:
    struct Block {
        Tensor w1, b1, w2, b2;
        Tensor proj;  // 1x1 channel-matching projection, undefined if unchanged
    };
    ResNet1dConfig config_;
    std::vector<Block> blocks_;
};

std::int64_t parameter_count(const Model& model);

}  // namespace g2node::models
