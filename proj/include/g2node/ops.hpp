#pragma once

#include "g2node/tensor.hpp"

// Differentiable core ops. Shapes are validated up front and mismatch
// errors always carry both shapes.
namespace g2node::autodiff::ops {

// [m,k] x [k,n] -> [m,n]
Tensor matmul(const Tensor& a, const Tensor& b);

// x[..., k] · w[n, k]^T + b[n]; pass an undefined bias to skip it.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double alpha);
Tensor add_scalar(const Tensor& a, double c);
// c - a
Tensor rsub_scalar(double c, const Tensor& a);

Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& a, int axis, std::int64_t start, std::int64_t length);
// 2-D transpose
Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, Shape shape);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor softmax(const Tensor& a, int axis);

// x[B, C_in, L], w[C_out, C_in, K] with odd K, stride 1, zero padding
// (K-1)/2 so L is preserved; optional bias [C_out].
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b);

Tensor mse(const Tensor& a, const Tensor& b);

// Attention pooling helper: sum_s w[b,s] * seq[b,s,h] -> [B,H].
Tensor weighted_sum_seq(const Tensor& seq, const Tensor& weights);

// Real part of the unnormalized DFT along axis 1 of [B, T, M]:
// out[b,k,m] = sum_n cos(2 pi k n / T) x[b,n,m]. Linear, self-adjoint.
Tensor cos_dft_time(const Tensor& x);

}  // namespace g2node::autodiff::ops
