#pragma once

#include <functional>
#include <vector>

#include "g2node/tensor.hpp"

namespace g2node::autodiff {

// dh/ds = f(h, s); h is [batch x z].
using VectorField = std::function<Tensor(const Tensor& h, double s)>;

// Classical RK4 with `substeps` fixed steps between consecutive grid
// points. The returned trajectory is [batch x n_s x z] and includes
// h(s_grid[0]) = h0. Gradients flow through every solver step
// (discretize-then-optimize).
Tensor ode_solve(const VectorField& field, const Tensor& h0, const std::vector<double>& s_grid,
                 int substeps = 1);

}  // namespace g2node::autodiff
