#include "g2node/ode.hpp"

#include <string>

#include "g2node/errors.hpp"
#include "g2node/ops.hpp"

namespace g2node::autodiff {

Tensor ode_solve(const VectorField& field, const Tensor& h0, const std::vector<double>& s_grid,
                 int substeps) {
    if (h0.ndim() != 2)
        throw ShapeError("ode_solve: initial state must be [batch x z], got " +
                         shape_str(h0.shape()));
    if (s_grid.size() < 2) throw ConfigError("ode_solve: need at least two grid points");
    if (s_grid.front() != 0.0) throw ConfigError("ode_solve: grid must start at 0");
    for (std::size_t i = 1; i < s_grid.size(); ++i)
        if (!(s_grid[i] > s_grid[i - 1]))
            throw ConfigError("ode_solve: grid must be strictly increasing at index " +
                              std::to_string(i));
    if (substeps < 1) throw ConfigError("ode_solve: substeps must be >= 1");

    const std::int64_t batch = h0.dim(0);
    const std::int64_t z = h0.dim(1);
    std::vector<Tensor> states;
    states.reserve(s_grid.size());
    Tensor h = h0;
    states.push_back(ops::reshape(h, {batch, 1, z}));
    for (std::size_t i = 1; i < s_grid.size(); ++i) {
        const double dt = (s_grid[i] - s_grid[i - 1]) / static_cast<double>(substeps);
        double s = s_grid[i - 1];
        for (int sub = 0; sub < substeps; ++sub) {
            const Tensor k1 = field(h, s);
            const Tensor k2 = field(ops::add(h, ops::scale(k1, dt / 2.0)), s + dt / 2.0);
            const Tensor k3 = field(ops::add(h, ops::scale(k2, dt / 2.0)), s + dt / 2.0);
            const Tensor k4 = field(ops::add(h, ops::scale(k3, dt)), s + dt);
            const Tensor mid = ops::scale(ops::add(k2, k3), 2.0);
            const Tensor incr = ops::add(ops::add(k1, k4), mid);
            h = ops::add(h, ops::scale(incr, dt / 6.0));
            s += dt;
        }
        states.push_back(ops::reshape(h, {batch, 1, z}));
    }
    return ops::concat(states, 1);
}

}  // namespace g2node::autodiff
