#include "doctest.h"

#include <cmath>
#include <vector>

#include "g2node/errors.hpp"
#include "g2node/gradcheck.hpp"
#include "g2node/ode.hpp"
#include "g2node/ops.hpp"
#include "g2node/rng.hpp"

using namespace g2node;
using namespace g2node::autodiff;

namespace {

std::vector<double> uniform_grid(std::size_t n, double end) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = end * static_cast<double>(i) / static_cast<double>(n - 1);
    g.front() = 0.0;
    return g;
}

}  // namespace

TEST_CASE("zero field keeps the trajectory constant") {
    Tensor h0 = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
    const auto field = [](const Tensor& h, double) { return ops::scale(h, 0.0); };
    const Tensor traj = ode_solve(field, h0, uniform_grid(7, 1.0));
    CHECK(traj.shape() == Shape{2, 7, 3});
    for (std::int64_t b = 0; b < 2; ++b)
        for (std::int64_t i = 0; i < 7; ++i)
            for (std::int64_t j = 0; j < 3; ++j)
                CHECK(traj.value()[static_cast<std::size_t>((b * 7 + i) * 3 + j)] ==
                      h0.value()[static_cast<std::size_t>(b * 3 + j)]);
}

TEST_CASE("exponential decay reaches e^-1 within 1e-9 at 200 steps") {
    Tensor h0 = Tensor::from({1, 1}, {1.0});
    const auto field = [](const Tensor& h, double) { return ops::scale(h, -1.0); };
    const Tensor traj = ode_solve(field, h0, uniform_grid(201, 1.0));
    const double end = traj.value().back();
    CHECK(std::fabs(end - std::exp(-1.0)) < 1e-9);
}

TEST_CASE("step halving shows fourth-order convergence") {
    const auto field = [](const Tensor& h, double) { return ops::scale(h, -1.0); };
    const double exact = std::exp(-1.0);
    auto end_error = [&](std::size_t steps) {
        Tensor h0 = Tensor::from({1, 1}, {1.0});
        const Tensor traj = ode_solve(field, h0, uniform_grid(steps + 1, 1.0));
        return std::fabs(traj.value().back() - exact);
    };
    // error ratio ~ 16 per halving; measured order within [3.7, 4.3]
    const double e1 = end_error(5);
    const double e2 = end_error(10);
    const double e3 = end_error(20);
    const double order12 = std::log2(e1 / e2);
    const double order23 = std::log2(e2 / e3);
    CHECK(order12 > 3.7);
    CHECK(order12 < 4.3);
    CHECK(order23 > 3.7);
    CHECK(order23 < 4.3);
}

TEST_CASE("substeps refine without changing the grid") {
    Tensor h0 = Tensor::from({1, 1}, {1.0});
    const auto field = [](const Tensor& h, double) { return ops::scale(h, -1.0); };
    const double exact = std::exp(-1.0);
    const Tensor coarse = ode_solve(field, h0, uniform_grid(6, 1.0), 1);
    const Tensor fine = ode_solve(field, h0, uniform_grid(6, 1.0), 4);
    CHECK(coarse.shape() == fine.shape());
    CHECK(std::fabs(fine.value().back() - exact) < std::fabs(coarse.value().back() - exact));
}

TEST_CASE("invalid grids are rejected") {
    Tensor h0 = Tensor::from({1, 2}, {1.0, 2.0});
    const auto field = [](const Tensor& h, double) { return ops::scale(h, -1.0); };
    CHECK_THROWS_AS(ode_solve(field, h0, {0.0, 0.5, 0.4}), ConfigError);
    CHECK_THROWS_AS(ode_solve(field, h0, {0.1, 0.5}), ConfigError);
    CHECK_THROWS_AS(ode_solve(field, h0, {0.0}), ConfigError);
}

TEST_CASE("gradcheck through the solver with an MLP field") {
    rng::Stream s(21);
    const std::int64_t z = 4, hidden = 6;
    auto rand_tensor = [&](Shape shape) {
        std::vector<double> v(static_cast<std::size_t>(shape_numel(shape)));
        for (auto& x : v) x = s.uniform(-0.5, 0.5);
        return Tensor::from(std::move(shape), std::move(v), true);
    };
    Tensor w1 = rand_tensor({hidden, z});
    Tensor b1 = rand_tensor({hidden});
    Tensor w2 = rand_tensor({z, hidden});
    Tensor b2 = rand_tensor({z});
    Tensor h0 = rand_tensor({2, z});

    const auto field = [&](const Tensor& h, double) {
        return ops::linear(ops::tanh(ops::linear(h, w1, b1)), w2, b2);
    };
    const auto loss = [&] {
        const Tensor traj = ode_solve(field, h0, uniform_grid(6, 1.0));
        return ops::mse(traj, Tensor::zeros(traj.shape()));
    };
    const GradcheckReport report = gradcheck(
        loss, {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}, {"h0", h0}}, 1e-3);
    for (const auto& e : report.entries) {
        INFO("tensor ", e.name, " dev ", e.max_rel_dev);
        CHECK(e.pass);
    }
    CHECK(report.pass);
}
