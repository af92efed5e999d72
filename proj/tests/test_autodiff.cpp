#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "g2node/errors.hpp"
#include "g2node/gradcheck.hpp"
#include "g2node/ops.hpp"
#include "g2node/rng.hpp"
#include "g2node/tensor.hpp"
#include "oracles.hpp"

using namespace g2node;
using namespace g2node::autodiff;

namespace {

Tensor random_tensor(rng::Stream& s, Shape shape, bool requires_grad = true,
                     double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(static_cast<std::size_t>(shape_numel(shape)));
    for (auto& x : v) x = s.uniform(lo, hi);
    return Tensor::from(std::move(shape), std::move(v), requires_grad);
}

void check_gradcheck(const std::function<Tensor()>& loss,
                     const std::vector<std::pair<std::string, Tensor>>& wrt,
                     double tol = 1e-4) {
    const GradcheckReport report = gradcheck(loss, wrt, tol);
    for (const auto& e : report.entries) {
        INFO("tensor ", e.name, " max_rel_dev ", e.max_rel_dev);
        CHECK(e.pass);
    }
    CHECK(report.pass);
    CHECK_FALSE(report.saw_nan);
}

}  // namespace

TEST_CASE("matmul against identity") {
    rng::Stream s(1);
    Tensor x = random_tensor(s, {4, 4});
    std::vector<double> id(16, 0.0);
    for (int i = 0; i < 4; ++i) id[static_cast<std::size_t>(i * 4 + i)] = 1.0;
    Tensor eye = Tensor::from({4, 4}, id);
    Tensor y = ops::matmul(eye, x);
    CHECK(y.value() == x.value());
    Tensor loss = ops::sum(y);
    backward(loss);
    for (double g : x.grad()) CHECK(g == 1.0);
}

TEST_CASE("sigmoid at zero") {
    Tensor x = Tensor::from({1}, {0.0}, true);
    Tensor y = ops::sigmoid(x);
    CHECK(y.item() == doctest::Approx(0.5));
    backward(y);
    CHECK(x.grad()[0] == doctest::Approx(0.25));
}

TEST_CASE("backward contracts") {
    rng::Stream s(2);
    SUBCASE("sum gives all-ones gradient") {
        Tensor x = random_tensor(s, {3, 5});
        Tensor loss = ops::sum(x);
        backward(loss);
        for (double g : x.grad()) CHECK(g == 1.0);
    }
    SUBCASE("disconnected tensors keep zero grad") {
        Tensor x = random_tensor(s, {2, 2});
        Tensor other = random_tensor(s, {2, 2});
        other.zero_grad();
        Tensor loss = ops::sum(ops::mul(x, x));
        backward(loss);
        for (double g : other.grad()) CHECK(g == 0.0);
    }
    SUBCASE("second backward doubles leaf grads exactly") {
        Tensor x = random_tensor(s, {4, 3});
        Tensor loss = ops::mse(ops::tanh(ops::scale(x, 1.3)), Tensor::zeros({4, 3}));
        backward(loss);
        const std::vector<double> once = x.grad();
        backward(loss);
        for (std::size_t i = 0; i < once.size(); ++i) CHECK(x.grad()[i] == 2.0 * once[i]);
    }
    SUBCASE("zero_grad clears exactly") {
        Tensor x = random_tensor(s, {4, 3});
        Tensor loss = ops::sum(ops::mul(x, x));
        backward(loss);
        x.zero_grad();
        for (double g : x.grad()) CHECK(g == 0.0);
    }
    SUBCASE("backward is bit-deterministic") {
        Tensor x = random_tensor(s, {6, 4});
        Tensor w = random_tensor(s, {4, 4});
        auto run = [&] {
            x.zero_grad();
            w.zero_grad();
            Tensor loss = ops::mse(ops::tanh(ops::matmul(x, w)), Tensor::zeros({6, 4}));
            backward(loss);
            return std::make_pair(x.grad(), w.grad());
        };
        const auto a = run();
        const auto b = run();
        CHECK(a.first == b.first);
        CHECK(a.second == b.second);
    }
    SUBCASE("non-scalar loss is rejected") {
        Tensor x = random_tensor(s, {2, 2});
        Tensor y = ops::scale(x, 2.0);
        CHECK_THROWS_AS(backward(y), ShapeError);
    }
}

TEST_CASE("shape errors carry both shapes") {
    Tensor a = Tensor::zeros({2, 3});
    Tensor b = Tensor::zeros({4, 5});
    try {
        ops::add(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[2, 3]") != std::string::npos);
        CHECK(msg.find("[4, 5]") != std::string::npos);
    }
    CHECK_THROWS_AS(ops::matmul(a, b), ShapeError);
    CHECK_THROWS_AS(ops::conv1d(Tensor::zeros({1, 2, 8}), Tensor::zeros({3, 2, 4}), Tensor()),
                    ShapeError);
}

TEST_CASE("gradcheck: matmul and linear") {
    rng::Stream s(3);
    struct Dims {
        std::int64_t m, k, n;
    };
    for (const auto d : {Dims{3, 4, 2}, Dims{1, 5, 3}, Dims{4, 2, 4}}) {
        Tensor a = random_tensor(s, {d.m, d.k});
        Tensor b = random_tensor(s, {d.k, d.n});
        check_gradcheck([&] { return ops::mse(ops::matmul(a, b), Tensor::zeros({d.m, d.n})); },
                        {{"a", a}, {"b", b}});
    }
    for (const auto d : {Dims{2, 3, 4}, Dims{5, 2, 2}, Dims{1, 4, 3}}) {
        Tensor x = random_tensor(s, {d.m, d.k});
        Tensor w = random_tensor(s, {d.n, d.k});
        Tensor b = random_tensor(s, {d.n});
        check_gradcheck(
            [&] { return ops::mean(ops::tanh(ops::linear(x, w, b))); },
            {{"x", x}, {"w", w}, {"b", b}});
    }
    // 3-d input through linear
    Tensor x3 = random_tensor(s, {2, 3, 4});
    Tensor w = random_tensor(s, {5, 4});
    Tensor b = random_tensor(s, {5});
    check_gradcheck([&] { return ops::mse(ops::linear(x3, w, b), Tensor::zeros({2, 3, 5})); },
                    {{"x3", x3}, {"w", w}, {"b", b}});
}

TEST_CASE("gradcheck: elementwise and scalar ops") {
    rng::Stream s(4);
    for (const Shape shape : {Shape{3}, Shape{2, 4}, Shape{2, 3, 2}}) {
        Tensor a = random_tensor(s, shape);
        Tensor b = random_tensor(s, shape);
        Tensor target = random_tensor(s, shape, false);
        check_gradcheck([&] { return ops::mse(ops::add(a, b), target); }, {{"a", a}, {"b", b}});
        check_gradcheck([&] { return ops::mse(ops::sub(a, b), target); }, {{"a", a}, {"b", b}});
        check_gradcheck([&] { return ops::mse(ops::mul(a, b), target); }, {{"a", a}, {"b", b}});
        check_gradcheck([&] { return ops::mse(ops::scale(a, -0.7), target); }, {{"a", a}});
        check_gradcheck([&] { return ops::mse(ops::add_scalar(a, 0.3), target); }, {{"a", a}});
        check_gradcheck([&] { return ops::mse(ops::rsub_scalar(1.0, a), target); }, {{"a", a}});
    }
}

TEST_CASE("gradcheck: activations") {
    rng::Stream s(5);
    for (const Shape shape : {Shape{4}, Shape{3, 3}, Shape{2, 2, 3}}) {
        Tensor a = random_tensor(s, shape, true, -2.0, 2.0);
        // keep relu inputs away from the kink
        for (auto& v : a.value_mut())
            if (std::fabs(v) < 0.05) v = 0.2;
        Tensor target = random_tensor(s, shape, false);
        check_gradcheck([&] { return ops::mse(ops::sigmoid(a), target); }, {{"a", a}});
        check_gradcheck([&] { return ops::mse(ops::tanh(a), target); }, {{"a", a}});
        check_gradcheck([&] { return ops::mse(ops::relu(a), target); }, {{"a", a}});
    }
}

TEST_CASE("gradcheck: softmax over each axis") {
    rng::Stream s(6);
    for (int axis = 0; axis < 3; ++axis) {
        Tensor a = random_tensor(s, {2, 3, 4}, true, -1.5, 1.5);
        Tensor target = random_tensor(s, {2, 3, 4}, false, 0.0, 1.0);
        check_gradcheck([&] { return ops::mse(ops::softmax(a, axis), target); }, {{"a", a}});
    }
    Tensor a2 = random_tensor(s, {5, 6});
    Tensor t2 = random_tensor(s, {5, 6}, false);
    check_gradcheck([&] { return ops::mse(ops::softmax(a2, 1), t2); }, {{"a2", a2}});
    // softmax outputs are probability vectors
    Tensor sm = ops::softmax(a2, 1);
    for (std::int64_t r = 0; r < 5; ++r) {
        double total = 0.0;
        for (std::int64_t c = 0; c < 6; ++c) {
            const double p = sm.value()[static_cast<std::size_t>(r * 6 + c)];
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gradcheck: shape ops") {
    rng::Stream s(7);
    for (int axis = 0; axis < 3; ++axis) {
        Tensor a = random_tensor(s, {2, 3, 4});
        Tensor b = random_tensor(s, {2, 3, 4});
        Shape cat_shape = {2, 3, 4};
        cat_shape[static_cast<std::size_t>(axis)] *= 2;
        Tensor target = random_tensor(s, cat_shape, false);
        check_gradcheck([&] { return ops::mse(ops::concat({a, b}, axis), target); },
                        {{"a", a}, {"b", b}});
    }
    Tensor a = random_tensor(s, {3, 6, 2});
    Tensor target = random_tensor(s, {3, 3, 2}, false);
    check_gradcheck([&] { return ops::mse(ops::slice(a, 1, 2, 3), target); }, {{"a", a}});

    Tensor m = random_tensor(s, {3, 5});
    Tensor tt = random_tensor(s, {5, 3}, false);
    check_gradcheck([&] { return ops::mse(ops::transpose(m), tt); }, {{"m", m}});

    Tensor r = random_tensor(s, {2, 6});
    Tensor rt = random_tensor(s, {3, 4}, false);
    check_gradcheck([&] { return ops::mse(ops::reshape(r, {3, 4}), rt); }, {{"r", r}});

    check_gradcheck([&] { return ops::sum(m); }, {{"m", m}});
    check_gradcheck([&] { return ops::mean(m); }, {{"m", m}});
}

TEST_CASE("gradcheck: conv1d") {
    rng::Stream s(8);
    struct Cfg {
        std::int64_t b, cin, cout, len, k;
    };
    for (const auto c : {Cfg{1, 1, 1, 6, 3}, Cfg{2, 3, 4, 7, 3}, Cfg{2, 2, 3, 5, 5}}) {
        Tensor x = random_tensor(s, {c.b, c.cin, c.len});
        Tensor w = random_tensor(s, {c.cout, c.cin, c.k});
        Tensor b = random_tensor(s, {c.cout});
        Tensor target = random_tensor(s, {c.b, c.cout, c.len}, false);
        check_gradcheck([&] { return ops::mse(ops::conv1d(x, w, b), target); },
                        {{"x", x}, {"w", w}, {"b", b}});
    }
    // length is preserved
    Tensor x = random_tensor(s, {2, 3, 11});
    Tensor w = random_tensor(s, {4, 3, 3});
    const Tensor y = ops::conv1d(x, w, Tensor());
    CHECK(y.shape() == Shape{2, 4, 11});
}

TEST_CASE("gradcheck: mse, weighted_sum_seq, cos_dft_time") {
    rng::Stream s(9);
    for (const Shape shape : {Shape{5}, Shape{3, 4}, Shape{2, 2, 2}}) {
        Tensor a = random_tensor(s, shape);
        Tensor b = random_tensor(s, shape);
        check_gradcheck([&] { return ops::mse(a, b); }, {{"a", a}, {"b", b}});
    }
    for (const Shape shape : {Shape{1, 3, 4}, Shape{2, 5, 3}, Shape{3, 2, 6}}) {
        Tensor seq = random_tensor(s, shape);
        Tensor w = random_tensor(s, {shape[0], shape[1]});
        Tensor target = random_tensor(s, {shape[0], shape[2]}, false);
        check_gradcheck([&] { return ops::mse(ops::weighted_sum_seq(seq, w), target); },
                        {{"seq", seq}, {"w", w}});
    }
    for (const Shape shape : {Shape{1, 4, 2}, Shape{2, 6, 3}, Shape{1, 8, 1}}) {
        Tensor x = random_tensor(s, shape);
        Tensor target = random_tensor(s, shape, false);
        check_gradcheck([&] { return ops::mse(ops::cos_dft_time(x), target); }, {{"x", x}});
    }
}

TEST_CASE("cos_dft_time equals the direct DFT oracle") {
    rng::Stream s(10);
    const std::int64_t T = 16, M = 3;
    Tensor x = random_tensor(s, {2, T, M}, false);
    const Tensor y = ops::cos_dft_time(x);
    for (std::int64_t b = 0; b < 2; ++b) {
        for (std::int64_t m = 0; m < M; ++m) {
            std::vector<double> column(static_cast<std::size_t>(T));
            for (std::int64_t n = 0; n < T; ++n)
                column[static_cast<std::size_t>(n)] =
                    x.value()[static_cast<std::size_t>((b * T + n) * M + m)];
            const std::vector<double> expected = oracles::direct_real_dft(column);
            for (std::int64_t k = 0; k < T; ++k) {
                const double got = y.value()[static_cast<std::size_t>((b * T + k) * M + m)];
                CHECK(got == doctest::Approx(expected[static_cast<std::size_t>(k)])
                                 .epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("no_grad suppresses graph construction") {
    rng::Stream s(11);
    Tensor x = random_tensor(s, {2, 2});
    {
        NoGradGuard guard;
        Tensor y = ops::mul(x, x);
        CHECK_FALSE(y.requires_grad());
        CHECK(y.data()->node == nullptr);
    }
    Tensor y = ops::mul(x, x);
    CHECK(y.requires_grad());
}
