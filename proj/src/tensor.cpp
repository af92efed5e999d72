#include "g2node/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "g2node/errors.hpp"
#include "g2node/kernels.hpp"

namespace g2node::autodiff {

namespace {
thread_local bool g_grad_enabled = true;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : saved_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = saved_; }

std::string shape_str(const Shape& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(s[i]);
    }
    return out + "]";
}

std::int64_t shape_numel(const Shape& s) {
    std::int64_t n = 1;
    for (const auto d : s) n *= d;
    return n;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double fill, bool requires_grad) {
    Tensor t;
    t.d_ = std::make_shared<TensorData>();
    t.d_->shape = std::move(shape);
    t.d_->value.assign(static_cast<std::size_t>(shape_numel(t.d_->shape)), fill);
    t.d_->requires_grad = requires_grad;
    return t;
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    if (shape_numel(shape) != static_cast<std::int64_t>(values.size()))
        throw ShapeError("Tensor::from: " + std::to_string(values.size()) +
                         " values do not fill shape " + shape_str(shape));
    Tensor t;
    t.d_ = std::make_shared<TensorData>();
    t.d_->shape = std::move(shape);
    t.d_->value = std::move(values);
    t.d_->requires_grad = requires_grad;
    return t;
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

const std::vector<double>& Tensor::grad() const {
    if (d_->grad.empty())
        throw DataError("Tensor::grad: gradient has not been materialized");
    return d_->grad;
}

double Tensor::item() const {
    if (numel() != 1)
        throw ShapeError("Tensor::item: tensor of shape " + shape_str(shape()) +
                         " is not a scalar");
    return d_->value[0];
}

void Tensor::ensure_grad() const {
    if (d_->grad.empty()) d_->grad.assign(d_->value.size(), 0.0);
}

void Tensor::zero_grad() const { d_->grad.assign(d_->value.size(), 0.0); }

void Tensor::accumulate_grad(const double* g, std::size_t n) const {
    ensure_grad();
    kernels::axpy(1.0, g, d_->grad.data(), n);
}

Tensor Tensor::make(Shape shape, std::vector<double> values, const char* op,
                    std::vector<Tensor> inputs, std::function<void(TensorData&)> backward_fn) {
    Tensor out = Tensor::from(std::move(shape), std::move(values));
    bool needs_grad = false;
    if (g_grad_enabled) {
        for (const auto& in : inputs)
            if (in.requires_grad()) {
                needs_grad = true;
                break;
            }
    }
    if (needs_grad) {
        out.d_->requires_grad = true;
        out.d_->node = std::make_shared<Node>();
        out.d_->node->op = op;
        out.d_->node->inputs = std::move(inputs);
        out.d_->node->backward = std::move(backward_fn);
    }
    return out;
}

void backward(Tensor& loss) {
    if (loss.numel() != 1)
        throw ShapeError("backward: loss must be scalar, got shape " + shape_str(loss.shape()));

    // Iterative post-order DFS: inputs first, so the reversed order is a
    // valid reverse-topological sweep.
    std::vector<TensorData*> order;
    std::unordered_set<TensorData*> visited;
    struct Frame {
        TensorData* t;
        std::size_t next_input;
    };
    std::vector<Frame> stack;
    if (loss.data()->node) stack.push_back({loss.data(), 0});
    visited.insert(loss.data());
    while (!stack.empty()) {
        Frame& f = stack.back();
        Node& node = *f.t->node;
        if (f.next_input < node.inputs.size()) {
            TensorData* child = node.inputs[f.next_input].data();
            ++f.next_input;
            if (child->node && !visited.count(child)) {
                visited.insert(child);
                stack.push_back({child, 0});
            }
        } else {
            order.push_back(f.t);
            stack.pop_back();
        }
    }

    // Intermediate grads are scratch per sweep; leaf grads accumulate.
    for (TensorData* t : order) t->grad.assign(t->value.size(), 0.0);
    loss.ensure_grad();
    if (loss.data()->node)
        loss.data()->grad[0] = 1.0;
    else
        loss.data()->grad[0] += 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorData* t = *it;
        t->node->backward(*t);
    }
}

}  // namespace g2node::autodiff
