#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace g2node::autodiff {

using Shape = std::vector<std::int64_t>;

std::string shape_str(const Shape& s);
std::int64_t shape_numel(const Shape& s);

class Tensor;
struct TensorData;

// Producing-operation record. The backward closure reads the output's
// grad and accumulates into the inputs' grads; it receives the output
// data by reference instead of capturing it, keeping the graph acyclic
// for shared_ptr ownership.
struct Node {
    const char* op = "";
    std::vector<Tensor> inputs;
    std::function<void(TensorData& out)> backward;
};

struct TensorData {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // allocated lazily, same shape as value
    bool requires_grad = false;
    std::shared_ptr<Node> node;
};

// Value-semantics handle onto a shared graph node.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double fill, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double v);

    bool defined() const { return static_cast<bool>(d_); }
    const Shape& shape() const { return d_->shape; }
    int ndim() const { return static_cast<int>(d_->shape.size()); }
    std::int64_t dim(int i) const { return d_->shape[static_cast<std::size_t>(i)]; }
    std::int64_t numel() const { return static_cast<std::int64_t>(d_->value.size()); }

    const std::vector<double>& value() const { return d_->value; }
    // Direct mutation is for optimizers and data loading only; mutating a
    // tensor inside a live graph invalidates recorded forward values.
    std::vector<double>& value_mut() { return d_->value; }

    bool requires_grad() const { return d_->requires_grad; }
    const std::vector<double>& grad() const;
    bool has_grad() const { return !d_->grad.empty(); }

    double item() const;

    // A Tensor is a handle; gradient mutation through a const handle is
    // what backward closures do, so these are shallow-const.
    void ensure_grad() const;
    void zero_grad() const;
    void accumulate_grad(const double* g, std::size_t n) const;

    TensorData* data() const { return d_.get(); }
    const std::shared_ptr<TensorData>& handle() const { return d_; }

    // Internal: construct an op result.
    static Tensor make(Shape shape, std::vector<double> values, const char* op,
                       std::vector<Tensor> inputs,
                       std::function<void(TensorData&)> backward_fn);

private:
    std::shared_ptr<TensorData> d_;
};

// Named trainable tensor.
struct Parameter {
    std::string name;
    Tensor tensor;
};

// Reverse-mode sweep from a scalar loss. Repeated calls without
// zero_grad accumulate leaf gradients; intermediate grads are cleared
// per sweep.
void backward(Tensor& loss);

bool grad_enabled();
struct NoGradGuard {
    NoGradGuard();
    ~NoGradGuard();

private:
    bool saved_;
};

}  // namespace g2node::autodiff
