#include "g2node/ops.hpp"

#include <cmath>
#include <cstring>
#include <numbers>

#include "g2node/errors.hpp"
#include "g2node/kernels.hpp"

namespace g2node::autodiff::ops {

namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
}

void require_ndim(const char* op, const Tensor& a, int ndim) {
    if (a.ndim() != ndim)
        throw ShapeError(std::string(op) + ": expected " + std::to_string(ndim) +
                         "-d tensor, got shape " + shape_str(a.shape()));
}

std::int64_t outer_extent(const Shape& s, int axis) {
    std::int64_t n = 1;
    for (int i = 0; i < axis; ++i) n *= s[static_cast<std::size_t>(i)];
    return n;
}

std::int64_t inner_extent(const Shape& s, int axis) {
    std::int64_t n = 1;
    for (std::size_t i = static_cast<std::size_t>(axis) + 1; i < s.size(); ++i) n *= s[i];
    return n;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_ndim("matmul", a, 2);
    require_ndim("matmul", b, 2);
    if (a.dim(1) != b.dim(0))
        throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    const std::size_t m = static_cast<std::size_t>(a.dim(0));
    const std::size_t k = static_cast<std::size_t>(a.dim(1));
    const std::size_t n = static_cast<std::size_t>(b.dim(1));
    std::vector<double> out(m * n);
    kernels::gemm_nn(m, n, k, a.value().data(), b.value().data(), out.data(), false);
    return Tensor::make(
        {a.dim(0), b.dim(1)}, std::move(out), "matmul", {a, b}, [a, b, m, n, k](TensorData& o) mutable {
            if (a.requires_grad()) {
                a.ensure_grad();
                kernels::gemm_nt(m, k, n, o.grad.data(), b.value().data(),
                                 a.data()->grad.data(), true);
            }
            if (b.requires_grad()) {
                b.ensure_grad();
                kernels::gemm_tn(k, n, m, a.value().data(), o.grad.data(),
                                 b.data()->grad.data(), true);
            }
        });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
    require_ndim("linear", w, 2);
    if (x.ndim() < 1 || x.dim(x.ndim() - 1) != w.dim(1))
        throw ShapeError("linear: input shape " + shape_str(x.shape()) +
                         " does not match weight shape " + shape_str(w.shape()));
    const std::size_t k = static_cast<std::size_t>(w.dim(1));
    const std::size_t n = static_cast<std::size_t>(w.dim(0));
    const std::size_t rows = static_cast<std::size_t>(x.numel()) / k;
    if (b.defined() && (b.ndim() != 1 || b.dim(0) != w.dim(0)))
        throw ShapeError("linear: bias shape " + shape_str(b.shape()) +
                         " does not match weight shape " + shape_str(w.shape()));

    std::vector<double> out(rows * n);
    kernels::gemm_nt(rows, n, k, x.value().data(), w.value().data(), out.data(), false);
    if (b.defined()) {
        const double* bias = b.value().data();
        for (std::size_t r = 0; r < rows; ++r)
            kernels::axpy(1.0, bias, out.data() + r * n, n);
    }
    Shape out_shape = x.shape();
    out_shape.back() = w.dim(0);
    std::vector<Tensor> inputs = b.defined() ? std::vector<Tensor>{x, w, b}
                                             : std::vector<Tensor>{x, w};
    return Tensor::make(std::move(out_shape), std::move(out), "linear", std::move(inputs),
                        [x, w, b, rows, n, k](TensorData& o) mutable {
                            if (x.requires_grad()) {
                                x.ensure_grad();
                                kernels::gemm_nn(rows, k, n, o.grad.data(), w.value().data(),
                                                 x.data()->grad.data(), true);
                            }
                            if (w.requires_grad()) {
                                w.ensure_grad();
                                kernels::gemm_tn(n, k, rows, o.grad.data(), x.value().data(),
                                                 w.data()->grad.data(), true);
                            }
                            if (b.defined() && b.requires_grad()) {
                                b.ensure_grad();
                                double* db = b.data()->grad.data();
                                for (std::size_t r = 0; r < rows; ++r)
                                    kernels::axpy(1.0, o.grad.data() + r * n, db, n);
                            }
                        });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape("add", a, b);
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    kernels::add(a.value().data(), b.value().data(), out.data(), n);
    return Tensor::make(a.shape(), std::move(out), "add", {a, b}, [a, b, n](TensorData& o) mutable {
        if (a.requires_grad()) a.accumulate_grad(o.grad.data(), n);
        if (b.requires_grad()) b.accumulate_grad(o.grad.data(), n);
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape("sub", a, b);
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    kernels::sub(a.value().data(), b.value().data(), out.data(), n);
    return Tensor::make(a.shape(), std::move(out), "sub", {a, b}, [a, b, n](TensorData& o) mutable {
        if (a.requires_grad()) a.accumulate_grad(o.grad.data(), n);
        if (b.requires_grad()) {
            b.ensure_grad();
            kernels::axpy(-1.0, o.grad.data(), b.data()->grad.data(), n);
        }
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape("mul", a, b);
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    kernels::mul(a.value().data(), b.value().data(), out.data(), n);
    return Tensor::make(a.shape(), std::move(out), "mul", {a, b}, [a, b, n](TensorData& o) mutable {
        if (a.requires_grad()) {
            a.ensure_grad();
            double* da = a.data()->grad.data();
            const double* g = o.grad.data();
            const double* bv = b.value().data();
            for (std::size_t i = 0; i < n; ++i) da[i] += g[i] * bv[i];
        }
        if (b.requires_grad()) {
            b.ensure_grad();
            double* db = b.data()->grad.data();
            const double* g = o.grad.data();
            const double* av = a.value().data();
            for (std::size_t i = 0; i < n; ++i) db[i] += g[i] * av[i];
        }
    });
}

Tensor scale(const Tensor& a, double alpha) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    kernels::scale(a.value().data(), alpha, out.data(), n);
    return Tensor::make(a.shape(), std::move(out), "scale", {a}, [a, alpha, n](TensorData& o) mutable {
        if (a.requires_grad()) {
            a.ensure_grad();
            kernels::axpy(alpha, o.grad.data(), a.data()->grad.data(), n);
        }
    });
}

Tensor add_scalar(const Tensor& a, double c) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a.value()[i] + c;
    return Tensor::make(a.shape(), std::move(out), "add_scalar", {a}, [a, n](TensorData& o) mutable {
        if (a.requires_grad()) a.accumulate_grad(o.grad.data(), n);
    });
}

Tensor rsub_scalar(double c, const Tensor& a) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = c - a.value()[i];
    return Tensor::make(a.shape(), std::move(out), "rsub_scalar", {a}, [a, n](TensorData& o) mutable {
        if (a.requires_grad()) {
            a.ensure_grad();
            kernels::axpy(-1.0, o.grad.data(), a.data()->grad.data(), n);
        }
    });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    const int nd = parts[0].ndim();
    if (axis < 0 || axis >= nd)
        throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(parts[0].shape()));
    Shape out_shape = parts[0].shape();
    std::int64_t total_axis = 0;
    for (const auto& p : parts) {
        if (p.ndim() != nd)
            throw ShapeError("concat: rank mismatch " + shape_str(parts[0].shape()) + " vs " +
                             shape_str(p.shape()));
        for (int i = 0; i < nd; ++i)
            if (i != axis && p.dim(i) != out_shape[static_cast<std::size_t>(i)])
                throw ShapeError("concat: shape mismatch " + shape_str(parts[0].shape()) +
                                 " vs " + shape_str(p.shape()));
        total_axis += p.dim(axis);
    }
    out_shape[static_cast<std::size_t>(axis)] = total_axis;

    const std::int64_t outer = outer_extent(out_shape, axis);
    const std::int64_t inner = inner_extent(out_shape, axis);
    std::vector<double> out(static_cast<std::size_t>(shape_numel(out_shape)));
    std::int64_t offset = 0;
    for (const auto& p : parts) {
        const std::int64_t block = p.dim(axis) * inner;
        const double* src = p.value().data();
        for (std::int64_t r = 0; r < outer; ++r)
            std::memcpy(out.data() + r * total_axis * inner + offset, src + r * block,
                        static_cast<std::size_t>(block) * sizeof(double));
        offset += block;
    }
    return Tensor::make(out_shape, std::move(out), "concat", parts,
                        [parts, outer, inner, total_axis](TensorData& o) mutable {
                            std::int64_t off = 0;
                            for (auto& p : parts) {
                                const std::int64_t pblock = p.numel() / outer;
                                if (p.requires_grad()) {
                                    p.ensure_grad();
                                    double* dst = p.data()->grad.data();
                                    for (std::int64_t r = 0; r < outer; ++r)
                                        kernels::axpy(1.0,
                                                      o.grad.data() + r * total_axis * inner + off,
                                                      dst + r * pblock,
                                                      static_cast<std::size_t>(pblock));
                                }
                                off += pblock;
                            }
                        });
}

Tensor slice(const Tensor& a, int axis, std::int64_t start, std::int64_t length) {
    if (axis < 0 || axis >= a.ndim())
        throw ShapeError("slice: axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(a.shape()));
    const std::int64_t extent = a.dim(axis);
    if (start < 0 || length < 1 || start + length > extent)
        throw ShapeError("slice: range [" + std::to_string(start) + ", " +
                         std::to_string(start + length) + ") exceeds axis extent " +
                         std::to_string(extent) + " of shape " + shape_str(a.shape()));
    Shape out_shape = a.shape();
    out_shape[static_cast<std::size_t>(axis)] = length;
    const std::int64_t outer = outer_extent(a.shape(), axis);
    const std::int64_t inner = inner_extent(a.shape(), axis);
    std::vector<double> out(static_cast<std::size_t>(shape_numel(out_shape)));
    for (std::int64_t r = 0; r < outer; ++r)
        std::memcpy(out.data() + r * length * inner,
                    a.value().data() + (r * extent + start) * inner,
                    static_cast<std::size_t>(length * inner) * sizeof(double));
    return Tensor::make(out_shape, std::move(out), "slice", {a},
                        [a, axis, start, length, outer, inner, extent](TensorData& o) mutable {
                            if (!a.requires_grad()) return;
                            a.ensure_grad();
                            double* dst = a.data()->grad.data();
                            for (std::int64_t r = 0; r < outer; ++r)
                                kernels::axpy(1.0, o.grad.data() + r * length * inner,
                                              dst + (r * extent + start) * inner,
                                              static_cast<std::size_t>(length * inner));
                        });
}

Tensor transpose(const Tensor& a) {
    require_ndim("transpose", a, 2);
    const std::int64_t m = a.dim(0), n = a.dim(1);
    std::vector<double> out(static_cast<std::size_t>(m * n));
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < n; ++j) out[j * m + i] = a.value()[i * n + j];
    return Tensor::make({n, m}, std::move(out), "transpose", {a}, [a, m, n](TensorData& o) mutable {
        if (!a.requires_grad()) return;
        a.ensure_grad();
        double* dst = a.data()->grad.data();
        for (std::int64_t i = 0; i < m; ++i)
            for (std::int64_t j = 0; j < n; ++j) dst[i * n + j] += o.grad[j * m + i];
    });
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (shape_numel(shape) != a.numel())
        throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " +
                         shape_str(shape));
    std::vector<double> out = a.value();
    const std::size_t n = out.size();
    return Tensor::make(std::move(shape), std::move(out), "reshape", {a}, [a, n](TensorData& o) mutable {
        if (a.requires_grad()) a.accumulate_grad(o.grad.data(), n);
    });
}

Tensor sum(const Tensor& a) {
    double acc = 0.0;
    for (const double v : a.value()) acc += v;
    const std::size_t n = static_cast<std::size_t>(a.numel());
    return Tensor::make({1}, {acc}, "sum", {a}, [a, n](TensorData& o) mutable {
        if (!a.requires_grad()) return;
        a.ensure_grad();
        const double g = o.grad[0];
        double* dst = a.data()->grad.data();
        for (std::size_t i = 0; i < n; ++i) dst[i] += g;
    });
}

Tensor mean(const Tensor& a) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    double acc = 0.0;
    for (const double v : a.value()) acc += v;
    acc /= static_cast<double>(n);
    return Tensor::make({1}, {acc}, "mean", {a}, [a, n](TensorData& o) mutable {
        if (!a.requires_grad()) return;
        a.ensure_grad();
        const double g = o.grad[0] / static_cast<double>(n);
        double* dst = a.data()->grad.data();
        for (std::size_t i = 0; i < n; ++i) dst[i] += g;
    });
}

Tensor sigmoid(const Tensor& a) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-a.value()[i]));
    return Tensor::make(a.shape(), std::move(out), "sigmoid", {a}, [a, n](TensorData& o) mutable {
        if (!a.requires_grad()) return;
        a.ensure_grad();
        double* dst = a.data()->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            const double y = o.value[i];
            dst[i] += o.grad[i] * y * (1.0 - y);
        }
    });
}

Tensor tanh(const Tensor& a) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(a.value()[i]);
    return Tensor::make(a.shape(), std::move(out), "tanh", {a}, [a, n](TensorData& o) mutable {
        if (!a.requires_grad()) return;
        a.ensure_grad();
        double* dst = a.data()->grad.data();
        for (std::size_t i = 0; i < n; ++i) {
            const double y = o.value[i];
            dst[i] += o.grad[i] * (1.0 - y * y);
        }
    });
}

Tensor relu(const Tensor& a) {
    const std::size_t n = static_cast<std::size_t>(a.numel());
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a.value()[i] > 0.0 ? a.value()[i] : 0.0;
    return Tensor::make(a.shape(), std::move(out), "relu", {a}, [a, n](TensorData& o) mutable {
        if (!a.requires_grad()) return;
        a.ensure_grad();
        double* dst = a.data()->grad.data();
        const double* x = a.value().data();
        for (std::size_t i = 0; i < n; ++i)
            if (x[i] > 0.0) dst[i] += o.grad[i];
    });
}

Tensor softmax(const Tensor& a, int axis) {
    if (axis < 0 || axis >= a.ndim())
        throw ShapeError("softmax: axis " + std::to_string(axis) + " out of range for shape " +
                         shape_str(a.shape()));
    const std::int64_t outer = outer_extent(a.shape(), axis);
    const std::int64_t extent = a.dim(axis);
    const std::int64_t inner = inner_extent(a.shape(), axis);
    std::vector<double> out(static_cast<std::size_t>(a.numel()));
    const double* x = a.value().data();
    for (std::int64_t r = 0; r < outer; ++r) {
        for (std::int64_t c = 0; c < inner; ++c) {
            const std::int64_t base = r * extent * inner + c;
            double mx = x[base];
            for (std::int64_t j = 1; j < extent; ++j)
                mx = std::max(mx, x[base + j * inner]);
            double denom = 0.0;
            for (std::int64_t j = 0; j < extent; ++j) {
                const double e = std::exp(x[base + j * inner] - mx);
                out[static_cast<std::size_t>(base + j * inner)] = e;
                denom += e;
            }
            for (std::int64_t j = 0; j < extent; ++j)
                out[static_cast<std::size_t>(base + j * inner)] /= denom;
        }
    }
    return Tensor::make(a.shape(), std::move(out), "softmax", {a},
                        [a, outer, extent, inner](TensorData& o) mutable {
                            if (!a.requires_grad()) return;
                            a.ensure_grad();
                            double* dst = a.data()->grad.data();
                            for (std::int64_t r = 0; r < outer; ++r) {
                                for (std::int64_t c = 0; c < inner; ++c) {
                                    const std::int64_t base = r * extent * inner + c;
                                    double dot = 0.0;
                                    for (std::int64_t j = 0; j < extent; ++j) {
                                        const auto idx = static_cast<std::size_t>(base + j * inner);
                                        dot += o.grad[idx] * o.value[idx];
                                    }
                                    for (std::int64_t j = 0; j < extent; ++j) {
                                        const auto idx = static_cast<std::size_t>(base + j * inner);
                                        dst[idx] += o.value[idx] * (o.grad[idx] - dot);
                                    }
                                }
                            }
                        });
}

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b) {
    require_ndim("conv1d", x, 3);
    require_ndim("conv1d", w, 3);
    if (x.dim(1) != w.dim(1))
        throw ShapeError("conv1d: channel mismatch, input " + shape_str(x.shape()) +
                         " vs weight " + shape_str(w.shape()));
    const std::int64_t kernel = w.dim(2);
    if (kernel % 2 == 0)
        throw ShapeError("conv1d: kernel length must be odd, weight shape " +
                         shape_str(w.shape()));
    if (b.defined() && (b.ndim() != 1 || b.dim(0) != w.dim(0)))
        throw ShapeError("conv1d: bias shape " + shape_str(b.shape()) +
                         " does not match weight shape " + shape_str(w.shape()));
    const std::int64_t batch = x.dim(0);
    const std::int64_t c_in = x.dim(1);
    const std::int64_t len = x.dim(2);
    const std::int64_t c_out = w.dim(0);
    const std::int64_t pad = kernel / 2;

    std::vector<double> out(static_cast<std::size_t>(batch * c_out * len), 0.0);
    for (std::int64_t bi = 0; bi < batch; ++bi) {
        for (std::int64_t co = 0; co < c_out; ++co) {
            double* y = out.data() + (bi * c_out + co) * len;
            if (b.defined()) {
                const double bias = b.value()[static_cast<std::size_t>(co)];
                for (std::int64_t l = 0; l < len; ++l) y[l] = bias;
            }
            for (std::int64_t ci = 0; ci < c_in; ++ci) {
                const double* xs = x.value().data() + (bi * c_in + ci) * len;
                const double* ws = w.value().data() + (co * c_in + ci) * kernel;
                for (std::int64_t t = 0; t < kernel; ++t) {
                    const std::int64_t shift = t - pad;
                    const std::int64_t lo = std::max<std::int64_t>(0, -shift);
                    const std::int64_t hi = std::min<std::int64_t>(len, len - shift);
                    if (hi > lo)
                        kernels::axpy(ws[t], xs + lo + shift, y + lo,
                                      static_cast<std::size_t>(hi - lo));
                }
            }
        }
    }

    std::vector<Tensor> inputs = b.defined() ? std::vector<Tensor>{x, w, b}
                                             : std::vector<Tensor>{x, w};
    return Tensor::make(
        {batch, c_out, len}, std::move(out), "conv1d", std::move(inputs),
        [x, w, b, batch, c_in, c_out, len, kernel, pad](TensorData& o) mutable {
            if (x.requires_grad()) x.ensure_grad();
            if (w.requires_grad()) w.ensure_grad();
            if (b.defined() && b.requires_grad()) b.ensure_grad();
            for (std::int64_t bi = 0; bi < batch; ++bi) {
                for (std::int64_t co = 0; co < c_out; ++co) {
                    const double* gy = o.grad.data() + (bi * c_out + co) * len;
                    if (b.defined() && b.requires_grad()) {
                        double acc = 0.0;
                        for (std::int64_t l = 0; l < len; ++l) acc += gy[l];
                        b.data()->grad[static_cast<std::size_t>(co)] += acc;
                    }
                    for (std::int64_t ci = 0; ci < c_in; ++ci) {
                        const double* xs = x.value().data() + (bi * c_in + ci) * len;
                        const double* ws = w.value().data() + (co * c_in + ci) * kernel;
                        for (std::int64_t t = 0; t < kernel; ++t) {
                            const std::int64_t shift = t - pad;
                            const std::int64_t lo = std::max<std::int64_t>(0, -shift);
                            const std::int64_t hi = std::min<std::int64_t>(len, len - shift);
                            if (hi <= lo) continue;
                            if (x.requires_grad()) {
                                double* gx = x.data()->grad.data() + (bi * c_in + ci) * len;
                                kernels::axpy(ws[t], gy + lo, gx + lo + shift,
                                              static_cast<std::size_t>(hi - lo));
                            }
                            if (w.requires_grad()) {
                                w.data()->grad[static_cast<std::size_t>((co * c_in + ci) * kernel +
                                                                        t)] +=
                                    kernels::dot(gy + lo, xs + lo + shift,
                                                 static_cast<std::size_t>(hi - lo));
                            }
                        }
                    }
                }
            }
        });
}

Tensor mse(const Tensor& a, const Tensor& b) {
    require_same_shape("mse", a, b);
    const std::size_t n = static_cast<std::size_t>(a.numel());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.value()[i] - b.value()[i];
        acc += d * d;
    }
    acc /= static_cast<double>(n);
    return Tensor::make({1}, {acc}, "mse", {a, b}, [a, b, n](TensorData& o) mutable {
        const double g = 2.0 * o.grad[0] / static_cast<double>(n);
        if (a.requires_grad()) a.ensure_grad();
        if (b.requires_grad()) b.ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
            const double d = g * (a.value()[i] - b.value()[i]);
            if (a.requires_grad()) a.data()->grad[i] += d;
            if (b.requires_grad()) b.data()->grad[i] -= d;
        }
    });
}

Tensor weighted_sum_seq(const Tensor& seq, const Tensor& weights) {
    require_ndim("weighted_sum_seq", seq, 3);
    require_ndim("weighted_sum_seq", weights, 2);
    if (seq.dim(0) != weights.dim(0) || seq.dim(1) != weights.dim(1))
        throw ShapeError("weighted_sum_seq: shapes " + shape_str(seq.shape()) + " and " +
                         shape_str(weights.shape()) + " disagree");
    const std::int64_t batch = seq.dim(0), steps = seq.dim(1), width = seq.dim(2);
    std::vector<double> out(static_cast<std::size_t>(batch * width), 0.0);
    for (std::int64_t bi = 0; bi < batch; ++bi) {
        double* y = out.data() + bi * width;
        for (std::int64_t s = 0; s < steps; ++s)
            kernels::axpy(weights.value()[static_cast<std::size_t>(bi * steps + s)],
                          seq.value().data() + (bi * steps + s) * width, y,
                          static_cast<std::size_t>(width));
    }
    return Tensor::make({batch, width}, std::move(out), "weighted_sum_seq", {seq, weights},
                        [seq, weights, batch, steps, width](TensorData& o) mutable {
                            if (seq.requires_grad()) seq.ensure_grad();
                            if (weights.requires_grad()) weights.ensure_grad();
                            for (std::int64_t bi = 0; bi < batch; ++bi) {
                                const double* gy = o.grad.data() + bi * width;
                                for (std::int64_t s = 0; s < steps; ++s) {
                                    const auto widx = static_cast<std::size_t>(bi * steps + s);
                                    if (seq.requires_grad())
                                        kernels::axpy(weights.value()[widx], gy,
                                                      seq.data()->grad.data() +
                                                          (bi * steps + s) * width,
                                                      static_cast<std::size_t>(width));
                                    if (weights.requires_grad())
                                        weights.data()->grad[widx] += kernels::dot(
                                            gy, seq.value().data() + (bi * steps + s) * width,
                                            static_cast<std::size_t>(width));
                                }
                            }
                        });
}

Tensor cos_dft_time(const Tensor& x) {
    require_ndim("cos_dft_time", x, 3);
    const std::int64_t batch = x.dim(0), steps = x.dim(1), width = x.dim(2);
    const std::size_t t = static_cast<std::size_t>(steps);
    std::vector<double> basis(t * t);
    for (std::size_t k = 0; k < t; ++k)
        for (std::size_t n = 0; n < t; ++n)
            basis[k * t + n] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) *
                                        static_cast<double>(n) / static_cast<double>(t));
    std::vector<double> out(static_cast<std::size_t>(x.numel()));
    for (std::int64_t bi = 0; bi < batch; ++bi)
        kernels::gemm_nn(t, static_cast<std::size_t>(width), t, basis.data(),
                         x.value().data() + bi * steps * width,
                         out.data() + bi * steps * width, false);
    return Tensor::make(x.shape(), std::move(out), "cos_dft_time", {x},
                        [x, basis = std::move(basis), batch, steps, width, t](TensorData& o) mutable {
                            if (!x.requires_grad()) return;
                            x.ensure_grad();
                            // the cosine basis is symmetric, C^T = C
                            for (std::int64_t bi = 0; bi < batch; ++bi)
                                kernels::gemm_nn(t, static_cast<std::size_t>(width), t,
                                                 basis.data(), o.grad.data() + bi * steps * width,
                                                 x.data()->grad.data() + bi * steps * width, true);
                        });
}

}  // namespace g2node::autodiff::ops
