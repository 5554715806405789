#include "trexd/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace trexd {

Tensor Gradients::at(Value v) const {
    if (v.node < 0 || static_cast<std::size_t>(v.node) >= shapes_.size()) {
        throw ContractError("gradient requested for a value not on this tape");
    }
    const Tensor& ref = shapes_[v.node];
    const auto& g = grads_[v.node];
    if (g.empty()) return Tensor::zeros(ref.shape());
    return Tensor(ref.shape(), g);
}

int Tape::check(Value v) const {
    if (v.node < 0 || static_cast<std::size_t>(v.node) >= nodes_.size()) {
        throw ContractError("value does not belong to this tape");
    }
    return v.node;
}

Value Tape::push(Tensor value, BackwardFn fn) {
    nodes_.push_back(Node{std::move(value), std::move(fn)});
    return Value{static_cast<int>(nodes_.size()) - 1};
}

std::vector<double>& Tape::accum(std::vector<std::vector<double>>& grads, int node, std::size_t n) {
    auto& g = grads[node];
    if (g.empty()) g.assign(n, 0.0);
    return g;
}

Value Tape::leaf(Tensor v) { return push(std::move(v), nullptr); }

Value Tape::add(Value a, Value b) {
    const int ia = check(a), ib = check(b);
    Tensor out = trexd::add(nodes_[ia].value, nodes_[ib].value);
    const std::size_t n = out.size();
    return push(std::move(out), [ia, ib, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        auto& gb = accum(grads, ib, n);
        for (std::size_t i = 0; i < n; ++i) {
            ga[i] += g[i];
            gb[i] += g[i];
        }
    });
}

Value Tape::sub(Value a, Value b) {
    const int ia = check(a), ib = check(b);
    Tensor out = trexd::sub(nodes_[ia].value, nodes_[ib].value);
    const std::size_t n = out.size();
    return push(std::move(out), [ia, ib, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        auto& gb = accum(grads, ib, n);
        for (std::size_t i = 0; i < n; ++i) {
            ga[i] += g[i];
            gb[i] -= g[i];
        }
    });
}

Value Tape::mul(Value a, Value b) {
    const int ia = check(a), ib = check(b);
    const Tensor va = nodes_[ia].value, vb = nodes_[ib].value;
    Tensor out = trexd::mul(va, vb);
    const std::size_t n = out.size();
    return push(std::move(out), [ia, ib, va, vb, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        auto& gb = accum(grads, ib, n);
        for (std::size_t i = 0; i < n; ++i) {
            ga[i] += g[i] * vb[i];
            gb[i] += g[i] * va[i];
        }
    });
}

Value Tape::affine(Value a, double s, double c) {
    const int ia = check(a);
    Tensor out = trexd::map(nodes_[ia].value, [s, c](double x) { return s * x + c; });
    const std::size_t n = out.size();
    return push(std::move(out), [ia, s, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        for (std::size_t i = 0; i < n; ++i) ga[i] += s * g[i];
    });
}

namespace {

// Elementwise op with derivative expressed in terms of the output value.
template <typename F, typename DF>
std::pair<Tensor, std::vector<double>> eval_unary(const Tensor& in, F f, DF df_from_out) {
    std::vector<double> out(in.size()), deriv(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = f(in[i]);
        deriv[i] = df_from_out(in[i], out[i]);
    }
    return {Tensor(in.shape(), std::move(out)), std::move(deriv)};
}

}  // namespace

#define TREXD_UNARY_BODY(fexpr, dexpr)                                                   \
    const int ia = check(a);                                                              \
    auto [out, deriv] = eval_unary(                                                       \
        nodes_[ia].value, [](double x) { return (fexpr); },                               \
        [](double x, double y) {                                                          \
            (void)x;                                                                      \
            (void)y;                                                                      \
            return (dexpr);                                                               \
        });                                                                               \
    const std::size_t n = out.size();                                                     \
    return push(std::move(out),                                                           \
                [ia, d = std::move(deriv), n](const std::vector<double>& g, auto& grads) { \
                    auto& ga = accum(grads, ia, n);                                       \
                    for (std::size_t i = 0; i < n; ++i) ga[i] += d[i] * g[i];             \
                })

Value Tape::relu(Value a) { TREXD_UNARY_BODY(x > 0.0 ? x : 0.0, x > 0.0 ? 1.0 : 0.0); }

Value Tape::tanh(Value a) { TREXD_UNARY_BODY(std::tanh(x), 1.0 - y * y); }

Value Tape::sigmoid(Value a) {
    TREXD_UNARY_BODY(x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)),
                     y * (1.0 - y));
}

Value Tape::exp(Value a) { TREXD_UNARY_BODY(std::exp(x), y); }

Value Tape::log(Value a) { TREXD_UNARY_BODY(std::log(x), 1.0 / x); }

Value Tape::softplus(Value a) {
    // log(1 + e^x) computed as max(x,0) + log1p(e^-|x|)
    TREXD_UNARY_BODY(std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))),
                     x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)));
}

Value Tape::square(Value a) { TREXD_UNARY_BODY(x * x, 2.0 * x); }

Value Tape::abs(Value a) { TREXD_UNARY_BODY(std::abs(x), x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0)); }

#undef TREXD_UNARY_BODY

Value Tape::activation(Value a, Activation kind) {
    switch (kind) {
        case Activation::kRelu: return relu(a);
        case Activation::kTanh: return tanh(a);
        case Activation::kSigmoid: return sigmoid(a);
    }
    throw ContractError("unknown activation kind");
}

Value Tape::matmul(Value a, Value b) {
    const int ia = check(a), ib = check(b);
    const Tensor va = nodes_[ia].value, vb = nodes_[ib].value;
    Tensor out = trexd::matmul(va, vb);
    const std::size_t m = va.rows(), k = va.cols(), n = vb.cols();
    return push(std::move(out), [ia, ib, va, vb, m, k, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, m * k);
        auto& gb = accum(grads, ib, k * n);
        const double* pa = va.data().data();
        const double* pb = vb.data().data();
        // dA = G B^T
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double gv = g[i * n + j];
                if (gv == 0.0) continue;
                const double* bcol = pb + j;
                double* garow = ga.data() + i * k;
                for (std::size_t p = 0; p < k; ++p) garow[p] += gv * bcol[p * n];
            }
        }
        // dB = A^T G
        for (std::size_t i = 0; i < m; ++i) {
            const double* arow = pa + i * k;
            const double* grow = g.data() + i * n;
            for (std::size_t p = 0; p < k; ++p) {
                const double av = arow[p];
                if (av == 0.0) continue;
                double* gbrow = gb.data() + p * n;
                for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
            }
        }
    });
}

Value Tape::add_rowvec(Value m, Value v) {
    const int im = check(m), iv = check(v);
    const Tensor& vm = nodes_[im].value;
    const Tensor& vv = nodes_[iv].value;
    const std::size_t rows = vm.rows(), cols = vm.cols();
    if (vv.size() != cols) {
        throw DimensionError("add_rowvec: vector size " + shape_to_string(vv.shape()) +
                             " does not match matrix " + shape_to_string(vm.shape()));
    }
    std::vector<double> out(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = vm[i * cols + j] + vv[j];
    return push(Tensor(vm.shape(), std::move(out)),
                [im, iv, rows, cols](const std::vector<double>& g, auto& grads) {
                    auto& gm = accum(grads, im, rows * cols);
                    auto& gv = accum(grads, iv, cols);
                    for (std::size_t i = 0; i < rows; ++i)
                        for (std::size_t j = 0; j < cols; ++j) {
                            gm[i * cols + j] += g[i * cols + j];
                            gv[j] += g[i * cols + j];
                        }
                });
}

Value Tape::reshape(Value a, std::vector<std::size_t> shape) {
    const int ia = check(a);
    const Tensor& va = nodes_[ia].value;
    if (shape_product(shape) != va.size()) {
        throw DimensionError("reshape to " + shape_to_string(shape) + " from " +
                             shape_to_string(va.shape()));
    }
    const std::size_t n = va.size();
    Tensor out(std::move(shape), std::vector<double>(va.vec()));
    return push(std::move(out), [ia, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
    });
}

Value Tape::sum(Value a) {
    const int ia = check(a);
    const std::size_t n = nodes_[ia].value.size();
    Tensor out = Tensor::scalar(trexd::sum(nodes_[ia].value));
    return push(std::move(out), [ia, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        for (std::size_t i = 0; i < n; ++i) ga[i] += g[0];
    });
}

Value Tape::mean(Value a) {
    const int ia = check(a);
    const std::size_t n = nodes_[ia].value.size();
    if (n == 0) throw ContractError("mean of empty tensor");
    Tensor out = Tensor::scalar(trexd::sum(nodes_[ia].value) / static_cast<double>(n));
    return push(std::move(out), [ia, n](const std::vector<double>& g, auto& grads) {
        auto& ga = accum(grads, ia, n);
        const double s = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) ga[i] += s;
    });
}

Value Tape::pick(Value v, std::size_t index) {
    const int iv = check(v);
    const Tensor& t = nodes_[iv].value;
    if (index >= t.size()) throw DimensionError("pick index out of range");
    const std::size_t n = t.size();
    return push(Tensor::scalar(t[index]), [iv, index, n](const std::vector<double>& g, auto& grads) {
        auto& gv = accum(grads, iv, n);
        gv[index] += g[0];
    });
}

Value Tape::gather_rows(Value m, std::vector<std::size_t> cols) {
    const int im = check(m);
    const Tensor& t = nodes_[im].value;
    const std::size_t rows = t.rows(), width = t.cols();
    if (cols.size() != rows) throw DimensionError("gather_rows: one column index per row required");
    std::vector<double> out(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        if (cols[i] >= width) throw DimensionError("gather_rows column out of range");
        out[i] = t[i * width + cols[i]];
    }
    return push(Tensor({rows}, std::move(out)),
                [im, c = std::move(cols), rows, width](const std::vector<double>& g, auto& grads) {
                    auto& gm = accum(grads, im, rows * width);
                    for (std::size_t i = 0; i < rows; ++i) gm[i * width + c[i]] += g[i];
                });
}

Value Tape::max_element(Value v) {
    const int iv = check(v);
    const Tensor& t = nodes_[iv].value;
    const std::size_t idx = trexd::argmax(t);
    const std::size_t n = t.size();
    return push(Tensor::scalar(t[idx]), [iv, idx, n](const std::vector<double>& g, auto& grads) {
        auto& gv = accum(grads, iv, n);
        gv[idx] += g[0];
    });
}

Value Tape::min_element(Value v) {
    const int iv = check(v);
    const Tensor& t = nodes_[iv].value;
    std::size_t idx = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] < t[idx]) idx = i;
    const std::size_t n = t.size();
    return push(Tensor::scalar(t[idx]), [iv, idx, n](const std::vector<double>& g, auto& grads) {
        auto& gv = accum(grads, iv, n);
        gv[idx] += g[0];
    });
}

Value Tape::max_excluding(Value v, std::size_t skip_a, std::size_t skip_b) {
    const int iv = check(v);
    const Tensor& t = nodes_[iv].value;
    std::size_t idx = t.size();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i == skip_a || i == skip_b) continue;
        if (idx == t.size() || t[i] > t[idx]) idx = i;
    }
    if (idx == t.size()) throw ContractError("max_excluding over empty index set");
    const std::size_t n = t.size();
    return push(Tensor::scalar(t[idx]), [iv, idx, n](const std::vector<double>& g, auto& grads) {
        auto& gv = accum(grads, iv, n);
        gv[idx] += g[0];
    });
}

Value Tape::min2(Value a, Value b) {
    const int ia = check(a), ib = check(b);
    const double va = nodes_[ia].value.item(), vb = nodes_[ib].value.item();
    const bool pick_a = va <= vb;
    return push(Tensor::scalar(pick_a ? va : vb),
                [ia, ib, pick_a](const std::vector<double>& g, auto& grads) {
                    auto& gv = accum(grads, pick_a ? ia : ib, 1);
                    gv[0] += g[0];
                });
}

Value Tape::softmax(Value logits) {
    const int il = check(logits);
    const Tensor& t = nodes_[il].value;
    if (t.ndim() != 1) throw DimensionError("softmax expects a 1-D tensor");
    Tensor s = softmax_vec(t);
    const std::size_t n = s.size();
    return push(s, [il, s, n](const std::vector<double>& g, auto& grads) {
        auto& gl = accum(grads, il, n);
        double gs = 0.0;
        for (std::size_t i = 0; i < n; ++i) gs += g[i] * s[i];
        for (std::size_t i = 0; i < n; ++i) gl[i] += s[i] * (g[i] - gs);
    });
}

Value Tape::log_softmax_rows(Value logits) {
    const int il = check(logits);
    const Tensor& t = nodes_[il].value;
    const std::size_t rows = t.rows(), k = t.cols();
    std::vector<double> out(rows * k);
    for (std::size_t i = 0; i < rows; ++i) {
        double m = t[i * k];
        for (std::size_t j = 1; j < k; ++j) m = std::max(m, t[i * k + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < k; ++j) z += std::exp(t[i * k + j] - m);
        const double lz = m + std::log(z);
        for (std::size_t j = 0; j < k; ++j) out[i * k + j] = t[i * k + j] - lz;
    }
    Tensor ls(t.shape(), std::move(out));
    return push(ls, [il, ls, rows, k](const std::vector<double>& g, auto& grads) {
        auto& gl = accum(grads, il, rows * k);
        for (std::size_t i = 0; i < rows; ++i) {
            double gs = 0.0;
            for (std::size_t j = 0; j < k; ++j) gs += g[i * k + j];
            for (std::size_t j = 0; j < k; ++j)
                gl[i * k + j] += g[i * k + j] - std::exp(ls[i * k + j]) * gs;
        }
    });
}

Gradients Tape::backward(Value output) const {
    const int out = check(output);
    if (nodes_[out].value.size() != 1) {
        throw ContractError("backward requires a scalar output node");
    }
    Gradients result;
    result.shapes_.reserve(nodes_.size());
    for (const Node& n : nodes_) result.shapes_.push_back(n.value);
    result.grads_.assign(nodes_.size(), {});
    result.grads_[out] = {1.0};
    for (int i = out; i >= 0; --i) {
        if (result.grads_[i].empty() || !nodes_[i].backward) continue;
        nodes_[i].backward(result.grads_[i], result.grads_);
    }
    return result;
}

Tensor finite_difference_gradient(const std::function<double(const Tensor&)>& fn, const Tensor& at,
                                  double h) {
    if (!(h > 0.0)) throw ContractError("finite difference step must be positive");
    std::vector<double> g(at.size());
    std::vector<double> x(at.vec());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = x[i];
        x[i] = orig + h;
        const double fp = fn(Tensor(at.shape(), x));
        x[i] = orig - h;
        const double fm = fn(Tensor(at.shape(), x));
        x[i] = orig;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return Tensor(at.shape(), std::move(g));
}

}  // namespace trexd
