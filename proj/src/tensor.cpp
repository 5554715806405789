#include "trexd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace trexd {

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values) {
    const std::size_t n = shape_product(shape);
    if (n != values.size()) {
        throw DimensionError("tensor data length " + std::to_string(values.size()) +
                             " does not match shape " + shape_to_string(shape));
    }
    if (!all_finite(values)) {
        throw NonFiniteError("tensor constructed with non-finite values");
    }
    shape_ = std::move(shape);
    data_ = std::make_shared<const std::vector<double>>(std::move(values));
}

Tensor Tensor::zeros(const std::vector<std::size_t>& shape) {
    return Tensor(shape, std::vector<double>(shape_product(shape), 0.0));
}

Tensor Tensor::full(const std::vector<std::size_t>& shape, double value) {
    return Tensor(shape, std::vector<double>(shape_product(shape), value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::randn(const std::vector<std::size_t>& shape, Rng& rng) {
    std::vector<double> v(shape_product(shape));
    for (double& x : v) x = rng.normal();
    return Tensor(shape, std::move(v));
}

std::size_t Tensor::rows() const {
    if (ndim() != 2) throw DimensionError("rows() requires a 2-D tensor, got " + shape_to_string(shape_));
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (ndim() != 2) throw DimensionError("cols() requires a 2-D tensor, got " + shape_to_string(shape_));
    return shape_[1];
}

double Tensor::at(std::size_t r, std::size_t c) const {
    return (*data_)[r * cols() + c];
}

std::span<const double> Tensor::data() const {
    if (!data_) return {};
    return std::span<const double>(data_->data(), data_->size());
}

const std::vector<double>& Tensor::vec() const {
    static const std::vector<double> kEmpty;
    return data_ ? *data_ : kEmpty;
}

double Tensor::item() const {
    if (size() != 1) {
        throw ContractError("item() requires a size-1 tensor, got " + shape_to_string(shape_));
    }
    return (*data_)[0];
}

bool Tensor::is_finite() const { return !data_ || all_finite(*data_); }

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    return shape.empty() ? 0 : n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    const std::size_t m = a.rows(), k = a.cols();
    if (b.rows() != k) {
        throw DimensionError("matmul inner dimensions disagree: " + shape_to_string(a.shape()) +
                             " vs " + shape_to_string(b.shape()));
    }
    const std::size_t n = b.cols();
    std::vector<double> out(m * n, 0.0);
    const double* pa = a.data().data();
    const double* pb = b.data().data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double av = pa[i * k + p];
            if (av == 0.0) continue;
            const double* brow = pb + p * n;
            double* orow = out.data() + i * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    return Tensor({m, n}, std::move(out));
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(op) + " shape mismatch: " + shape_to_string(a.shape()) +
                             " vs " + shape_to_string(b.shape()));
    }
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return Tensor(a.shape(), std::move(out));
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return Tensor(a.shape(), std::move(out));
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return Tensor(a.shape(), std::move(out));
}

Tensor scale(const Tensor& a, double s) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * s;
    return Tensor(a.shape(), std::move(out));
}

Tensor map(const Tensor& a, const std::function<double(double)>& f) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(a[i]);
    return Tensor(a.shape(), std::move(out));
}

Tensor transpose(const Tensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a[i * n + j];
    return Tensor({n, m}, std::move(out));
}

double sum(const Tensor& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i];
    return s;
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::size_t argmax(const Tensor& a) {
    if (a.empty()) throw ContractError("argmax of empty tensor");
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (a[i] > a[best]) best = i;
    return best;
}

double max_value(const Tensor& a) { return a[argmax(a)]; }

double min_value(const Tensor& a) {
    if (a.empty()) throw ContractError("min of empty tensor");
    double best = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) best = std::min(best, a[i]);
    return best;
}

Tensor softmax_vec(const Tensor& logits) {
    if (logits.empty()) throw ContractError("softmax of empty tensor");
    const double m = max_value(logits);
    std::vector<double> out(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp(logits[i] - m);
        z += out[i];
    }
    for (double& x : out) x /= z;
    return Tensor(logits.shape(), std::move(out));
}

}  // namespace trexd
