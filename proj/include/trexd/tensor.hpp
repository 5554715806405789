#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trexd/errors.hpp"
#include "trexd/rng.hpp"

namespace trexd {

// Dense row-major array of doubles. Immutable after construction, so copies
// are cheap (shared storage) and instances can be shared read-only across
// threads. Construction rejects NaN/Inf.
class Tensor {
  public:
    Tensor() = default;

    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    static Tensor zeros(const std::vector<std::size_t>& shape);
    static Tensor full(const std::vector<std::size_t>& shape, double value);
    static Tensor scalar(double value);
    static Tensor randn(const std::vector<std::size_t>& shape, Rng& rng);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t size() const { return data_ ? data_->size() : 0; }
    std::size_t ndim() const { return shape_.size(); }
    bool empty() const { return size() == 0; }

    // 2-D accessors; throw DimensionError when ndim() != 2.
    std::size_t rows() const;
    std::size_t cols() const;
    double at(std::size_t r, std::size_t c) const;

    double operator[](std::size_t i) const { return (*data_)[i]; }

    std::span<const double> data() const;
    const std::vector<double>& vec() const;

    // Value of a size-1 tensor.
    double item() const;

    bool is_finite() const;
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  private:
    std::vector<std::size_t> shape_;
    std::shared_ptr<const std::vector<double>> data_;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);
std::string shape_to_string(const std::vector<std::size_t>& shape);

// Plain (untraced) arithmetic. All of these allocate a fresh tensor.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor map(const Tensor& a, const std::function<double(double)>& f);
Tensor transpose(const Tensor& a);

double sum(const Tensor& a);
double dot(const Tensor& a, const Tensor& b);
std::size_t argmax(const Tensor& a);
double max_value(const Tensor& a);
double min_value(const Tensor& a);

// Stable softmax of a 1-D tensor (max subtraction).
Tensor softmax_vec(const Tensor& logits);

}  // namespace trexd
