#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "trexd/tensor.hpp"

namespace trexd {

enum class Activation { kRelu, kTanh, kSigmoid };

class Tape;

// Handle to a node on a tape. Valid only for the tape that produced it.
struct Value {
    int node = -1;
    bool valid() const { return node >= 0; }
};

// Gradients produced by Tape::backward. Leaves that do not influence the
// output get a zero tensor of their own shape.
class Gradients {
  public:
    Tensor at(Value v) const;

  private:
    friend class Tape;
    std::vector<Tensor> shapes_;              // node values, for zero-fill
    std::vector<std::vector<double>> grads_;  // empty == zero
};

// Record of one forward evaluation. Nodes reference only earlier nodes, so
// reverse iteration is a valid topological order. A tape is single-threaded
// and is rebuilt for every evaluation.
class Tape {
  public:
    Value leaf(Tensor v);

    const Tensor& value(Value v) const { return nodes_[check(v)].value; }
    std::size_t size() const { return nodes_.size(); }

    // --- elementwise ---
    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    // s * a + c, elementwise
    Value affine(Value a, double s, double c);
    Value relu(Value a);
    Value tanh(Value a);
    Value sigmoid(Value a);
    Value activation(Value a, Activation kind);
    Value exp(Value a);
    Value log(Value a);
    Value softplus(Value a);
    Value square(Value a);
    Value abs(Value a);

    // --- linear algebra ---
    Value matmul(Value a, Value b);
    // m: [n x k], v: [k]; adds v to every row of m
    Value add_rowvec(Value m, Value v);
    Value reshape(Value a, std::vector<std::size_t> shape);

    // --- reductions / selections ---
    Value sum(Value a);
    Value mean(Value a);
    Value pick(Value v, std::size_t index);
    // m: [n x k], cols: one column index per row -> [n]
    Value gather_rows(Value m, std::vector<std::size_t> cols);
    Value max_element(Value v);
    Value min_element(Value v);
    // max over entries of v excluding indices skip_a and skip_b
    Value max_excluding(Value v, std::size_t skip_a, std::size_t skip_b);
    Value min2(Value a, Value b);  // size-1 operands

    // --- simplex ---
    Value softmax(Value logits);           // 1-D, max-subtracted
    Value log_softmax_rows(Value logits);  // 2-D, rowwise

    // Reverse accumulation from a scalar output. Each node receives exactly
    // one accumulated gradient pass.
    Gradients backward(Value output) const;

  private:
    using BackwardFn =
        std::function<void(const std::vector<double>& gout, std::vector<std::vector<double>>& grads)>;

    struct Node {
        Tensor value;
        BackwardFn backward;  // null for leaves
    };

    int check(Value v) const;
    Value push(Tensor value, BackwardFn fn);
    static std::vector<double>& accum(std::vector<std::vector<double>>& grads, int node,
                                      std::size_t n);

    std::vector<Node> nodes_;
};

// Central-difference gradient of fn at `at`: (fn(x + h e_i) - fn(x - h e_i)) / 2h.
// Verification oracle; touches no tape internals.
Tensor finite_difference_gradient(const std::function<double(const Tensor&)>& fn, const Tensor& at,
                                  double h);

}  // namespace trexd
