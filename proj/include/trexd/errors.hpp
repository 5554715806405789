#pragma once

#include <stdexcept>
#include <string>

namespace trexd {

// Shape or index disagreement between tensors/operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// API misuse: a precondition the caller controls was violated.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// NaN/Inf encountered where finite values are required.
struct NonFiniteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested operation is not available for this object (e.g. gradients
// through a non-differentiable generator).
struct UnsupportedOperationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Checkpoint or data file failed validation (magic, version, checksum,
// truncation).
struct CorruptFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid run configuration (bad spec file, unsatisfiable prior, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace trexd
