// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tensorcs {

/// Malformed or out-of-range input (dimension mismatch, bad mode index, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inputs are individually valid but do not fit together, e.g. an
/// ensemble whose matrices do not conform to the observation.
class ContractMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver failed to converge or a subproblem was infeasible.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Refusal to materialize an object larger than the configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::size_t required_bytes)
        : std::runtime_error(what), required_bytes_(required_bytes) {}
    [[nodiscard]] std::size_t required_bytes() const noexcept { return required_bytes_; }

private:
    std::size_t required_bytes_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tensorcs
