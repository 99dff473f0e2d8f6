#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace owenext {

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Cholesky factorization hit a pivot below the scale-aware threshold.
class NotPositiveDefiniteError : public DomainError {
 public:
  NotPositiveDefiniteError(std::size_t pivot_index, double pivot_value)
      : DomainError("matrix is not positive definite: pivot " + std::to_string(pivot_index) +
                    " = " + std::to_string(pivot_value)),
        pivot_index_(pivot_index),
        pivot_value_(pivot_value) {}

  std::size_t pivot_index() const noexcept { return pivot_index_; }
  double pivot_value() const noexcept { return pivot_value_; }

 private:
  std::size_t pivot_index_;
  double pivot_value_;
};

/// Two routes to the same quantity disagreed beyond their tolerance.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace owenext
