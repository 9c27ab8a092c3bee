#pragma once

#include <stdexcept>
#include <string>

namespace coclust {

/// Quadrature or other numerical routine failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what + " (estimate=" + std::to_string(estimate) +
                           ", error=" + std::to_string(error_bound) + ")"),
        estimate_(estimate),
        error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

/// Requested combination is outside what an operation can answer exactly.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace coclust
