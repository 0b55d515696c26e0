#pragma once

#include <stdexcept>
#include <string>

namespace quickic {

/// Numerical failure: singular or ill-conditioned matrix, non-PD covariance.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Combinatorial search exceeded its configured subset budget.
class budget_exceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factor-analysis noise variance collapsed toward zero during EM.
class heywood_error : public numeric_error {
 public:
  heywood_error(int index, double value)
      : numeric_error("Heywood case: noise variance " + std::to_string(value) +
                      " at coordinate " + std::to_string(index)),
        index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

/// The mixing-weight update denominator became non-positive.
class step_degenerate : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

}  // namespace quickic
