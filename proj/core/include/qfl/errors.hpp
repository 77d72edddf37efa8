#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qfl {

// Operand shapes do not agree (matrix sizes, channel counts, site indices).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A value violates a documented precondition or type invariant.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by the integrators when the state leaves the density-operator set
// by more than the repair step is allowed to fix.
class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(const std::string& what, double time, double min_eigenvalue)
      : std::runtime_error(what), time_(time), min_eigenvalue_(min_eigenvalue) {}

  double time() const { return time_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double time_;
  double min_eigenvalue_;
};

// A Monte-Carlo budget cap was hit before any work was done.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qfl
