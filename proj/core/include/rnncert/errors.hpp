#pragma once

#include <stdexcept>
#include <string>

namespace rnncert {

/// Malformed or non-finite input: bad shapes, unknown tags, NaN entries.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but violates an operation's mathematical precondition
/// (a weight that is not positive definite, an adjacency spectrum outside [0, 1]).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant failed. Seeing one of these is a bug, not a model property.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Iterative procedure hit its cap. Carries the last residual it saw.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Bisection observed a feasible rate above an infeasible one.
class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rnncert
