#pragma once

#include <stdexcept>
#include <string>

namespace msll {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape mismatch between arguments (non-square matrix, wrong vector length).
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(what) {}
};

// Least-squares matrix does not have full column rank.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, long rank, long cols)
      : Error(what), rank(rank), cols(cols) {}
  long rank;
  long cols;
};

// The KKT system of an equality-constrained least-squares problem is singular,
// which means the constraints are degenerate or the problem is infeasible.
class SingularConstraintError : public Error {
 public:
  explicit SingularConstraintError(const std::string& what) : Error(what) {}
};

// A model callback produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double time) : Error(what), time(time) {}
  double time;
};

// The integrator could not continue: the step size underflowed or the state
// became non-finite, typically because the trajectory escapes to infinity.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time) : Error(what), time(time) {}
  double time;
};

// An iteration budget (integrator steps) was exhausted before reaching the goal.
class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(what) {}
};

// Fewer residuals than free parameters, so the noise variance is not estimable.
class DegreesOfFreedomError : public Error {
 public:
  explicit DegreesOfFreedomError(const std::string& what) : Error(what) {}
};

// Malformed dataset or config input.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(what) {}
};

// Filesystem problem while reading or writing.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace msll
