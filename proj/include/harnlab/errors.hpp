#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace harnlab {

// Input outside the documented domain of a function (bad shape, non-elliptic
// coefficient, nonsymmetric matrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A stated precondition of an experiment does not hold (negative solution,
// undersized cover radius, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class SingularSystemError : public SolverError {
 public:
  using SolverError::SolverError;
};

// The discrete operator is not an M-matrix where the experiment relies on it.
class MaximumPrincipleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace harnlab
