#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace harnlab {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // Euclidean norm of the fit residuals
  std::size_t count = 0;
};

// Least squares y = slope x + intercept. Needs two distinct x values.
FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y);
// Least squares on (x, ln y); throws DomainError unless every y > 0.
FitResult fit_log_linear(const std::vector<std::pair<double, double>>& pairs);

}  // namespace harnlab
