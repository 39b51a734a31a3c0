#include "harnlab/fit.hpp"

#include <cmath>

#include "harnlab/errors.hpp"

namespace harnlab {

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("fit needs equally many x and y values");
  if (x.size() < 2) throw DomainError("fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("fit needs two distinct x values");
  FitResult r;
  r.count = x.size();
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.slope * x[i] + r.intercept);
    ss += e * e;
  }
  r.residual = std::sqrt(ss);
  return r;
}

FitResult fit_log_linear(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> x, y;
  for (const auto& [a, b] : pairs) {
    if (!(b > 0.0)) throw DomainError("log-linear fit needs positive y values");
    x.push_back(a);
    y.push_back(std::log(b));
  }
  return fit_linear(x, y);
}

}  // namespace harnlab
