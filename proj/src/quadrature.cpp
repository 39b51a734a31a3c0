#include "harnlab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "harnlab/errors.hpp"

namespace harnlab {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Positive ranges wider than a factor 2 are integrated in sigma = ln s, which
// keeps integrands like s^-p |ln s|^-q smooth.
double adaptive(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (lo > 0.0 && hi >= 2.0 * lo) {
    auto g = [&f](double sigma) {
      const double s = std::exp(sigma);
      return f(s) * s;
    };
    return GK::integrate(g, std::log(lo), std::log(hi), 15, tol);
  }
  return GK::integrate(f, lo, hi, 15, tol);
}

}  // namespace

double integrate_panel(const std::function<double(double)>& f, double lo, double hi) {
  return GK::integrate(f, lo, hi, 0, 0.0);
}

double integrate(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
  if (!(hi >= lo)) throw DomainError("integration bounds out of order");
  if (hi == lo) return 0.0;
  if (lo > 0.0 && hi / lo > 10.0 * (1.0 + 1e-9)) {
    double total = 0.0, a = lo;
    while (a < hi) {
      const double b = a * 10.0 * (1.0 + 1e-9) >= hi ? hi : a * 10.0;
      total += adaptive(f, a, b, rel_tol);
      a = b;
    }
    return total;
  }
  return adaptive(f, lo, hi, rel_tol);
}

SingularIntegral quad_singular(const std::function<double(double)>& phi, double a, double rel_tol) {
  if (!(a > 0.0)) throw DomainError("upper limit must be positive");
  SingularIntegral out;
  std::vector<double> t;
  double prev_cut = a;
  double sum = 0.0;
  for (int k = 1; k <= 16; ++k) {
    const double cut = std::pow(10.0, -k);
    if (cut >= a) continue;
    sum += integrate(phi, cut, prev_cut, rel_tol);
    prev_cut = cut;
    out.partial.push_back(sum);
    t.push_back(k * std::log(10.0));
    if (!std::isfinite(sum)) {
      out.status = Convergence::diverges;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
  }
  const std::size_t n = out.partial.size();
  if (n < 4) throw DomainError("upper limit too small for the cutoff ladder");
  const double s1 = out.partial[n - 3], s2 = out.partial[n - 2], s3 = out.partial[n - 1];
  const double d0 = s1 - out.partial[n - 4], d1 = s2 - s1, d2 = s3 - s2;

  if (d2 == 0.0 && d1 == 0.0) {
    out.status = Convergence::converges;
    out.value = s3;
    out.tail_exponent = std::numeric_limits<double>::infinity();
    return out;
  }
  const bool same_sign = (d0 > 0 && d1 > 0 && d2 > 0) || (d0 < 0 && d1 < 0 && d2 < 0);
  if (!same_sign) {
    out.status = Convergence::inconclusive;
    out.value = s3;
    return out;
  }
  const double r1 = d1 / d0, r2 = d2 / d1;
  if (r1 < 0.7 && r2 < 0.7 && std::abs(r2 - r1) <= 0.1) {
    out.status = Convergence::converges;
    out.value = s3 + d2 * r2 / (1.0 - r2);
    out.tail_exponent = std::numeric_limits<double>::infinity();
    return out;
  }

  // S = S_inf - B t^-gamma through the last three partial sums.
  const double t1 = t[n - 3], t2 = t[n - 2], t3 = t[n - 1];
  const double rho = d2 / d1;
  auto ratio = [&](double g) {
    if (std::abs(g) < 1e-9) return std::log(t3 / t2) / std::log(t2 / t1);
    return (std::pow(t2, -g) - std::pow(t3, -g)) / (std::pow(t1, -g) - std::pow(t2, -g));
  };
  double lo = -5.0, hi = 50.0, gamma;
  if (rho >= ratio(lo)) {
    gamma = lo;
  } else if (rho <= ratio(hi)) {
    gamma = hi;
  } else {
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve([&](double g) { return ratio(g) - rho; }, lo, hi,
                                               boost::math::tools::eps_tolerance<double>(50), iters);
    gamma = 0.5 * (r.first + r.second);
  }
  out.tail_exponent = gamma;
  if (gamma <= 0.05) {
    out.status = Convergence::diverges;
    out.value = std::numeric_limits<double>::infinity();
  } else if (gamma >= 0.15) {
    out.status = Convergence::converges;
    const double B = d2 / (std::pow(t2, -gamma) - std::pow(t3, -gamma));
    out.value = s3 + B * std::pow(t3, -gamma);
  } else {
    out.status = Convergence::inconclusive;
    out.value = s3;
  }
  return out;
}

}  // namespace harnlab
