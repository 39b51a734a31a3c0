#include "harnlab/smp.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>

#include "harnlab/errors.hpp"
#include "harnlab/fit.hpp"
#include "harnlab/quadrature.hpp"
#include "harnlab/solver.hpp"

namespace harnlab {

namespace {

constexpr double kFloor = 1e-300;

// Maximizes q on [a, b] by golden-section search.
double golden_max(const std::function<double(double)>& q, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = q(x1), f2 = q(x2);
  for (int it = 0; it < 100 && b - a > 1e-15 * (std::abs(a) + std::abs(b)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = q(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = q(x1);
    }
  }
  return std::max(f1, f2);
}

// Max of q over a sorted grid, refined inside the neighbouring cells.
double scan_max(const std::function<double(double)>& q, const std::vector<double>& grid) {
  std::size_t best = 0;
  double vbest = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = q(grid[i]);
    if (v > vbest) {
      vbest = v;
      best = i;
    }
  }
  const double a = grid[best > 0 ? best - 1 : 0];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  if (b > a) vbest = std::max(vbest, golden_max(q, a, b));
  return vbest;
}

}  // namespace

Nonlinearity::Nonlinearity(std::function<double(double)> f, double cap) : f_(std::move(f)), cap_(cap) {
  if (!f_) throw DomainError("empty nonlinearity");
  if (!(cap > 0.0)) throw DomainError("range cap must be positive");
  if (std::abs(f_(0.0)) > 0.0) throw DomainError("f(0) must vanish");
  top_ = 2.0 * std::max(1.0, cap);
  auto self = [this](double s) { return (*this)(s); };
  for (double x = top_; x >= kFloor; x *= 0.5) knots_.push_back(x);
  cumulative_.assign(knots_.size(), 0.0);
  const std::size_t J = knots_.size() - 1;
  cumulative_[J] = 0.5 * knots_[J] * (*this)(knots_[J]);
  for (std::size_t j = J; j-- > 0;) {
    cumulative_[j] = cumulative_[j + 1] + integrate_panel(self, knots_[j + 1], knots_[j]);
  }
}

Nonlinearity Nonlinearity::log_power(double a, double cap) {
  if (!(a >= 0.0)) throw DomainError("exponent a must be nonnegative");
  Nonlinearity f([a](double s) { return s > 0.0 ? s * std::pow(std::abs(std::log(s)), a) : 0.0; }, cap);
  f.log_exponent_ = a;
  return f;
}

Nonlinearity Nonlinearity::power(double coeff, double exponent, double cap) {
  if (!(exponent > 0.0)) throw DomainError("power exponent must be positive");
  return Nonlinearity([coeff, exponent](double s) { return s > 0.0 ? coeff * std::pow(s, exponent) : 0.0; },
                      cap);
}

double Nonlinearity::operator()(double s) const { return s > 0.0 ? f_(s) : 0.0; }

double Nonlinearity::primitive(double s) const {
  if (s <= 0.0) return 0.0;
  auto self = [this](double t) { return (*this)(t); };
  if (s > top_) return cumulative_[0] + integrate(self, top_, s);
  const auto j = static_cast<std::size_t>(std::floor(std::log2(top_ / s)));
  if (j + 1 >= knots_.size()) return 0.5 * s * (*this)(s);
  // knots_[j] >= s > knots_[j + 1], up to rounding in log2.
  const std::size_t lo = s > knots_[j] ? j : j + 1;
  if (lo == 0) return cumulative_[0];
  return cumulative_[lo] + integrate_panel(self, knots_[lo], s);
}

Nonlinearity Nonlinearity::scaled(double t) const {
  if (!(t > 0.0)) throw DomainError("scale must be positive");
  auto f = f_;
  Nonlinearity g([f, t](double s) { return t * f(s); }, cap_);
  g.log_exponent_ = log_exponent_;
  g.tag_scale_ = tag_scale_ * t;
  return g;
}

double m_delta(const Nonlinearity& f, double delta, double L) {
  if (!(delta > 0.0) || !(L > 0.0)) throw DomainError("m_delta needs delta > 0 and L > 0");
  std::vector<double> grid;
  constexpr int kUniform = 2000;
  for (int i = 0; i <= kUniform; ++i) grid.push_back(L * i / kUniform);
  const double stop = std::max(kFloor, std::min(delta, L) * 1e-6);
  for (int j = 1; j < 40 * 320; ++j) {
    const double s = L * std::pow(10.0, -j / 40.0);
    if (s < stop) break;
    grid.push_back(s);
  }
  std::sort(grid.begin(), grid.end());
  return scan_max([&](double s) { return f(s) / (s + delta); }, grid);
}

double m_delta_log(const Nonlinearity& f, double log_delta, double L) {
  if (!(L > 0.0)) throw DomainError("m_delta needs L > 0");
  if (!f.log_exponent()) {
    if (log_delta < std::log(kFloor)) throw DomainError("delta below the double range");
    return m_delta(f, std::exp(log_delta), L);
  }
  // s = e^sigma: f(s)/(s + delta) = |sigma|^a / (1 + e^(log_delta - sigma)).
  const double a = *f.log_exponent(), top = std::log(L);
  auto q = [a, log_delta](double sigma) {
    const double e = std::min(log_delta - sigma, 700.0);
    return std::pow(std::abs(sigma), a) / (1.0 + std::exp(e));
  };
  std::vector<double> grid;
  for (double tau = -40.0; tau <= 40.0; tau += 0.01) {
    if (log_delta + tau <= top) grid.push_back(log_delta + tau);
  }
  for (double tau = 40.0; log_delta + tau < top; tau *= 1.02) grid.push_back(log_delta + tau);
  grid.push_back(top);
  std::sort(grid.begin(), grid.end());
  return f.tag_scale() * std::max(0.0, scan_max(q, grid));
}

std::string to_string(DecayVerdict v) {
  switch (v) {
    case DecayVerdict::holds:
      return "holds";
    case DecayVerdict::fails:
      return "fails";
    case DecayVerdict::inconclusive:
      break;
  }
  return "inconclusive";
}

std::vector<double> default_log_deltas() {
  std::vector<double> g;
  for (int k = 2; k <= 12; ++k) g.push_back(-k * std::log(10.0));
  return g;
}

std::vector<double> extended_log_deltas(double t_lo, double t_hi, int n) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || n < 4) throw DomainError("bad delta grid");
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(-t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n - 1)));
  return g;
}

DecayTrace check_decay_criterion(const Nonlinearity& f, double k, const std::vector<double>& log_deltas,
                                 double L) {
  if (!(k > 0.0)) throw DomainError("k must be positive");
  if (log_deltas.size() < 4) throw DomainError("need at least four deltas");
  for (std::size_t i = 1; i < log_deltas.size(); ++i) {
    if (!(log_deltas[i] < log_deltas[i - 1])) throw DomainError("delta grid must decrease");
  }
  const double cap = L > 0.0 ? L : f.cap();
  DecayTrace t;
  t.log_delta = log_deltas;
  for (double ld : log_deltas) t.log_trace.push_back(k * ld + std::sqrt(m_delta_log(f, ld, cap)));

  const std::size_t n = log_deltas.size(), start = std::min(n / 2, n - 3);
  std::vector<double> x, y;
  for (std::size_t i = start; i < n; ++i) {
    x.push_back(-log_deltas[i]);
    y.push_back(t.log_trace[i]);
  }
  t.tail_slope = fit_linear(x, y).slope;
  bool down = true, up = true;
  for (std::size_t i = n - 3; i < n; ++i) {
    const double d = t.log_trace[i] - t.log_trace[i - 1];
    down = down && d < 0.0;
    up = up && d > 0.0;
  }
  if (down && t.tail_slope < 0.0) t.verdict = DecayVerdict::holds;
  else if (up && t.tail_slope > 0.0) t.verdict = DecayVerdict::fails;
  return t;
}

std::string to_string(SmpClass c) {
  switch (c) {
    case SmpClass::smp_holds:
      return "smp_holds";
    case SmpClass::smp_may_fail:
      return "smp_may_fail";
    case SmpClass::inconclusive:
      break;
  }
  return "inconclusive";
}

SmpClass classify_vazquez_integral(const Nonlinearity& f) {
  for (int k = 1; k <= 16; ++k) {
    const double s = std::pow(10.0, -k);
    if (f(s) < 0.0) throw DomainError("f must be nonnegative near 0");
    if (f.primitive(s) <= 0.0) return SmpClass::smp_holds;
  }
  const auto r = quad_singular([&f](double s) { return 1.0 / std::sqrt(f.primitive(s)); }, 0.5, 1e-10);
  switch (r.status) {
    case Convergence::diverges:
      return SmpClass::smp_holds;
    case Convergence::converges:
      return SmpClass::smp_may_fail;
    case Convergence::inconclusive:
      break;
  }
  return SmpClass::inconclusive;
}

double ode_residual(const GridFunction& u, const Nonlinearity& f) {
  const GridDomain& d = u.domain();
  if (d.shape() != Shape::interval) throw DomainError("ODE residual needs an interval grid");
  const double h = d.hx();
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < d.size(); ++i) {
    r = std::max(r, std::abs((u[i + 1] - 2 * u[i] + u[i - 1]) / (h * h) - f(u[i])));
  }
  return r;
}

DeadCore dead_core_profile(const Nonlinearity& f, double u0, double h) {
  if (!(u0 > 0.0) || !(h > 0.0)) throw DomainError("dead core needs u0 > 0 and h > 0");
  auto phi = [&f](double t) { return 1.0 / std::sqrt(2.0 * f.primitive(t)); };
  for (int k = 1; k <= 16; ++k) {
    if (f.primitive(u0 * std::pow(10.0, -k)) <= 0.0) throw DomainError("no dead core: integral diverges");
  }
  const auto total = quad_singular(phi, u0, 1e-10);
  if (total.status != Convergence::converges) throw DomainError("no dead core: integral diverges");

  // X(u) = int_0^u phi on knots u0 2^(-j/4), summed upward from the part of
  // the integral below the last knot so that X is monotone.
  std::vector<double> knots{u0}, panels;
  const double ratio = std::pow(2.0, -0.25);
  for (double s = u0 * ratio; s >= kFloor && f.primitive(s) > 1e-280; s *= ratio) {
    panels.push_back(integrate_panel(phi, s, knots.back()));
    knots.push_back(s);
  }
  double sum = 0.0;
  for (double p : panels) sum += p;
  std::vector<double> X(knots.size());
  X.back() = std::max(0.0, total.value - sum);
  for (std::size_t j = panels.size(); j-- > 0;) X[j] = X[j + 1] + panels[j];
  DeadCore out;
  out.T = X.front();

  auto d = make_domain(GridDomain::interval(-out.T, out.T, h));
  std::vector<double> v(d->size(), 0.0);
  for (std::size_t i = 0; i < d->size(); ++i) {
    const double x = d->point(i)[0];
    if (x <= 0.0) continue;
    if (x >= out.T) {
      v[i] = u0;
      continue;
    }
    // X decreases along the knots; find X[j + 1] <= x < X[j].
    auto it = std::upper_bound(X.begin(), X.end(), x, std::greater<double>());
    if (it == X.end()) continue;
    const auto j1 = static_cast<std::size_t>(it - X.begin());
    const std::size_t j0 = j1 - 1;
    auto g = [&](double u) { return X[j1] + integrate_panel(phi, knots[j1], u) - x; };
    const double glo = g(knots[j1]), ghi = g(knots[j0]);
    if (glo >= 0.0) {
      v[i] = knots[j1];
      continue;
    }
    if (ghi <= 0.0) {
      v[i] = knots[j0];
      continue;
    }
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(g, knots[j1], knots[j0], glo, ghi,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
    v[i] = 0.5 * (a + b);
  }
  out.u = GridFunction(d, std::move(v));
  out.residual = ode_residual(out.u, f);
  return out;
}

VazquezReport vazquez_experiment(const EllipticProblem& problem, const GridFunction& u,
                                 const Nonlinearity& f, const VazquezOptions& opt) {
  const GridDomain& d = u.domain();
  if (!(opt.cbar > 0.0 && opt.k > 0.0 && opt.eps > 0.0)) throw DomainError("bad experiment constants");
  double mx = 0.0, mn = kInf;
  for (double x : u.values()) {
    mx = std::max(mx, std::abs(x));
    mn = std::min(mn, x);
  }
  if (mn < -1e-10 * mx) throw PreconditionError("u must be nonnegative");
  const double zero = 1e-12 * mx;
  NodeSubset zeros, positive;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (u[i] > zero) positive.push_back(i);
    else if (!d.is_boundary(i)) zeros.push_back(i);
  }
  if (zeros.empty()) throw PreconditionError("minimum 0 is not attained at an interior node");

  VazquezReport r;
  if (opt.x0) {
    if (!std::binary_search(zeros.begin(), zeros.end(), *opt.x0)) {
      throw PreconditionError("x0 is not an interior zero of u");
    }
    r.x0 = *opt.x0;
  } else {
    r.x0 = zeros.front();
    double best = kInf;
    for (std::size_t z : zeros) {
      for (std::size_t p : positive) {
        const double dd = distance(d.point(z), d.point(p));
        if (dd < best) {
          best = dd;
          r.x0 = z;
        }
      }
    }
  }
  const Point x0 = d.point(r.x0);
  double r0 = opt.r0;
  if (!(r0 > 0.0)) {
    r0 = kInf;
    for (std::size_t b : d.boundary_nodes()) r0 = std::min(r0, distance(x0, d.point(b)));
  }
  r.r1 = std::min(0.5 * r0, 1.0 / (opt.k * opt.cbar));
  const NodeSubset ball = select(d, Region::ball(x0, r.r1));
  r.sup_near_x0 = sup_over(u, ball);

  const LinearSystem sys = assemble(problem, u.domain_ptr());
  Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.values().data(), static_cast<Eigen::Index>(u.size()));
  Eigen::VectorXd rhs = sys.rhs;
  for (std::size_t i : d.interior_nodes()) rhs[static_cast<Eigen::Index>(i)] += f(u[i]);
  r.residual = scaled_residual(sys.matrix, uv, rhs);

  const double L = mx > 0.0 ? mx : f.cap();
  r.log_delta = opt.log_deltas.empty() ? default_log_deltas() : opt.log_deltas;
  for (double ld : r.log_delta) {
    const double delta = std::exp(ld);
    std::vector<double> shifted(u.values().begin(), u.values().end());
    for (double& x : shifted) x = std::max(x, 0.0) + delta;
    r.integral.push_back(lebesgue_norm(GridFunction(u.domain_ptr(), std::move(shifted)), opt.eps, ball));
    r.log_bound.push_back(std::log(opt.cbar) + ld + opt.cbar * r.r1 * std::sqrt(m_delta_log(f, ld, L)));
  }
  const std::size_t n = r.log_bound.size();
  bool down = n >= 4 && r.log_bound.back() < r.log_bound.front();
  for (std::size_t i = (n >= 3 ? n - 3 : 1); i < n && down; ++i) down = r.log_bound[i] < r.log_bound[i - 1];
  r.trace_to_zero = down;
  return r;
}

}  // namespace harnlab
