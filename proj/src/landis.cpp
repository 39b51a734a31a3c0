#include "harnlab/landis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "harnlab/errors.hpp"
#include "harnlab/fit.hpp"

namespace harnlab {

namespace {

constexpr double kHole = 2.0;

bool on_hole(const Point& x) { return norm(x) <= kHole + 1e-9; }

void check_increasing(const std::vector<double>& g, const char* what) {
  if (g.size() < 2) throw DomainError(std::string(what) + " needs at least two entries");
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g[i] > g[i - 1])) throw DomainError(std::string(what) + " must increase");
  }
}

std::pair<long long, long long> node_key(const Point& x) {
  return {std::llround(x[0] * 1e8), std::llround(x[1] * 1e8)};
}

std::size_t nearest_node(const GridDomain& d, const Point& x) {
  std::size_t best = 0;
  double dist = kInf;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = distance(d.point(i), x);
    if (e < dist) {
      dist = e;
      best = i;
    }
  }
  if (dist > d.spacing()) throw DomainError("normalization point is not on the grid");
  return best;
}

NodeSubset shell(const GridDomain& d, double R) {
  NodeSubset s;
  const double half = 0.5 * d.spacing() + 1e-12;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::abs(norm(d.point(i)) - R) <= half) s.push_back(i);
  }
  if (s.empty()) throw DomainError("no nodes on the sphere |x| = R");
  return s;
}

double sup_abs_over(const GridFunction& u, const NodeSubset& s) {
  double m = 0.0;
  for (auto i : s) m = std::max(m, std::abs(u[i]));
  return m;
}

LinearSystem operator_system(const EllipticProblem& pb, const DomainPtr& d, const GridFunction& u) {
  return pb.form.is_pucci() ? assemble_frozen(pb, d, u) : assemble(pb, d);
}

}  // namespace

OdeRates ode_rates(double b, double c) {
  if (!(b >= 0.0 && c >= 0.0)) throw DomainError("ODE rates need b, c >= 0");
  const double s = std::sqrt(b * b + c);
  return {b + s, b - s};
}

double ode_oracle(double b, double c, double x, Branch branch) {
  const OdeRates r = ode_rates(b, c);
  return std::exp((branch == Branch::growing ? r.growing : r.decaying) * x);
}

PositiveSolution build_positive_solution(const EllipticProblem& problem, const DomainFactory& domains,
                                         const std::vector<double>& j_grid, double m, std::optional<Point> x0,
                                         const SolveOptions& opt) {
  check_increasing(j_grid, "exhaustion grid");
  if (!(m > 0.0)) throw DomainError("Cauchy radius must be positive");
  EllipticProblem pb = problem;
  pb.g = nullptr;
  pb.flux_source = nullptr;
  pb.boundary = [](const Point& x) { return on_hole(x) ? 0.0 : 1.0; };

  PositiveSolution out;
  out.j_grid = j_grid;
  for (double j : j_grid) {
    const DomainPtr d = domains(j);
    GridFunction u;
    if (pb.form.is_pucci()) {
      u = solve(pb, d, opt);
      if (!satisfies_maximum_principle(assemble_frozen(pb, d, u))) {
        throw MaximumPrincipleError("MP hypothesis violated");
      }
    } else {
      const LinearSystem sys = assemble(pb, d);
      if (!satisfies_maximum_principle(sys)) throw MaximumPrincipleError("MP hypothesis violated");
      u = solve_linear(sys, opt);
    }
    if (!x0) {
      double best = kInf;
      for (auto i : d->interior_nodes()) {
        const double e = std::abs(norm(d->point(i)) - 3.0);
        if (e < best - 1e-12) {
          best = e;
          x0 = d->point(i);
        }
      }
      if (!x0) throw DomainError("exhaustion domain has no interior nodes");
    }
    const std::size_t k = nearest_node(*d, *x0);
    if (!(u[k] > 0.0)) throw MaximumPrincipleError("MP hypothesis violated");
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x /= u[k];
    out.psi.emplace_back(d, std::move(v));
    out.x0 = k;
  }

  // Cauchy tails on common nodes inside B_m.
  double scale = 1.0;
  for (std::size_t t = 0; t + 1 < out.psi.size(); ++t) {
    const GridDomain& a = out.psi[t].domain();
    const GridDomain& b = out.psi[t + 1].domain();
    std::map<std::pair<long long, long long>, std::size_t> index;
    for (std::size_t i = 0; i < b.size(); ++i) index.emplace(node_key(b.point(i)), i);
    double tail = 0.0;
    std::size_t common = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (norm(a.point(i)) > m + 1e-9) continue;
      auto it = index.find(node_key(a.point(i)));
      if (it == index.end()) continue;
      ++common;
      scale = std::max(scale, std::abs(out.psi[t][i]));
      tail = std::max(tail, std::abs(out.psi[t + 1][it->second] - out.psi[t][i]));
    }
    if (common == 0) throw DomainError("exhaustion grids share no nodes in B_m");
    out.cauchy.push_back(tail);
  }
  out.cauchy_floor = 1e-9 * scale;
  out.cauchy_geometric = true;
  for (std::size_t t = 1; t < out.cauchy.size(); ++t) {
    const double c = out.cauchy[t];
    if (!(c <= out.cauchy_floor || c <= 0.9 * out.cauchy[t - 1])) out.cauchy_geometric = false;
  }

  const GridFunction& last = out.psi.back();
  out.min_interior = kInf;
  for (auto i : last.domain().interior_nodes()) out.min_interior = std::min(out.min_interior, last[i]);
  return out;
}

DecayReport measure_decay(const GridFunction& psi, const std::vector<double>& R_grid, double r_min) {
  check_increasing(R_grid, "R-grid");
  const GridDomain& d = psi.domain();
  for (auto i : d.interior_nodes()) {
    if (!(psi[i] > 0.0)) throw PreconditionError("psi must be positive at interior nodes");
  }
  DecayReport r;
  r.R = R_grid;
  std::vector<double> x, y;
  for (double R : R_grid) {
    double inf = kInf;
    for (auto i : d.interior_nodes()) {
      const double rho = norm(d.point(i));
      if (rho >= r_min - 1e-9 && rho <= R + 1e-9) inf = std::min(inf, psi[i]);
    }
    if (!std::isfinite(inf)) throw DomainError("no interior nodes in the measured region");
    r.inf.push_back(inf);
    r.shell_sup.push_back(sup_abs_over(psi, shell(d, R)));
    x.push_back(R);
    y.push_back(-std::log(inf));
  }
  const FitResult f = fit_linear(x, y);
  r.rate = f.slope;
  r.intercept = f.intercept;
  return r;
}

double predicted_C1(double C0, const CoefficientSet& coeffs, const DomainPtr& d, const NodeSubset& region) {
  if (!(C0 > 0.0)) throw DomainError("C0 must be positive");
  return C0 * compute_A(coeffs, d, region);
}

OdeDecay measure_ode_decay(double b, double c, double L, double h) {
  OdeDecay out;
  out.b = b;
  out.c = c;
  out.oracle = -ode_rates(b, c).decaying;
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::constant(1, -2.0 * b, -c);
  pb.boundary = [b, c](const Point& x) { return ode_oracle(b, c, x[0], Branch::decaying); };
  const std::vector<double> R{0.2 * L, 0.4 * L, 0.6 * L, 0.8 * L};
  auto rate = [&](double step) {
    const DomainPtr d = make_domain(GridDomain::interval(0.0, L, step));
    if (step == h) out.A = compute_A(pb.coeffs, d, all_nodes(*d));
    return measure_decay(solve(pb, d), R).rate;
  };
  out.coarse = rate(h);
  out.fine = rate(0.5 * h);
  out.rate = richardson(out.coarse, out.fine);
  return out;
}

double calibrate_C0(const std::vector<double>& rates, const std::vector<double>& A) {
  if (rates.size() != A.size() || rates.empty()) throw DomainError("calibration needs matching nonempty lists");
  double C0 = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(A[i] >= 1.0)) throw DomainError("A must be at least 1");
    C0 = std::max(C0, rates[i] / A[i]);
  }
  if (!(C0 > 0.0)) throw DomainError("calibration needs a positive rate");
  return C0;
}

ComparisonCheck comparison_check(const GridFunction& u, const GridFunction& psi, double delta) {
  if (u.size() != psi.size()) throw DomainError("comparison needs fields on the same grid");
  const GridDomain& d = u.domain();
  double mu = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu = std::max(mu, std::abs(u[i]));
    mp = std::max(mp, std::abs(psi[i]));
  }
  const double slack = 1e-10 * (1.0 + mu + std::abs(delta) * mp);
  ComparisonCheck r;
  r.delta = delta;
  r.boundary_ok = true;
  for (auto i : d.boundary_nodes()) r.boundary_ok = r.boundary_ok && u[i] <= delta * psi[i] + slack;
  r.max_violation = -kInf;
  for (auto i : d.interior_nodes()) r.max_violation = std::max(r.max_violation, u[i] - delta * psi[i]);
  r.interior_ok = r.max_violation <= slack;
  return r;
}

std::string to_string(LandisVerdict v) {
  switch (v) {
    case LandisVerdict::trivial:
      return "trivial";
    case LandisVerdict::decay_within_bound:
      return "decay_within_bound";
    case LandisVerdict::contradiction:
      return "contradiction";
    case LandisVerdict::not_a_solution:
      break;
  }
  return "not_a_solution";
}

LandisReport landis_experiment(const EllipticProblem& problem, const GridFunction& u, const GridFunction& psi,
                               const LandisOptions& opt) {
  check_increasing(opt.R_grid, "R-grid");
  if (!(opt.C1 > 0.0)) throw DomainError("C1 must be positive");
  if (u.size() != psi.size()) throw DomainError("u and psi must live on the same grid");
  const GridDomain& d = u.domain();

  double mu = 0.0, mp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    mu = std::max(mu, std::abs(u[i]));
    mp = std::max(mp, std::abs(psi[i]));
  }
  const double slack = 1e-10 * (1.0 + mu);
  bool pos = false, neg = false;
  for (auto i : d.boundary_nodes()) {
    if (!on_hole(d.point(i))) continue;
    pos = pos || u[i] > slack;
    neg = neg || u[i] < -slack;
  }
  if (pos && neg) throw PreconditionError("u takes both signs on the boundary of the domain");

  LandisReport r;
  r.C1 = opt.C1;
  r.max_abs = mu;

  // Interior equation only; boundary rows are matched to u itself.
  const LinearSystem sys = operator_system(problem, u.domain_ptr(), u);
  Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.values().data(), static_cast<Eigen::Index>(u.size()));
  const Eigen::VectorXd Mu = sys.matrix * uv;
  Eigen::VectorXd rhs = sys.rhs;
  for (auto i : d.boundary_nodes()) rhs[static_cast<Eigen::Index>(i)] = Mu[static_cast<Eigen::Index>(i)];
  r.residual = scaled_residual(sys.matrix, uv, rhs);

  std::vector<double> x, y;
  for (double R : opt.R_grid) {
    const double s = sup_abs_over(u, shell(d, R));
    r.R.push_back(R);
    r.shell_sup.push_back(s);
    r.weighted.push_back(std::exp(opt.C1 * R) * s);
    if (s > 0.0) {
      x.push_back(R);
      y.push_back(-std::log(s));
    }
  }
  r.rate = x.size() >= 2 ? fit_linear(x, y).slope : kInf;

  // Comparison with delta psi, after flipping u to be <= 0 on the hole.
  const double sign = pos ? -1.0 : 1.0;
  for (double delta : opt.deltas) {
    const double cmp_slack = 1e-10 * (1.0 + mu + delta * mp);
    double radius = 0.0;
    for (double R : opt.R_grid) {
      bool below = true;
      for (auto i : shell(d, R)) below = below && sign * u[i] < delta * psi[i];
      if (below) radius = R;
    }
    r.comparison_radius.push_back(radius);
    if (radius == 0.0) continue;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (norm(d.point(i)) <= radius + 1e-9 && sign * u[i] > delta * psi[i] + cmp_slack) {
        r.comparison_holds = false;
      }
    }
  }

  if (r.residual > opt.tolerance) {
    r.verdict = LandisVerdict::not_a_solution;
  } else if (r.weighted.back() <= opt.tolerance * std::max(1.0, mu)) {
    r.verdict = mu <= opt.tolerance ? LandisVerdict::trivial : LandisVerdict::contradiction;
  } else {
    r.verdict = r.rate <= opt.C1 * (1.0 + 1e-3) ? LandisVerdict::decay_within_bound : LandisVerdict::contradiction;
  }
  return r;
}

}  // namespace harnlab
