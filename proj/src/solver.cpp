#include "harnlab/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <cmath>
#include <string>

#include "harnlab/errors.hpp"

namespace harnlab {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void SolveOptions::validate() const {
  if (!(tolerance > 0.0)) throw DomainError("solver tolerance must be positive");
  if (max_iterations < 1) throw DomainError("need at least one iteration");
  if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
}

double scaled_residual(const RowMatrix& m, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) {
  const Eigen::VectorXd r = m * x - rhs;
  double rn = 0.0, bn = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double dv = std::abs(m.coeff(i, i));
    if (dv == 0.0) dv = 1.0;
    rn = std::max(rn, std::abs(r[i]) / dv);
    bn = std::max(bn, std::abs(rhs[i]) / dv);
  }
  return rn / (1.0 + bn);
}

namespace {

bool is_tridiagonal(const RowMatrix& m) {
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (RowMatrix::InnerIterator it(m, i); it; ++it) {
      if (std::abs(it.col() - i) > 1) return false;
    }
  }
  return true;
}

Eigen::VectorXd thomas(const RowMatrix& m, const Eigen::VectorXd& rhs) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(n), diag = Eigen::VectorXd::Zero(n),
                  upper = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (RowMatrix::InnerIterator it(m, i); it; ++it) {
      if (it.col() == i - 1) lower[i] = it.value();
      if (it.col() == i) diag[i] = it.value();
      if (it.col() == i + 1) upper[i] = it.value();
    }
  }
  Eigen::VectorXd cp(n), dp(n), x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double denom = diag[i] - (i > 0 ? lower[i] * cp[i - 1] : 0.0);
    if (denom == 0.0 || !std::isfinite(denom)) {
      throw SingularSystemError("zero pivot in banded solve at row " + std::to_string(i));
    }
    cp[i] = upper[i] / denom;
    dp[i] = (rhs[i] - (i > 0 ? lower[i] * dp[i - 1] : 0.0)) / denom;
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    x[i] = dp[i] - (i + 1 < n ? cp[i] * x[i + 1] : 0.0);
  }
  return x;
}

}  // namespace

Eigen::VectorXd solve_linear(const RowMatrix& m, const Eigen::VectorXd& rhs, const SolveOptions& opt) {
  opt.validate();
  if (m.rows() != m.cols() || m.rows() != rhs.size()) throw DomainError("system shape mismatch");
  SolveMethod method = opt.method;
  if (method == SolveMethod::automatic) {
    method = is_tridiagonal(m) ? SolveMethod::direct_banded : SolveMethod::sparse_direct;
  }
  Eigen::VectorXd x;
  if (method == SolveMethod::direct_banded) {
    if (!is_tridiagonal(m)) throw DomainError("banded solver needs a tridiagonal system");
    x = thomas(m, rhs);
    for (int pass = 0; pass < 3 && scaled_residual(m, x, rhs) > opt.tolerance; ++pass) {
      x += thomas(m, rhs - m * x);
    }
  } else if (method == SolveMethod::sparse_direct) {
    Eigen::SparseMatrix<double> cm(m);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(cm);
    if (lu.info() != Eigen::Success) throw SingularSystemError("sparse LU factorization failed");
    x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw SingularSystemError("sparse LU solve failed");
    for (int pass = 0; pass < 3 && scaled_residual(m, x, rhs) > opt.tolerance; ++pass) {
      x += lu.solve(rhs - m * x);
    }
  } else {
    Eigen::BiCGSTAB<RowMatrix, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(opt.tolerance * 1e-2);
    it.setMaxIterations(std::max(opt.max_iterations, 1000));
    it.compute(m);
    if (it.info() != Eigen::Success) throw SingularSystemError("ILUT preconditioner failed");
    x = it.solve(rhs);
    if (it.info() != Eigen::Success) {
      throw SolverError("BiCGSTAB did not converge", {scaled_residual(m, x, rhs)});
    }
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw SingularSystemError("linear solve produced non-finite values");
  }
  const double res = scaled_residual(m, x, rhs);
  if (res > opt.tolerance) {
    throw SolverError("linear residual " + std::to_string(res) + " above tolerance", {res});
  }
  return x;
}

GridFunction solve_linear(const LinearSystem& sys, const SolveOptions& opt) {
  const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs, opt);
  return GridFunction(sys.domain, std::vector<double>(x.data(), x.data() + x.size()));
}

namespace {

GridFunction to_grid(const DomainPtr& d, const Eigen::VectorXd& x) {
  return GridFunction(d, std::vector<double>(x.data(), x.data() + x.size()));
}

}  // namespace

GridFunction solve(const EllipticProblem& problem, const DomainPtr& d, const SolveOptions& opt) {
  if (!problem.form.is_pucci()) return solve_linear(assemble(problem, d), opt);
  opt.validate();
  std::vector<double> start(d->size(), 0.0);
  if (problem.boundary) {
    for (auto i : d->boundary_nodes()) start[i] = problem.boundary(d->point(i));
  }
  GridFunction u(d, std::move(start));
  std::vector<double> history;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const LinearSystem sys = assemble_frozen(problem, d, u);
    const Eigen::VectorXd x = solve_linear(sys.matrix, sys.rhs, opt);
    GridFunction next = to_grid(d, x);
    const LinearSystem check = assemble_frozen(problem, d, next);
    const double res = scaled_residual(check.matrix, x, check.rhs);
    history.push_back(res);
    u = std::move(next);
    if (res <= opt.tolerance) return u;
  }
  throw SolverError("policy iteration did not converge", history);
}

SemilinearResult solve_semilinear(const EllipticProblem& problem, const DomainPtr& d,
                                  const std::function<double(double)>& f, const SolveOptions& opt,
                                  const std::optional<GridFunction>& initial) {
  opt.validate();
  if (problem.form.is_pucci()) throw DomainError("semilinear solve needs a linear principal part");
  const LinearSystem sys = assemble(problem, d);
  const RowMatrix& M = sys.matrix;
  const Eigen::Index n = M.rows();
  std::vector<char> interior(static_cast<std::size_t>(n), 0);
  for (auto i : d->interior_nodes()) interior[i] = 1;

  auto nonlinear = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd F = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (interior[static_cast<std::size_t>(i)]) F[i] = f(u[i]);
    }
    return F;
  };
  auto residual = [&](const Eigen::VectorXd& u) { return scaled_residual(M, u, sys.rhs + nonlinear(u)); };

  Eigen::VectorXd u;
  if (initial) {
    if (initial->size() != static_cast<std::size_t>(n)) throw DomainError("initial iterate size mismatch");
    u = Eigen::Map<const Eigen::VectorXd>(initial->values().data(), n);
  } else {
    u = solve_linear(M, sys.rhs + nonlinear(Eigen::VectorXd::Zero(n)), opt);
  }

  SemilinearResult out;
  double res = residual(u);
  out.residuals.push_back(res);
  bool picard = false;
  constexpr int kWatchdogSteps = 15;
  int watchdog = 0;
  bool watchdog_spent = false;
  Eigen::VectorXd ref_u;
  double ref_res = kInf;
  for (int it = 0; it < opt.max_iterations && res > opt.tolerance; ++it) {
    Eigen::VectorXd next;
    if (!picard) {
      // Newton on M u - rhs - F(u) = 0.
      RowMatrix J = M;
      double dmax = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!interior[static_cast<std::size_t>(i)]) continue;
        // Relative step; one-sided at tiny |u| so f is not sampled across 0.
        const double eta = std::abs(u[i]) > 1e-280 ? 1e-6 * std::abs(u[i]) : 1e-14;
        const double df = u[i] > eta ? (f(u[i] + eta) - f(u[i] - eta)) / (2 * eta)
                                     : (f(u[i] + eta) - f(u[i])) / eta;
        dmax = std::max(dmax, std::abs(df));
        J.coeffRef(i, i) -= df;
      }
      if (dmax > 1e6) {
        picard = true;
        out.picard_used = true;
        continue;
      }
      const Eigen::VectorXd r = M * u - sys.rhs - nonlinear(u);
      SolveOptions lin = opt;
      lin.tolerance = std::max(opt.tolerance * 1e-2, 1e-14);
      Eigen::VectorXd step;
      try {
        step = solve_linear(J, -r, lin);
      } catch (const SolverError&) {
        picard = true;
        out.picard_used = true;
        continue;
      }
      // Positive entries shrink by at most a factor 10 per step, so a steep
      // f near 0 cannot throw the iterate across 0 in one go.
      auto advance = [&](double t) {
        Eigen::VectorXd v = u + t * step;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (u[i] > 0.0 && v[i] < 0.1 * u[i]) v[i] = 0.1 * u[i];
        }
        return v;
      };
      double t = opt.damping;
      next = advance(t);
      double trial = residual(next);
      if (watchdog == 0 && trial > (1 - 1e-4 * t) * res) {
        if (!watchdog_spent) {
          // Full steps for a while from a saved reference; Newton often
          // raises the residual before it converges.
          ref_u = u;
          ref_res = res;
          watchdog = kWatchdogSteps;
        } else {
          while (trial > (1 - 1e-4 * t) * res && t > 1e-4) {
            t *= 0.5;
            next = advance(t);
            trial = residual(next);
          }
          if (trial > res) {
            picard = true;
            out.picard_used = true;
            continue;
          }
        }
      }
    } else {
      next = solve_linear(M, sys.rhs + nonlinear(u), opt);
    }
    u = std::move(next);
    res = residual(u);
    if (watchdog > 0) {
      if (res < ref_res) {
        watchdog = 0;
      } else if (--watchdog == 0) {
        u = ref_u;
        res = ref_res;
        watchdog_spent = true;
      }
    }
    out.residuals.push_back(res);
    ++out.iterations;
  }
  if (!(res <= opt.tolerance)) {
    throw SolverError("semilinear iteration did not converge", out.residuals);
  }
  out.u = to_grid(d, u);
  return out;
}

double richardson(double coarse, double fine, double order) {
  const double f = std::pow(2.0, order);
  return (f * fine - coarse) / (f - 1.0);
}

namespace {

// Index of the fine node that coincides with coarse node i.
std::size_t fine_index(const GridDomain& c, const GridDomain& f, std::size_t i) {
  std::size_t j = 0;
  switch (c.shape()) {
    case Shape::interval:
      j = 2 * i;
      break;
    case Shape::box:
      j = f.box_index(2 * (i % c.nx()), 2 * (i / c.nx()));
      break;
    case Shape::disk:
      if (i == 0) {
        j = 0;
      } else {
        const std::size_t ring = (i - 1) / c.n_theta(), k = (i - 1) % c.n_theta();
        j = f.polar_index(2 * ring + 1, k * (f.n_theta() / c.n_theta()));
      }
      break;
    case Shape::annulus: {
      const std::size_t ring = i / c.n_theta(), k = i % c.n_theta();
      j = f.polar_index(2 * ring, k * (f.n_theta() / c.n_theta()));
      break;
    }
  }
  const double tol = 1e-9 * (1.0 + norm(c.point(i)));
  if (j >= f.size() || distance(c.point(i), f.point(j)) > tol) {
    throw DomainError("grids are not nested refinements");
  }
  return j;
}

}  // namespace

GridFunction richardson(const GridFunction& h, const GridFunction& h2, double order) {
  const GridDomain& c = h.domain();
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    v[i] = richardson(h[i], h2[fine_index(c, h2.domain(), i)], order);
  }
  return GridFunction(h.domain_ptr(), std::move(v));
}

GridFunction richardson(const GridFunction& h, const GridFunction& h2, const GridFunction& h4) {
  const GridFunction r1 = richardson(h, h2, 2.0);
  const GridFunction r1f = richardson(h2, h4, 2.0);
  const GridDomain& c = h.domain();
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    v[i] = richardson(r1[i], r1f[fine_index(c, h2.domain(), i)], 4.0);
  }
  return GridFunction(h.domain_ptr(), std::move(v));
}

}  // namespace harnlab
