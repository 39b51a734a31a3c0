#include <cmath>
#include <numbers>

#include "doctest.h"
#include "harnlab/errors.hpp"
#include "harnlab/quadrature.hpp"
#include "harnlab/solver.hpp"

using namespace harnlab;

namespace {

// u'' - 2b u' - c u = 0 in operator form: drift -2b, zero-order -c.
EllipticProblem ode(double b, double c, double D) {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::constant(1, -2 * b, -c);
  pb.boundary = [D](const Point& x) { return std::exp(D * x[0]); };
  return pb;
}

double rel_sup_error(const GridFunction& u, const std::function<double(double)>& exact) {
  double err = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double e = exact(u.domain().point(i)[0]);
    err = std::max(err, std::abs(u[i] - e));
    mx = std::max(mx, std::abs(e));
  }
  return err / mx;
}

}  // namespace

TEST_CASE("exponential ODE solution after two Richardson passes") {
  const double b = 3.0, c = 4.0, D = b + std::sqrt(b * b + c);
  EllipticProblem pb = ode(b, c, D);
  std::vector<GridFunction> u;
  for (double h : {0.01, 0.005, 0.0025}) u.push_back(solve(pb, make_domain(GridDomain::interval(0, 10, h))));
  const GridFunction r = richardson(u[0], u[1], u[2]);
  const double extrapolated = rel_sup_error(r, [D](double x) { return std::exp(D * x); });
  CHECK(extrapolated <= 1e-5);
  CHECK(extrapolated < 0.01 * rel_sup_error(u[2], [D](double x) { return std::exp(D * x); }));
}

TEST_CASE("polynomial solutions are reproduced to rounding") {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::laplacian(1);
  pb.g = [](const Point&) { return -1.0; };
  auto u = solve(pb, make_domain(GridDomain::interval(0, 1, 0.01)));
  CHECK(rel_sup_error(u, [](double x) { return x * (1 - x) / 2; }) < 1e-10);

  EllipticProblem lap;
  lap.coeffs = CoefficientSet::laplacian(2);
  lap.g = [](const Point&) { return 4.0; };
  lap.boundary = [](const Point&) { return 1.0; };
  auto d = make_domain(GridDomain::disk(1.0, 0.05));
  auto v = solve(lap, d);
  double err = 0.0;
  for (std::size_t i = 0; i < d->size(); ++i) err = std::max(err, std::abs(v[i] - std::pow(norm(d->point(i)), 2)));
  CHECK(err < 1e-9);
}

TEST_CASE("solver methods agree") {
  EllipticProblem pb = ode(0.5, 1.0, 0.5 + std::sqrt(1.25));
  auto d = make_domain(GridDomain::interval(0, 4, 0.01));
  const LinearSystem sys = assemble(pb, d);
  SolveOptions o;
  o.method = SolveMethod::direct_banded;
  auto a = solve_linear(sys, o);
  o.method = SolveMethod::sparse_direct;
  auto b = solve_linear(sys, o);
  o.method = SolveMethod::stabilized_krylov;
  auto c = solve_linear(sys, o);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-7));
    CHECK(c[i] == doctest::Approx(a[i]).epsilon(1e-7));
  }
}

TEST_CASE("singular systems and bad options raise") {
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(3, 3);
  m.insert(0, 0) = 1.0;
  m.insert(2, 2) = 1.0;
  m.makeCompressed();
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(3);
  CHECK_THROWS_AS(solve_linear(m, rhs), SingularSystemError);
  SolveOptions o;
  o.method = SolveMethod::sparse_direct;
  CHECK_THROWS_AS(solve_linear(m, rhs, o), SolverError);
  o.damping = 0.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
}

TEST_CASE("semilinear Newton reproduces cosh") {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::laplacian(1);
  pb.boundary = [](const Point& x) { return std::cosh(x[0]); };
  std::vector<double> errs;
  for (double h : {2e-3, 1e-3}) {
    auto res = solve_semilinear(pb, make_domain(GridDomain::interval(-1, 1, h)), [](double s) { return s; });
    errs.push_back(rel_sup_error(res.u, [](double x) { return std::cosh(x); }));
    CHECK(res.iterations <= 3);
  }
  CHECK(errs[1] <= 1e-6);
  CHECK(errs[1] < errs[0]);
}

TEST_CASE("Pucci policy iteration") {
  // M+(u'') = Lambda u'' for convex u: u = x^2 solves M+ u = 2 Lambda.
  EllipticProblem pb;
  pb.form.kind = OperatorKind::pucci_plus;
  pb.coeffs = CoefficientSet::laplacian(1);
  pb.coeffs.lambda = 0.5;
  pb.coeffs.Lambda = 2.0;
  pb.g = [](const Point&) { return 4.0; };
  pb.boundary = [](const Point& x) { return x[0] * x[0]; };
  auto u = solve(pb, make_domain(GridDomain::interval(-1, 1, 0.01)));
  CHECK(rel_sup_error(u, [](double x) { return x * x; }) < 1e-9);

  // M-(D^2 e^x1) = lambda e^x1, so e^x1 solves M- u - lambda u = 0 on a box.
  EllipticProblem box;
  box.form.kind = OperatorKind::pucci_minus;
  box.coeffs = CoefficientSet::laplacian(2);
  box.coeffs.lambda = 0.5;
  box.coeffs.Lambda = 2.0;
  box.coeffs.c = [](const Point&) { return -0.5; };
  box.boundary = [](const Point& x) { return std::exp(x[0]); };
  auto d = make_domain(GridDomain::box({-1, -1}, {1, 1}, 0.05));
  auto v = solve(box, d);
  double err = 0.0;
  for (std::size_t i = 0; i < d->size(); ++i) err = std::max(err, std::abs(v[i] - std::exp(d->point(i)[0])));
  CHECK(err < 1e-3);
}

TEST_CASE("singular integrals are classified by their tails") {
  auto a = quad_singular([](double s) { return 1 / std::sqrt(s); }, 1.0);
  CHECK(a.status == Convergence::converges);
  CHECK(a.value == doctest::Approx(2.0).epsilon(1e-9));

  auto b = quad_singular([](double s) { return 1 / s; }, 1.0);
  CHECK(b.status == Convergence::diverges);

  auto c = quad_singular([](double s) { return 1 / (s * std::pow(std::abs(std::log(s)), 1.5)); }, 0.5);
  CHECK(c.status == Convergence::converges);
  CHECK(c.value == doctest::Approx(2 / std::sqrt(std::log(2.0))).epsilon(1e-8));

  auto d = quad_singular([](double s) { return 1 / (s * std::abs(std::log(s))); }, 0.5);
  CHECK(d.status == Convergence::diverges);

  CHECK_THROWS_AS(quad_singular([](double) { return 1.0; }, 1e-14), DomainError);
}

TEST_CASE("Richardson extrapolation of scalars") {
  // f(h) = 1 + h^2: extrapolation from h = 0.1, 0.05 is exact.
  CHECK(richardson(1.01, 1.0025) == doctest::Approx(1.0).epsilon(1e-14));
}
