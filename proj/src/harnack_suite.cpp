#include <cmath>
#include <tuple>

#include "harnlab/errors.hpp"
#include "harnlab/harnack.hpp"
#include "harnlab/solver.hpp"

namespace harnlab {

namespace {

constexpr int kRefine = 3;

double r_of(const Point& x) { return norm(x); }

// u'' - 2b u' - c u = 0 with data e^(D x) + e^(D- x).
EllipticProblem ode(double b, double c) {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::constant(1, -2 * b, -c);
  const double s = std::sqrt(b * b + c), dp = b + s, dm = b - s;
  pb.boundary = [dp, dm](const Point& x) { return std::exp(dp * x[0]) + std::exp(dm * x[0]); };
  return pb;
}

EllipticProblem laplace(int n, ScalarField data) {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::laplacian(n);
  pb.boundary = std::move(data);
  return pb;
}

ScalarField constant_data(double v) {
  return [v](const Point&) { return v; };
}

ScalarField linear_data(double base, double slope) {
  return [base, slope](const Point& x) { return base + slope * x[0]; };
}

HarnackCase make(std::string name, EllipticProblem pb, double R, double h,
                 HarnackGeometry g = HarnackGeometry::ball) {
  HarnackCase c;
  c.name = std::move(name);
  c.problem = std::move(pb);
  c.R = R;
  c.h = h;
  c.geometry = g;
  return c;
}

// beta |x|^(-1/2) times a unit direction: outward (radial) or along e1.
VectorField singular_drift(double beta, bool radial) {
  return [beta, radial](const Point& x) {
    const double r = r_of(x), m = beta / std::sqrt(r);
    if (!radial) return Point{m, 0.0};
    return Point{m * x[0] / r, m * x[1] / r};
  };
}

ScalarField singular_potential(double gamma, double power) {
  return [gamma, power](const Point& x) { return -gamma * std::pow(r_of(x), -power); };
}

}  // namespace

DomainPtr harnack_domain(int n, double R, double h, int refine) {
  if (!(h > 0.0) || refine < 1) throw DomainError("bad suite grid parameters");
  const double L = 2.0 * R + 2.0;
  auto cells = static_cast<long>(std::ceil(L / h - 1e-9));
  if (cells % 2 == 0) ++cells;
  cells *= refine;
  if (cells % 2 == 0) ++cells;
  const double hh = L / static_cast<double>(cells);
  if (n == 1) return make_domain(GridDomain::interval(-R - 1, R + 1, hh));
  return make_domain(GridDomain::box({-R - 1, -R - 1}, {R + 1, R + 1}, hh));
}

HarnackMeasurement measure_case(const HarnackCase& c, double eps) {
  const int n = c.problem.coeffs.dimension;
  const DomainPtr dc = harnack_domain(n, c.R, c.h, 1);
  const DomainPtr df = harnack_domain(n, c.R, c.h, kRefine);
  const auto mc = measure_harnack(c.problem, solve(c.problem, dc), c.geometry, c.R, eps);
  const auto mf = measure_harnack(c.problem, solve(c.problem, df), c.geometry, c.R, eps);
  return extrapolate(mc, mf, kRefine);
}

std::vector<HarnackCase> training_suite() {
  std::vector<HarnackCase> s;
  const double h1 = 0.02, h2 = 0.2;
  s.push_back(make("1d laplace constant", laplace(1, constant_data(1.0)), 4, h1));
  s.push_back(make("1d laplace linear", laplace(1, linear_data(2.0, 1.0 / 9.0)), 8, h1));
  s.push_back(make("1d c=1 R=4", ode(0, 1), 4, h1));
  s.push_back(make("1d c=1 R=8", ode(0, 1), 8, h1));
  s.push_back(make("1d c=4", ode(0, 4), 4, h1));
  s.push_back(make("1d b=1", ode(1, 0), 4, h1));
  s.push_back(make("1d b=1 c=1", ode(1, 1), 4, h1));
  s.push_back(make("1d b=0.5 c=2", ode(0.5, 2), 8, h1));
  {
    EllipticProblem pb = laplace(1, constant_data(1.0));
    pb.g = constant_data(-1.0);
    s.push_back(make("1d parabola", pb, 4, h1));
  }
  {
    EllipticProblem pb = laplace(1, linear_data(2.0, 0.2));
    pb.form.kind = OperatorKind::divergence;
    pb.coeffs.diffusion = [](const Point& x) { return Sym2::scalar(1.0 + 0.5 * std::sin(x[0])); };
    pb.coeffs.lambda = 0.5;
    pb.coeffs.Lambda = 1.5;
    s.push_back(make("1d divergence variable a", pb, 4, h1));
  }
  {
    EllipticProblem pb = laplace(1, constant_data(1.0));
    pb.coeffs.diffusion = [](const Point& x) { return Sym2::scalar(1.0 + 0.5 * std::cos(2 * x[0])); };
    pb.coeffs.lambda = 0.5;
    pb.coeffs.Lambda = 1.5;
    pb.coeffs.c = constant_data(-1.0);
    s.push_back(make("1d variable a c=1", pb, 4, h1));
  }
  s.push_back(make("1d c=1 annulus", ode(0, 1), 4, h1, HarnackGeometry::annulus));

  s.push_back(make("2d laplace constant", laplace(2, constant_data(1.0)), 4, h2));
  s.push_back(make("2d laplace linear", laplace(2, linear_data(3.0, 0.2)), 4, h2));
  {
    EllipticProblem pb = laplace(2, [](const Point& x) { return std::cosh(x[0]); });
    pb.coeffs.c = constant_data(-1.0);
    s.push_back(make("2d c=1", pb, 4, h2));
  }
  {
    EllipticProblem pb = laplace(2, [](const Point& x) { return 1.0 + std::exp(x[0]); });
    pb.coeffs.b1 = [](const Point&) { return Point{-1.0, 0.0}; };
    s.push_back(make("2d b=0.5", pb, 4, h2));
  }
  {
    EllipticProblem pb = laplace(2, constant_data(1.0));
    pb.g = constant_data(-1.0);
    s.push_back(make("2d paraboloid", pb, 4, h2));
  }
  {
    EllipticProblem pb = laplace(2, constant_data(1.0));
    pb.coeffs.diffusion = [](const Point& x) {
      return Sym2{1.0 + 0.3 * std::sin(x[0]), 0.0, 1.0 + 0.3 * std::cos(x[1])};
    };
    pb.coeffs.lambda = 0.7;
    pb.coeffs.Lambda = 1.3;
    pb.coeffs.c = constant_data(-0.5);
    s.push_back(make("2d variable A", pb, 4, h2));
  }
  {
    EllipticProblem pb = laplace(2, [](const Point& x) { return std::cosh(x[0]); });
    pb.coeffs.c = constant_data(-1.0);
    s.push_back(make("2d c=1 annulus", pb, 4, h2, HarnackGeometry::annulus));
  }
  return s;
}

std::vector<HarnackCase> heldout_suite() {
  std::vector<HarnackCase> s;
  const double h1 = 0.02, h2 = 0.2;
  auto with_origin = [](EllipticProblem& pb) { pb.coeffs.singular_points = {Point{0.0, 0.0}}; };

  // 1D drifts |x|^(-1/2) in L^1.5.
  for (auto [beta, R, radial] : {std::tuple{0.5, 4.0, true}, std::tuple{1.0, 8.0, true},
                                 std::tuple{1.0, 4.0, false}, std::tuple{0.5, 8.0, false}}) {
    EllipticProblem pb = laplace(1, linear_data(2.0, (radial ? 1.0 : -0.5) / (R + 1)));
    pb.coeffs.b1 = singular_drift(radial ? beta : -beta, radial);
    pb.coeffs.q = 1.5;
    with_origin(pb);
    s.push_back(make("1d singular drift", pb, R, h1));
  }
  // 1D divergence form with c = -gamma/|x| in L^0.75.
  for (auto [gamma, R, g] :
       {std::tuple{0.5, 4.0, HarnackGeometry::ball}, std::tuple{1.0, 4.0, HarnackGeometry::ball},
        std::tuple{0.5, 8.0, HarnackGeometry::ball}, std::tuple{1.0, 8.0, HarnackGeometry::annulus}}) {
    EllipticProblem pb = laplace(1, constant_data(1.0));
    pb.form.kind = OperatorKind::divergence;
    pb.coeffs.c = singular_potential(gamma, 1.0);
    pb.coeffs.p = 0.75;
    with_origin(pb);
    s.push_back(make("1d singular potential", pb, R, h1, g));
  }
  // 1D divergence form with both singular, variable diffusion.
  for (double R : {4.0, 8.0}) {
    EllipticProblem pb = laplace(1, linear_data(2.0, 0.5 / (R + 1)));
    pb.form.kind = OperatorKind::divergence;
    pb.coeffs.diffusion = [](const Point& x) { return Sym2::scalar(1.0 + 0.5 * std::sin(x[0])); };
    pb.coeffs.lambda = 0.5;
    pb.coeffs.Lambda = 1.5;
    pb.coeffs.b2 = singular_drift(0.5, false);
    pb.coeffs.q = 1.5;
    pb.coeffs.c = singular_potential(0.5, 0.5);
    pb.coeffs.p = 1.5;
    with_origin(pb);
    s.push_back(make("1d mixed singular", pb, R, h1));
  }
  // 1D bounded but outside the training family.
  for (double R : {4.0, 8.0}) {
    EllipticProblem pb = laplace(1, constant_data(1.0));
    pb.coeffs.diffusion = [](const Point& x) { return Sym2::scalar(1.0 + 0.5 * std::cos(3 * x[0])); };
    pb.coeffs.lambda = 0.5;
    pb.coeffs.Lambda = 1.5;
    pb.coeffs.b1 = [](const Point&) { return Point{0.7, 0.0}; };
    pb.coeffs.c = constant_data(-2.0);
    if (R > 4.0) pb.g = constant_data(-0.5);
    s.push_back(make("1d oscillating diffusion", pb, R, h1));
  }
  // 2D radial drift |x|^(-1/2) in L^3.
  for (double beta : {0.5, 1.0}) {
    EllipticProblem pb = laplace(2, linear_data(2.0, 0.2));
    pb.coeffs.b1 = singular_drift(beta, true);
    pb.coeffs.q = 3.0;
    with_origin(pb);
    s.push_back(make("2d singular drift", pb, 4, h2));
  }
  // 2D divergence form with c = -gamma/|x| in L^1.5.
  for (double gamma : {0.5, 1.0}) {
    EllipticProblem pb = laplace(2, constant_data(1.0));
    pb.form.kind = OperatorKind::divergence;
    pb.coeffs.c = singular_potential(gamma, 1.0);
    pb.coeffs.p = 1.5;
    with_origin(pb);
    s.push_back(make("2d singular potential", pb, 4, h2));
  }
  // 2D divergence form with a singular transport drift and bounded c.
  for (double beta : {0.5, 1.0}) {
    EllipticProblem pb = laplace(2, [](const Point& x) { return 1.5 + 0.2 * x[1]; });
    pb.form.kind = OperatorKind::divergence;
    pb.coeffs.b2 = singular_drift(beta, false);
    pb.coeffs.q = 3.0;
    pb.coeffs.c = constant_data(-0.5);
    with_origin(pb);
    s.push_back(make("2d singular transport", pb, 4, h2));
  }
  // 2D non-divergence, variable A, c = -gamma/|x| in L^1.8.
  for (double gamma : {0.5, 1.0}) {
    EllipticProblem pb = laplace(2, constant_data(1.0));
    pb.coeffs.diffusion = [](const Point& x) { return Sym2{1.0 + 0.3 * std::sin(x[0] * x[1]), 0.0, 1.0}; };
    pb.coeffs.lambda = 0.7;
    pb.coeffs.Lambda = 1.3;
    pb.coeffs.c = singular_potential(gamma, 1.0);
    pb.coeffs.p = 1.8;
    with_origin(pb);
    s.push_back(make("2d variable A singular potential", pb, 4, h2));
  }
  return s;
}

}  // namespace harnlab
