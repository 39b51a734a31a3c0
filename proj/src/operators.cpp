#include "harnlab/operators.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <string>

#include "harnlab/errors.hpp"

namespace harnlab {

CoefficientSet CoefficientSet::laplacian(int dimension) {
  CoefficientSet k;
  k.dimension = dimension;
  return k;
}

CoefficientSet CoefficientSet::constant(int dimension, double b, double c) {
  CoefficientSet k;
  k.dimension = dimension;
  k.b1 = [b](const Point&) { return Point{b, 0.0}; };
  k.c = [c](const Point&) { return c; };
  return k;
}

double OperatorForm::p0(int n) const {
  if (kind == OperatorKind::divergence) return 0.5 * n;
  const double pe = p_E > 0.0 ? p_E : 0.75 * n;
  if (!(pe > 0.5 * n && pe < n)) throw DomainError("p_E must lie in (n/2, n)");
  return pe;
}

void EllipticProblem::validate() const {
  const int n = coeffs.dimension;
  if (n != 1 && n != 2) throw DomainError("dimension must be 1 or 2");
  if (!(coeffs.lambda > 0.0) || coeffs.Lambda < coeffs.lambda) {
    throw DomainError("ellipticity constants need 0 < lambda <= Lambda");
  }
  if (!(coeffs.q > n)) throw DomainError("drift exponent q must exceed n");
  if (!(coeffs.p > form.p0(n))) throw DomainError("potential exponent p must exceed p0");
  if (flux_source && form.kind != OperatorKind::divergence) {
    throw DomainError("a divergence source needs the divergence form");
  }
}

std::pair<double, double> exponents(double q, double p, int n) {
  if (!(q > n)) throw DomainError("q must exceed n");
  if (!(p > 0.5 * n)) throw DomainError("p must exceed n/2");
  const double beta = std::isinf(q) ? 1.0 : q / (q - n);
  const double gamma = std::isinf(p) ? 0.5 : p / (2 * p - n);
  return {beta, gamma};
}

Point sample_location(const CoefficientSet& coeffs, const Point& x, double h) {
  for (const auto& s : coeffs.singular_points) {
    const Point v = x - s;
    const double d = norm(v);
    if (d < 0.5 * h) {
      const Point dir = d > 0.0 ? (1.0 / d) * v : Point{1.0, 0.0};
      return s + (0.5 * h) * dir;
    }
  }
  return x;
}

SampledCoefficients sample(const CoefficientSet& coeffs, const GridDomain& d) {
  if (coeffs.dimension != d.dimension()) {
    throw DomainError("coefficient dimension does not match the grid");
  }
  const std::size_t n = d.size();
  SampledCoefficients s;
  s.A.resize(n, Sym2::identity());
  s.b1.assign(n, Point{0.0, 0.0});
  s.b2.assign(n, Point{0.0, 0.0});
  s.c.assign(n, 0.0);
  const double lo = coeffs.lambda * (1 - 1e-12), hi = coeffs.Lambda * (1 + 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    const Point y = sample_location(coeffs, d.point(i), d.spacing());
    if (coeffs.diffusion) s.A[i] = coeffs.diffusion(y);
    if (d.dimension() == 1) s.A[i] = {s.A[i].xx, 0.0, 0.0};
    if (coeffs.b1) s.b1[i] = coeffs.b1(y);
    if (coeffs.b2) s.b2[i] = coeffs.b2(y);
    if (coeffs.c) s.c[i] = coeffs.c(y);
    if (d.dimension() == 1) {
      s.b1[i][1] = 0.0;
      s.b2[i][1] = 0.0;
    }
    const auto ev = d.dimension() == 1 ? std::array<double, 2>{s.A[i].xx, s.A[i].xx}
                                       : s.A[i].eigenvalues();
    if (!(ev[0] >= lo && ev[1] <= hi)) {
      throw DomainError("diffusion matrix not uniformly elliptic at node " + std::to_string(i));
    }
    if (!std::isfinite(s.b1[i][0] + s.b1[i][1] + s.b2[i][0] + s.b2[i][1] + s.c[i])) {
      throw DomainError("non-finite coefficient at node " + std::to_string(i));
    }
  }
  return s;
}

double compute_A(const CoefficientSet& coeffs, const DomainPtr& d, const NodeSubset& region) {
  const auto [beta, gamma] = exponents(coeffs.q, coeffs.p, coeffs.dimension);
  const SampledCoefficients s = sample(coeffs, *d);
  std::vector<double> bmag(d->size()), cmag(d->size());
  for (std::size_t i = 0; i < d->size(); ++i) {
    bmag[i] = norm(s.b1[i]) + norm(s.b2[i]);
    cmag[i] = std::abs(s.c[i]);
  }
  const double nb = ul_norm(GridFunction(d, std::move(bmag)), coeffs.q, region);
  const double nc = ul_norm(GridFunction(d, std::move(cmag)), coeffs.p, region);
  return 1.0 + std::pow(nb, beta) + std::pow(nc, gamma);
}

double select_r0(double A, RadiusMode mode) {
  if (!(A >= 1.0)) throw DomainError("A must be at least 1");
  return mode == RadiusMode::weak_harnack ? 1.0 / (3.0 * A) : 1.0 / (2.0 * A);
}

namespace {

bool contains_ball(const Region& g, const Point& x0, double rad, int dim) {
  const double tol = 1e-12 * (1.0 + rad);
  switch (g.kind) {
    case Region::Kind::everything:
      return true;
    case Region::Kind::ball:
      return distance(x0, g.center) + rad <= g.r_outer + tol;
    case Region::Kind::annulus: {
      const double dd = distance(x0, g.center);
      return dd - rad >= g.r_inner - tol && dd + rad <= g.r_outer + tol;
    }
    case Region::Kind::interval:
      return x0[0] - rad >= g.lo[0] - tol && x0[0] + rad <= g.hi[0] + tol;
    case Region::Kind::box:
      return x0[0] - rad >= g.lo[0] - tol && x0[0] + rad <= g.hi[0] + tol &&
             (dim == 1 || (x0[1] - rad >= g.lo[1] - tol && x0[1] + rad <= g.hi[1] + tol));
  }
  return false;
}

}  // namespace

Rescaled rescale(const CoefficientSet& coeffs, const ScalarField& g, const Point& x0, double r) {
  if (!(r > 0.0)) throw DomainError("rescaling radius must be positive");
  if (!contains_ball(coeffs.support, x0, 2 * r, coeffs.dimension)) {
    throw DomainError("B_2r(x0) leaves the coefficient support");
  }
  Rescaled out;
  CoefficientSet& k = out.coeffs;
  k = coeffs;
  auto map = [x0, r](const Point& y) { return x0 + r * y; };
  if (coeffs.diffusion) {
    k.diffusion = [f = coeffs.diffusion, map](const Point& y) { return f(map(y)); };
  }
  if (coeffs.b1) {
    k.b1 = [f = coeffs.b1, map, r](const Point& y) { return r * f(map(y)); };
  }
  if (coeffs.b2) {
    k.b2 = [f = coeffs.b2, map, r](const Point& y) { return r * f(map(y)); };
  }
  if (coeffs.c) {
    k.c = [f = coeffs.c, map, r](const Point& y) { return r * r * f(map(y)); };
  }
  k.singular_points.clear();
  for (const auto& s : coeffs.singular_points) k.singular_points.push_back((1.0 / r) * (s - x0));
  k.support = Region::everything();
  if (g) out.g = [g, map, r](const Point& y) { return r * r * g(map(y)); };
  return out;
}

double pucci_apply(const Sym2& X, double lambda, double Lambda, PucciSign sign) {
  if (!(lambda > 0.0) || Lambda < lambda) throw DomainError("need 0 < lambda <= Lambda");
  const auto ev = X.eigenvalues();
  double pos = 0.0, neg = 0.0;
  for (double e : ev) (e > 0.0 ? pos : neg) += e;
  return sign == PucciSign::plus ? Lambda * pos + lambda * neg : lambda * pos + Lambda * neg;
}

double pucci_apply(const Eigen::Matrix2d& X, double lambda, double Lambda, PucciSign sign) {
  const double scale = std::max(1.0, X.cwiseAbs().maxCoeff());
  if (std::abs(X(0, 1) - X(1, 0)) > 1e-12 * scale) throw DomainError("Pucci input not symmetric");
  return pucci_apply(Sym2{X(0, 0), X(0, 1), X(1, 1)}, lambda, Lambda, sign);
}

Eigen::VectorXd apply_residual(const LinearSystem& sys, const Eigen::VectorXd& u) {
  return sys.matrix * u - sys.rhs;
}

bool satisfies_maximum_principle(const LinearSystem& sys) {
  if (!sys.diagnostics.z_pattern) return false;
  const GridDomain& d = *sys.domain;
  Eigen::SparseMatrix<double> m = -Eigen::SparseMatrix<double>(sys.matrix);
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.size()));
  for (auto i : d.interior_nodes()) ones[static_cast<Eigen::Index>(i)] = 1.0;
  for (auto i : d.boundary_nodes()) {
    // boundary rows are identity; flip back so w = 0 there
    m.coeffRef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  }
  m.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) return false;
  const Eigen::VectorXd w = lu.solve(ones);
  if (lu.info() != Eigen::Success) return false;
  for (auto i : d.interior_nodes()) {
    if (!(w[static_cast<Eigen::Index>(i)] > 0.0)) return false;
  }
  return true;
}

}  // namespace harnlab
