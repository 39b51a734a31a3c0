#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <utility>
#include <vector>

#include "harnlab/geometry.hpp"
#include "harnlab/grid.hpp"

namespace harnlab {

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;
using MatrixField = std::function<Sym2(const Point&)>;

// Coefficients of
//   divergence:     div(A Du + b1 u) + b2 . Du + c u
//   non-divergence: tr(A D^2 u) + (b1 + b2) . Du + c u
//   Pucci:          M(D^2 u) +/- |b| |Du| + c u,  |b| = |b1| + |b2|
// q and p are the integrability exponents claimed for |b| and |c|.
struct CoefficientSet {
  int dimension = 1;
  MatrixField diffusion;
  VectorField b1;
  VectorField b2;
  ScalarField c;
  double lambda = 1.0;
  double Lambda = 1.0;
  double q = kInf;
  double p = kInf;
  // Coefficients are sampled half a cell away from these points.
  std::vector<Point> singular_points;
  // Region where the fields are defined; everything by default.
  Region support = Region::everything();

  static CoefficientSet laplacian(int dimension);
  static CoefficientSet constant(int dimension, double b, double c);
};

enum class OperatorKind { divergence, nondivergence, pucci_plus, pucci_minus };

struct OperatorForm {
  OperatorKind kind = OperatorKind::nondivergence;
  // Threshold exponent for the non-divergence form; 0 selects 3n/4.
  double p_E = 0.0;

  bool is_pucci() const {
    return kind == OperatorKind::pucci_plus || kind == OperatorKind::pucci_minus;
  }
  // Smallest admissible exponent for c.
  double p0(int n) const;
};

struct EllipticProblem {
  OperatorForm form;
  CoefficientSet coeffs;
  ScalarField g;            // right-hand side, 0 if empty
  VectorField flux_source;  // h in div(h), divergence form only
  ScalarField boundary;     // Dirichlet data, 0 if empty

  // Throws DomainError when the exponents are inadmissible.
  void validate() const;
};

// Scaling exponents (beta_q, gamma_p); q > n, p > n/2.
std::pair<double, double> exponents(double q, double p, int n);

// Nodal samples with singular points offset and ellipticity checked.
struct SampledCoefficients {
  std::vector<Sym2> A;
  std::vector<Point> b1, b2;
  std::vector<double> c;
};
SampledCoefficients sample(const CoefficientSet& coeffs, const GridDomain& d);
Point sample_location(const CoefficientSet& coeffs, const Point& x, double h);

// 1 + ||b||_ul^beta + ||c||_ul^gamma with |b| = |b1| + |b2|, over the subset.
double compute_A(const CoefficientSet& coeffs, const DomainPtr& d, const NodeSubset& region);

enum class RadiusMode { weak_harnack, local_max };
double select_r0(double A, RadiusMode mode);

struct Rescaled {
  CoefficientSet coeffs;
  ScalarField g;
};
// y -> x0 + r y: A(x0+ry), r b(x0+ry), r^2 c(x0+ry), r^2 g(x0+ry).
Rescaled rescale(const CoefficientSet& coeffs, const ScalarField& g, const Point& x0, double r);

enum class PucciSign { plus, minus };
double pucci_apply(const Sym2& X, double lambda, double Lambda, PucciSign sign);
// General 2x2 input; DomainError unless symmetric.
double pucci_apply(const Eigen::Matrix2d& X, double lambda, double Lambda, PucciSign sign);

struct AssemblyDiagnostics {
  bool z_pattern = true;             // interior rows: off-diagonals >= 0, diagonal < 0
  bool diagonally_dominant = true;   // weak row dominance on interior rows
  std::size_t upwind_nodes = 0;
  std::size_t violating_rows = 0;
};

// Rows of interior nodes discretize the operator; boundary rows are identity
// with the Dirichlet value on the right-hand side. Sign convention: the matrix
// is the operator itself, so a pure Laplacian has negative diagonal.
struct LinearSystem {
  DomainPtr domain;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  Eigen::VectorXd rhs;
  AssemblyDiagnostics diagnostics;
};

LinearSystem assemble(const EllipticProblem& problem, const DomainPtr& d);
// Pucci forms linearized at u: eigenframe of the discrete Hessian picks the
// coefficient matrix, Du/|Du| picks the drift direction.
LinearSystem assemble_frozen(const EllipticProblem& problem, const DomainPtr& d,
                             const GridFunction& u);

// Operator applied to u at interior nodes (boundary entries are u - data).
Eigen::VectorXd apply_residual(const LinearSystem& sys, const Eigen::VectorXd& u);

// Full maximum-principle check: Z-pattern and a positive solution of
// -M w = 1 (interior) with w = 0 on the boundary.
bool satisfies_maximum_principle(const LinearSystem& sys);

}  // namespace harnlab
