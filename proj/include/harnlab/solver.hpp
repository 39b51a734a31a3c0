#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <optional>
#include <vector>

#include "harnlab/grid.hpp"
#include "harnlab/operators.hpp"

namespace harnlab {

enum class SolveMethod { automatic, direct_banded, sparse_direct, stabilized_krylov };

struct SolveOptions {
  SolveMethod method = SolveMethod::automatic;
  // Residual tolerance relative to 1 + |rhs|, measured after scaling each
  // row by its diagonal.
  double tolerance = 1e-10;
  int max_iterations = 200;
  // Newton step damping for semilinear problems, in (0, 1].
  double damping = 1.0;

  void validate() const;
};

// Solves M x = rhs. Throws SingularSystemError or SolverError.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                             const Eigen::VectorXd& rhs, const SolveOptions& opt = {});
GridFunction solve_linear(const LinearSystem& sys, const SolveOptions& opt = {});

// Linear forms are assembled and solved once; Pucci forms go through policy
// iteration on the frozen-eigenframe linearization.
GridFunction solve(const EllipticProblem& problem, const DomainPtr& d, const SolveOptions& opt = {});

struct SemilinearResult {
  GridFunction u;
  int iterations = 0;
  std::vector<double> residuals;
  bool picard_used = false;
};

// Solves L u = g + f(u) at interior nodes with Dirichlet data on the boundary.
// f is evaluated pointwise and differentiated numerically.
SemilinearResult solve_semilinear(const EllipticProblem& problem, const DomainPtr& d,
                                  const std::function<double(double)>& f,
                                  const SolveOptions& opt = {},
                                  const std::optional<GridFunction>& initial = std::nullopt);

// Scaled residual used by all convergence tests.
double scaled_residual(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& rhs);

// Richardson extrapolation of values computed at h and h/2 for a method of
// the given order.
double richardson(double coarse, double fine, double order = 2.0);

// Extrapolated grid function on the coarse grid's nodes. The finer grids must
// be uniform refinements (every coarse node is a fine node). With three
// levels the second pass removes the next even-order term.
GridFunction richardson(const GridFunction& h, const GridFunction& h2, double order = 2.0);
GridFunction richardson(const GridFunction& h, const GridFunction& h2, const GridFunction& h4);

}  // namespace harnlab
