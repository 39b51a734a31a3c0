#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harnlab/grid.hpp"
#include "harnlab/operators.hpp"
#include "harnlab/solver.hpp"

namespace harnlab {

// Exponents of e^(Dx) solving u'' - 2b u' - c u = 0: D = b +/- sqrt(b^2 + c).
struct OdeRates {
  double growing = 0.0;
  double decaying = 0.0;
};
OdeRates ode_rates(double b, double c);

enum class Branch { growing, decaying };
double ode_oracle(double b, double c, double x, Branch branch = Branch::growing);

// Truncation G_j of the domain for the exhaustion parameter j.
using DomainFactory = std::function<DomainPtr(double j)>;

struct PositiveSolution {
  std::vector<double> j_grid;
  std::vector<GridFunction> psi;  // u_j / u_j(x0) on G_j
  std::size_t x0 = 0;             // node of x0 on the last G_j
  // max over common nodes of G_j, G_(j+1) in B_m of |psi_(j+1) - psi_j|.
  std::vector<double> cauchy;
  double cauchy_floor = 0.0;      // rounding level below which tails count as zero
  bool cauchy_geometric = false;  // every tail is <= 0.9 of the previous or below the floor
  double min_interior = 0.0;      // min of the last psi over interior nodes

  const GridFunction& limit() const { return psi.back(); }
};

// Solves L u_j = 0 in G_j with u_j = 0 on boundary nodes in the closed ball
// B_2 (the hole of an exterior domain) and u_j = 1 on the rest of the
// boundary, then normalizes at x0 (default: the first interior node of the
// first G_j with |x| closest to 3). Throws MaximumPrincipleError("MP
// hypothesis violated") when the discrete operator on some G_j fails the
// maximum-principle diagnostic.
PositiveSolution build_positive_solution(const EllipticProblem& problem, const DomainFactory& domains,
                                         const std::vector<double>& j_grid, double m,
                                         std::optional<Point> x0 = std::nullopt,
                                         const SolveOptions& opt = {});

struct DecayReport {
  std::vector<double> R;
  std::vector<double> inf;        // inf of psi over interior nodes with r_min <= |x| <= R
  std::vector<double> shell_sup;  // sup of |psi| over nodes with ||x| - R| <= h/2
  double rate = 0.0;              // least-squares slope of -ln(inf) against R
  double intercept = 0.0;
  double C1 = 0.0;                // predicted rate, 0 when not supplied
};
// Throws PreconditionError on a nonpositive interior value in the measured
// region and DomainError on a bad R-grid.
DecayReport measure_decay(const GridFunction& psi, const std::vector<double>& R_grid, double r_min = 0.0);

// C0 (1 + ||b||^beta + ||c||^gamma) over the given nodes.
double predicted_C1(double C0, const CoefficientSet& coeffs, const DomainPtr& d, const NodeSubset& region);

struct OdeDecay {
  double b = 0.0, c = 0.0;
  double oracle = 0.0;  // sqrt(b^2 + c) - b
  double coarse = 0.0;  // rate measured at h
  double fine = 0.0;    // rate measured at h/2
  double rate = 0.0;    // Richardson value of the two
  double A = 0.0;       // 1 + ||b||^beta + ||c||^gamma of the discrete operator
};
// Solves u'' - 2b u' - c u = 0 on [0, L] with the decaying branch as boundary
// data and fits -ln(inf_[0,R] u) against R = L/5, .., 4L/5.
OdeDecay measure_ode_decay(double b, double c, double L = 10.0, double h = 0.01);

// Smallest C0 with rate <= C0 A for every pair.
double calibrate_C0(const std::vector<double>& rates, const std::vector<double>& A);

struct ComparisonCheck {
  double delta = 0.0;
  bool boundary_ok = false;       // u <= delta psi on the boundary nodes
  bool interior_ok = false;       // u <= delta psi at every interior node
  double max_violation = 0.0;     // max of u - delta psi over interior nodes
};
// u and psi on the same grid. Both comparisons allow a rounding slack of
// 1e-10 (1 + max |u| + delta max |psi|).
ComparisonCheck comparison_check(const GridFunction& u, const GridFunction& psi, double delta);

enum class LandisVerdict { trivial, decay_within_bound, contradiction, not_a_solution };
std::string to_string(LandisVerdict v);

struct LandisOptions {
  std::vector<double> R_grid;
  std::vector<double> deltas{1e-1, 1e-2, 1e-3};
  double C1 = 1.0;
  double r_min = 0.0;         // inner radius of the measured region
  double tolerance = 1e-8;    // scaled residual bound and triviality threshold
};

struct LandisReport {
  LandisVerdict verdict = LandisVerdict::not_a_solution;
  double residual = 0.0;
  std::vector<double> R;
  std::vector<double> shell_sup;     // sup of |u| on ||x| - R| <= h/2
  std::vector<double> weighted;      // e^(C1 R) shell_sup
  double max_abs = 0.0;
  double rate = 0.0;                 // slope of -ln(shell_sup) against R, where positive
  double C1 = 0.0;
  std::vector<double> comparison_radius;  // largest R with u < delta psi on its shell, 0 if none
  bool comparison_holds = true;      // u <= delta psi inside every such radius
};
// Throws PreconditionError if u takes both signs on boundary nodes in B_2.
LandisReport landis_experiment(const EllipticProblem& problem, const GridFunction& u, const GridFunction& psi,
                               const LandisOptions& opt);

}  // namespace harnlab
