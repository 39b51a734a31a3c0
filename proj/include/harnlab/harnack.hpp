#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "harnlab/geometry.hpp"
#include "harnlab/grid.hpp"
#include "harnlab/operators.hpp"

namespace harnlab {

// G_R = B_R with G'_R = B_{R+1}, or G_R = B_R \ B_2 with G'_R = B_{R+1} \ B_1.
enum class HarnackGeometry { ball, annulus };

struct HarnackRegions {
  Region inner;
  Region outer;
};
HarnackRegions harnack_regions(HarnackGeometry geometry, double R);

// Balls of radius r0 centered on the lattice (r0 / (2 sqrt n)) Z^n inside
// G_R + B_r0. Two balls are linked when their centers are at most r0 apart.
struct ChainCover {
  int dimension = 1;
  double r0 = 0.0;
  double spacing = 0.0;
  double R = 0.0;
  Region region;
  std::vector<Point> centers;
  std::vector<std::vector<std::size_t>> neighbours;

  std::size_t size() const { return centers.size(); }
  // m (r0 / R)^n.
  double cardinality_constant() const;
};

// Throws DomainError unless r0 is in (0, 1/2] and R > 2.
ChainCover build_chain_cover(const Region& g_r, int n, double r0);
// Shortest chain of linked balls from k to l, both ends included.
std::vector<std::size_t> chain_between(const ChainCover& cover, std::size_t k, std::size_t l);
// Longest shortest chain (number of balls), by a double breadth-first sweep.
std::size_t chain_diameter(const ChainCover& cover);
// Every node of the subset lies in some ball.
bool covers(const ChainCover& cover, const GridDomain& d, const NodeSubset& nodes);
// Every doubled ball B_2r0(X_i) lies in the given region.
bool doubled_balls_inside(const ChainCover& cover, const Region& outer);
// Volume of B_r0(X_i) intersected with B_r0(X_j), counted on a reference
// lattice of spacing r0 / 32.
double overlap_volume(const ChainCover& cover, std::size_t i, std::size_t j);
// Smallest overlap of two linked balls divided by r0^n.
double min_overlap_constant(const ChainCover& cover);

struct HarnackMeasurement {
  int dimension = 1;
  double R = 0.0;
  double eps = 0.5;
  double A = 1.0;
  double sup = 0.0;                 // over G_R
  double inf = 0.0;                 // over G_R
  double eps_integral = 0.0;        // (int_{G_R} u^eps)^(1/eps)
  double eps_integral_outer = 0.0;  // same over G'_R
  double source_norm = 0.0;         // ||g||_{L^p_ul(G'_R)} + ||h||_{L^q(G'_R)}

  double ratio() const;
  // Smallest constants for which the three inequalities hold on this field.
  double weak_constant() const;        // ln(I / (inf + g)) / (A R)
  double full_constant() const;        // ln(sup / (inf + g)) / (A R)
  double local_max_constant() const;   // sup / (A^(n/eps) I' + g)
};

// u must solve the problem on a grid covering G'_R. Throws PreconditionError
// when u has negative values below -1e-10 max|u| on G'_R.
HarnackMeasurement measure_harnack(const EllipticProblem& problem, const GridFunction& u,
                                   HarnackGeometry geometry, double R, double eps = 0.5);

// Field-wise Richardson extrapolation from spacing h and h / factor.
HarnackMeasurement extrapolate(const HarnackMeasurement& coarse, const HarnackMeasurement& fine,
                               double factor);

struct HarnackConstants {
  double weak = 0.0;
  double full = 0.0;
  double local_max = 0.0;
};

struct HarnackVerdict {
  double weak_bound = 0.0;
  double full_bound = 0.0;
  double local_max_bound = 0.0;
  bool weak_ok = true;
  bool full_ok = true;
  bool local_max_ok = true;
  bool ok() const { return weak_ok && full_ok && local_max_ok; }
};

// An inequality fails only when its left side exceeds the bound by more than
// the factor 1 + tolerance.
HarnackVerdict check(const HarnackMeasurement& m, const HarnackConstants& k,
                     double tolerance = 1e-3);
// sup/(inf + g) <= C_lm (A^(n/eps) I'/(inf + g) + 1) with the field's own constants.
bool composition_holds(const HarnackMeasurement& m);
// Largest implied constants over the measurements of dimension n.
HarnackConstants calibrate(const std::vector<HarnackMeasurement>& ms, int n);

// Suite problems are solved on [-R-1, R+1]^n with an odd cell count, so the
// origin is a cell center, then again with three times as many cells.
struct HarnackCase {
  std::string name;
  EllipticProblem problem;
  HarnackGeometry geometry = HarnackGeometry::ball;
  double R = 4.0;
  double h = 0.02;
};
DomainPtr harnack_domain(int n, double R, double h, int refine = 1);
HarnackMeasurement measure_case(const HarnackCase& c, double eps = 0.5);
// Bare Laplacian and bounded coefficients.
std::vector<HarnackCase> training_suite();
// Twenty problems, most with |x|^(-1/2) drifts or |x|^(-1) potentials.
std::vector<HarnackCase> heldout_suite();

struct AbpReport {
  double sup_w = 0.0;
  double g_norm = 0.0;  // ||g||_{L^p} over {w > 0}
  double ratio = 0.0;
};
// Throws PreconditionError unless diam <= 1 and w <= 0 on the boundary.
AbpReport abp_check(const EllipticProblem& problem, const GridFunction& w, double p = kInf);

struct GrowthLemmaCheck {
  bool hypothesis = false;  // |{u > a} in B| >= (1 - delta)|B|
  bool conclusion = false;  // inf_B u > kappa a - cbar rho^(2 - n/p) g_norm
  double fraction = 0.0;
  double infimum = 0.0;
  double threshold = 0.0;
  bool holds() const { return !hypothesis || conclusion; }
};
// Throws DomainError when B_2rho(x1) leaves the grid.
GrowthLemmaCheck verify_growth_lemma(const GridFunction& u, const Point& x1, double rho, double a,
                                     double delta, double kappa, double cbar, double g_norm,
                                     double p = kInf);

struct InkspotsCheck {
  bool hypotheses = false;  // |E| <= (1 - delta)|B| and the ball-dilation property
  bool conclusion = false;  // |E| <= (1 - c delta)|F|
  double e_measure = 0.0;
  double f_measure = 0.0;
  double b_measure = 0.0;
  bool holds() const { return !hypotheses || conclusion; }
};
// Balls B' tested for dilation are centered at nodes of B with radii
// h, 2h, 4h, ... and satisfy B' in B. Throws DomainError unless E in F in B.
InkspotsCheck verify_inkspots(const GridDomain& d, const NodeSubset& E, const NodeSubset& F,
                              const Region& ball, double delta, double c);

struct LevelSetDecay {
  bool precondition = true;        // u >= 0 and inf over the ball <= 1
  std::vector<double> fraction;    // |{u > M^k} in B| / |B|, k = 1..kmax
  std::vector<double> bound;       // (1 - c delta)^k
  int first_violation = 0;         // 0 when none
};
LevelSetDecay verify_levelset_decay(const GridFunction& u, const NodeSubset& ball, double M,
                                    double c, double delta, int kmax);

}  // namespace harnlab
