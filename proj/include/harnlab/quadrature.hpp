#pragma once

#include <functional>
#include <vector>

namespace harnlab {

// Adaptive Gauss-Kronrod on [lo, hi]. Ranges spanning many decades are split
// geometrically first.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double rel_tol = 1e-12);

// Fixed 15-point Gauss-Kronrod; for short smooth panels.
double integrate_panel(const std::function<double(double)>& f, double lo, double hi);

enum class Convergence { converges, diverges, inconclusive };

struct SingularIntegral {
  Convergence status = Convergence::inconclusive;
  double value = 0.0;              // extrapolated when status == converges
  std::vector<double> partial;     // integral over [10^-k, a], k = 1..16 (cutoffs below a)
  double tail_exponent = 0.0;      // fitted gamma in S = S_inf - B t^-gamma
};

// Integral of phi over (0, a] where phi may blow up at 0. Partial integrals
// over [10^-k, a] are classified from their last three increments:
// geometric decay converges; otherwise a power law in t = ln(1/cutoff) is
// fitted, gamma <= 0.05 diverges and gamma >= 0.15 converges.
SingularIntegral quad_singular(const std::function<double(double)>& phi, double a, double rel_tol = 1e-12);

}  // namespace harnlab
