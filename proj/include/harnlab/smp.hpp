#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harnlab/grid.hpp"
#include "harnlab/operators.hpp"

namespace harnlab {

// Scalar nonlinearity f with f(0) = 0, extended by 0 for s < 0. The primitive
// F(s) = int_0^s f is tabulated on a geometric grid of ratio 2 down to 1e-300
// with one Gauss-Kronrod panel per cell.
class Nonlinearity {
 public:
  // cap is the range bound L used by m_delta when no other bound is given.
  explicit Nonlinearity(std::function<double(double)> f, double cap = 1.0);
  // f(s) = s |ln s|^a. The tag lets m_delta work in log variables.
  static Nonlinearity log_power(double a, double cap = 1.0);
  // f(s) = coeff s^exponent.
  static Nonlinearity power(double coeff, double exponent, double cap = 1.0);

  double operator()(double s) const;
  double primitive(double s) const;
  double cap() const { return cap_; }
  std::optional<double> log_exponent() const { return log_exponent_; }
  double tag_scale() const { return tag_scale_; }
  Nonlinearity scaled(double t) const;

 private:
  std::function<double(double)> f_;
  double cap_ = 1.0;
  std::optional<double> log_exponent_;
  double tag_scale_ = 1.0;  // f = tag_scale_ s |ln s|^a for tagged functions
  double top_ = 1.0;
  std::vector<double> knots_;       // top_ 2^-j, j = 0..J
  std::vector<double> cumulative_;  // F at the knots
};

// max over s in [0, L] of f(s) / (s + delta): scan on a merged logarithmic and
// uniform grid, refined by golden-section search around the best cell.
double m_delta(const Nonlinearity& f, double delta, double L);
// Same with delta = e^log_delta. Exact in log variables for the tagged
// s |ln s|^a family, so delta may be far below the double range.
double m_delta_log(const Nonlinearity& f, double log_delta, double L);

enum class DecayVerdict { holds, fails, inconclusive };
std::string to_string(DecayVerdict v);

struct DecayTrace {
  DecayVerdict verdict = DecayVerdict::inconclusive;
  std::vector<double> log_delta;
  std::vector<double> log_trace;  // k ln(delta) + sqrt(M_delta)
  double tail_slope = 0.0;        // d log_trace / d ln(1/delta) on the last half
};
// log(delta^k e^sqrt(M_delta)) along a decreasing delta grid given by ln(delta).
// holds: the last three steps decrease and the tail slope is negative.
// fails: the last three steps increase and the tail slope is positive.
DecayTrace check_decay_criterion(const Nonlinearity& f, double k, const std::vector<double>& log_deltas,
                                 double L = 0.0);
// ln(delta) for the decades 1e-2 .. 1e-12.
std::vector<double> default_log_deltas();
// n points geometric in ln(1/delta) between the two bounds.
std::vector<double> extended_log_deltas(double t_lo, double t_hi, int n);

enum class SmpClass { smp_holds, smp_may_fail, inconclusive };
std::string to_string(SmpClass c);
// Divergence of int_0 F^(-1/2) over (0, 1/2].
SmpClass classify_vazquez_integral(const Nonlinearity& f);

struct DeadCore {
  GridFunction u;   // on [-T, T], zero on [-T, 0]
  double T = 0.0;   // int_0^u0 ds / sqrt(2 F(s))
  double residual = 0.0;  // sup |u'' - f(u)| at interior nodes
};
// Throws DomainError("no dead core: integral diverges") unless T is finite.
DeadCore dead_core_profile(const Nonlinearity& f, double u0, double h);
// Sup of the discrete residual u'' - f(u) over interior nodes of a 1D field.
double ode_residual(const GridFunction& u, const Nonlinearity& f);

struct VazquezOptions {
  double cbar = 1.0;
  double k = 1.0;
  double eps = 0.5;
  double r0 = 0.0;                    // 0 uses the distance from x0 to the boundary
  std::optional<std::size_t> x0;      // default: zero node nearest the positive set
  std::vector<double> log_deltas;     // default: decades 1e-2 .. 1e-12
};

struct VazquezReport {
  std::size_t x0 = 0;
  double r1 = 0.0;
  double residual = 0.0;              // scaled residual of L u = g + f(u)
  std::vector<double> log_delta;
  std::vector<double> integral;       // (int_{B_r1} (u + delta)^eps)^(1/eps)
  std::vector<double> log_bound;      // ln(cbar delta) + cbar r1 sqrt(M_delta)
  bool trace_to_zero = false;
  double sup_near_x0 = 0.0;           // max u on B_r1(x0)
};
// Throws PreconditionError when u is negative or its minimum is not (near) 0
// at an interior node.
VazquezReport vazquez_experiment(const EllipticProblem& problem, const GridFunction& u,
                                 const Nonlinearity& f, const VazquezOptions& opt = {});

}  // namespace harnlab
