#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace harnlab {

// Points carry two coordinates; one-dimensional problems leave the second at 0.
using Point = std::array<double, 2>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double norm(const Point& p) { return std::hypot(p[0], p[1]); }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }
inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1]}; }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

// Symmetric 2x2 matrix. In 1D only xx is used.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Sym2 identity() { return {1.0, 0.0, 1.0}; }
  static Sym2 scalar(double a) { return {a, 0.0, a}; }
  double trace() const { return xx + yy; }
  // Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues() const {
    const double m = 0.5 * (xx + yy);
    const double d = std::hypot(0.5 * (xx - yy), xy);
    return {m - d, m + d};
  }
};

// Geometric node selector. Distances are Euclidean, so in 1D a ball is the
// interval [c - r, c + r].
struct Region {
  enum class Kind { everything, ball, annulus, interval, box };

  Kind kind = Kind::everything;
  Point center{0.0, 0.0};
  double r_inner = 0.0;
  double r_outer = kInf;
  Point lo{-kInf, -kInf};
  Point hi{kInf, kInf};

  static Region everything() { return {}; }
  static Region ball(Point c, double r) {
    Region g;
    g.kind = Kind::ball;
    g.center = c;
    g.r_outer = r;
    return g;
  }
  static Region annulus(Point c, double r_in, double r_out) {
    Region g;
    g.kind = Kind::annulus;
    g.center = c;
    g.r_inner = r_in;
    g.r_outer = r_out;
    return g;
  }
  static Region interval(double a, double b) {
    Region g;
    g.kind = Kind::interval;
    g.lo = {a, -kInf};
    g.hi = {b, kInf};
    return g;
  }
  static Region box(Point lo, Point hi) {
    Region g;
    g.kind = Kind::box;
    g.lo = lo;
    g.hi = hi;
    return g;
  }

  bool contains(const Point& p) const {
    constexpr double tol = 1e-12;
    switch (kind) {
      case Kind::everything:
        return true;
      case Kind::ball:
        return distance(p, center) <= r_outer * (1 + tol) + tol;
      case Kind::annulus: {
        const double d = distance(p, center);
        return d >= r_inner * (1 - tol) - tol && d <= r_outer * (1 + tol) + tol;
      }
      case Kind::interval:
        return p[0] >= lo[0] - tol && p[0] <= hi[0] + tol;
      case Kind::box:
        return p[0] >= lo[0] - tol && p[0] <= hi[0] + tol && p[1] >= lo[1] - tol &&
               p[1] <= hi[1] + tol;
    }
    return false;
  }

  // Region grown by t in every direction (used for r0-neighbourhoods).
  Region grown(double t) const {
    Region g = *this;
    switch (kind) {
      case Kind::everything:
        break;
      case Kind::ball:
        g.r_outer += t;
        break;
      case Kind::annulus:
        g.r_inner = std::max(0.0, r_inner - t);
        g.r_outer += t;
        break;
      case Kind::interval:
      case Kind::box:
        g.lo = {lo[0] - t, lo[1] - t};
        g.hi = {hi[0] + t, hi[1] + t};
        break;
    }
    return g;
  }
};

}  // namespace harnlab
