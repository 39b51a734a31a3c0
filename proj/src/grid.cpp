#include "harnlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "harnlab/errors.hpp"

namespace harnlab {

namespace {

std::size_t cells_for(double length, double h) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / h - 1e-9)));
}

void check_spacing(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid spacing must be positive");
}

std::size_t theta_count(double r_outer, double h, std::size_t requested) {
  if (requested != 0) {
    if (requested < 4) throw DomainError("polar grid needs at least 4 angles");
    return requested;
  }
  return std::max<std::size_t>(8, cells_for(2 * std::numbers::pi * r_outer, h));
}

}  // namespace

GridDomain GridDomain::interval(double a, double b, double h) {
  check_spacing(h);
  if (!(b > a)) throw DomainError("interval needs a < b");
  GridDomain d;
  d.shape_ = Shape::interval;
  d.h_ = h;
  const std::size_t cells = cells_for(b - a, h);
  d.step0_ = (b - a) / static_cast<double>(cells);
  d.n0_ = cells + 1;
  d.lo_ = {a, 0.0};
  d.hi_ = {b, 0.0};
  for (std::size_t i = 0; i < d.n0_; ++i) {
    const double x = i == cells ? b : a + static_cast<double>(i) * d.step0_;
    d.points_.push_back({x, 0.0});
    const bool edge = i == 0 || i == cells;
    d.volumes_.push_back(edge ? 0.5 * d.step0_ : d.step0_);
    d.boundary_.push_back(edge);
  }
  d.finish();
  return d;
}

GridDomain GridDomain::box(Point lo, Point hi, double h) {
  check_spacing(h);
  if (!(hi[0] > lo[0]) || !(hi[1] > lo[1])) throw DomainError("box needs lo < hi");
  GridDomain d;
  d.shape_ = Shape::box;
  d.h_ = h;
  const std::size_t cx = cells_for(hi[0] - lo[0], h);
  const std::size_t cy = cells_for(hi[1] - lo[1], h);
  d.n0_ = cx + 1;
  d.n1_ = cy + 1;
  d.step0_ = (hi[0] - lo[0]) / static_cast<double>(cx);
  d.step1_ = (hi[1] - lo[1]) / static_cast<double>(cy);
  d.lo_ = lo;
  d.hi_ = hi;
  for (std::size_t j = 0; j <= cy; ++j) {
    const double y = j == cy ? hi[1] : lo[1] + static_cast<double>(j) * d.step1_;
    const bool ey = j == 0 || j == cy;
    for (std::size_t i = 0; i <= cx; ++i) {
      const double x = i == cx ? hi[0] : lo[0] + static_cast<double>(i) * d.step0_;
      const bool ex = i == 0 || i == cx;
      d.points_.push_back({x, y});
      d.volumes_.push_back((ex ? 0.5 : 1.0) * d.step0_ * (ey ? 0.5 : 1.0) * d.step1_);
      d.boundary_.push_back(ex || ey);
    }
  }
  d.finish();
  return d;
}

GridDomain GridDomain::disk(double radius, double h, std::size_t n_theta) {
  check_spacing(h);
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  GridDomain d;
  d.shape_ = Shape::disk;
  d.h_ = h;
  const std::size_t nr = cells_for(radius, h);
  d.n0_ = nr;
  d.n1_ = theta_count(radius, h, n_theta);
  d.step0_ = radius / static_cast<double>(nr);
  d.step1_ = 2 * std::numbers::pi / static_cast<double>(d.n1_);
  d.r_in_ = 0.0;
  d.r_out_ = radius;
  d.lo_ = {-radius, -radius};
  d.hi_ = {radius, radius};
  const double dr = d.step0_, dt = d.step1_;
  d.points_.push_back({0.0, 0.0});
  d.volumes_.push_back(std::numbers::pi * 0.25 * dr * dr);
  d.boundary_.push_back(false);
  for (std::size_t ring = 0; ring < nr; ++ring) {
    const double r = d.ring_radius(ring);
    const bool outer = ring + 1 == nr;
    const double vol = outer ? 0.5 * (r * r - (r - 0.5 * dr) * (r - 0.5 * dr)) * dt : r * dr * dt;
    for (std::size_t k = 0; k < d.n1_; ++k) {
      const double th = static_cast<double>(k) * dt;
      d.points_.push_back({r * std::cos(th), r * std::sin(th)});
      d.volumes_.push_back(vol);
      d.boundary_.push_back(outer);
    }
  }
  d.finish();
  return d;
}

GridDomain GridDomain::annulus(double r_inner, double r_outer, double h, std::size_t n_theta) {
  check_spacing(h);
  if (!(r_inner > 0.0) || !(r_outer > r_inner)) throw DomainError("annulus needs 0 < r_in < r_out");
  GridDomain d;
  d.shape_ = Shape::annulus;
  d.h_ = h;
  const std::size_t cells = cells_for(r_outer - r_inner, h);
  d.n0_ = cells + 1;
  d.n1_ = theta_count(r_outer, h, n_theta);
  d.step0_ = (r_outer - r_inner) / static_cast<double>(cells);
  d.step1_ = 2 * std::numbers::pi / static_cast<double>(d.n1_);
  d.r_in_ = r_inner;
  d.r_out_ = r_outer;
  d.lo_ = {-r_outer, -r_outer};
  d.hi_ = {r_outer, r_outer};
  const double dr = d.step0_, dt = d.step1_;
  for (std::size_t ring = 0; ring <= cells; ++ring) {
    const double r = d.ring_radius(ring);
    double vol = r * dr * dt;
    if (ring == 0) vol = 0.5 * ((r + 0.5 * dr) * (r + 0.5 * dr) - r * r) * dt;
    if (ring == cells) vol = 0.5 * (r * r - (r - 0.5 * dr) * (r - 0.5 * dr)) * dt;
    const bool edge = ring == 0 || ring == cells;
    for (std::size_t k = 0; k < d.n1_; ++k) {
      const double th = static_cast<double>(k) * dt;
      d.points_.push_back({r * std::cos(th), r * std::sin(th)});
      d.volumes_.push_back(vol);
      d.boundary_.push_back(edge);
    }
  }
  d.finish();
  return d;
}

void GridDomain::finish() {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    (boundary_[i] ? boundary_nodes_ : interior_nodes_).push_back(i);
  }
}

double GridDomain::ring_radius(std::size_t ring) const {
  if (shape_ == Shape::disk) {
    return ring + 1 == n0_ ? r_out_ : static_cast<double>(ring + 1) * step0_;
  }
  return ring + 1 == n0_ ? r_out_ : r_in_ + static_cast<double>(ring) * step0_;
}

std::size_t GridDomain::polar_index(std::size_t ring, std::size_t k) const {
  return (has_center() ? 1 : 0) + ring * n1_ + (k % n1_);
}

double GridDomain::total_volume() const {
  double v = 0.0;
  for (double w : volumes_) v += w;
  return v;
}

std::pair<Point, Point> GridDomain::bounding_box() const {
  Point lo{kInf, kInf}, hi{-kInf, -kInf};
  for (const auto& p : points_) {
    lo = {std::min(lo[0], p[0]), std::min(lo[1], p[1])};
    hi = {std::max(hi[0], p[0]), std::max(hi[1], p[1])};
  }
  return {lo, hi};
}

double GridDomain::diameter() const {
  switch (shape_) {
    case Shape::interval:
      return hi_[0] - lo_[0];
    case Shape::box:
      return std::hypot(hi_[0] - lo_[0], hi_[1] - lo_[1]);
    case Shape::disk:
    case Shape::annulus:
      return 2 * r_out_;
  }
  return 0.0;
}

NodeSubset all_nodes(const GridDomain& d) {
  NodeSubset s(d.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = i;
  return s;
}

NodeSubset select(const GridDomain& d, const Region& region) {
  NodeSubset s;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (region.contains(d.point(i))) s.push_back(i);
  }
  return s;
}

NodeSubset interior_of(const GridDomain& d, const NodeSubset& s) {
  NodeSubset out;
  for (auto i : s) {
    if (!d.is_boundary(i)) out.push_back(i);
  }
  return out;
}

double measure(const GridDomain& d, const NodeSubset& s) {
  double v = 0.0;
  for (auto i : s) v += d.cell_volume(i);
  return v;
}

GridFunction::GridFunction(DomainPtr domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw DomainError("grid function without a domain");
  if (values_.size() != domain_->size()) {
    throw DomainError("grid function has " + std::to_string(values_.size()) +
                      " values for " + std::to_string(domain_->size()) + " nodes");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DomainError("non-finite grid value at node " + std::to_string(i));
    }
  }
}

GridFunction GridFunction::sample(DomainPtr domain, const std::function<double(const Point&)>& f) {
  std::vector<double> v(domain->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(domain->point(i));
  return GridFunction(std::move(domain), std::move(v));
}

GridFunction GridFunction::constant(DomainPtr domain, double value) {
  std::vector<double> v(domain->size(), value);
  return GridFunction(std::move(domain), std::move(v));
}

namespace {

void check_exponent(double s) {
  if (!(s > 0.0)) throw DomainError("Lebesgue exponent must be positive");
}

double sup_abs(const GridFunction& f, const NodeSubset& sub) {
  double m = 0.0;
  for (auto i : sub) m = std::max(m, std::abs(f[i]));
  return m;
}

// Largest window integral of w|f|^s over closed unit balls.
double max_window_integral(const GridFunction& f, double s, const NodeSubset& sub) {
  const GridDomain& d = f.domain();
  constexpr double kReach = 1.0 + 1e-12;
  std::vector<double> contrib(sub.size());
  for (std::size_t k = 0; k < sub.size(); ++k) {
    contrib[k] = d.cell_volume(sub[k]) * std::pow(std::abs(f[sub[k]]), s);
  }

  if (d.shape() == Shape::interval) {
    // Nodes are sorted by x; windows are contiguous.
    std::vector<double> prefix(sub.size() + 1, 0.0);
    for (std::size_t k = 0; k < sub.size(); ++k) prefix[k + 1] = prefix[k] + contrib[k];
    double best = 0.0;
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 0; k < sub.size(); ++k) {
      const double xc = d.point(sub[k])[0];
      while (d.point(sub[lo])[0] < xc - kReach) ++lo;
      if (hi < k) hi = k;
      while (hi + 1 < sub.size() && d.point(sub[hi + 1])[0] <= xc + kReach) ++hi;
      best = std::max(best, prefix[hi + 1] - prefix[lo]);
    }
    return best;
  }

  std::vector<Point> centers;
  centers.reserve(sub.size() + 4);
  Point lo{kInf, kInf}, hi{-kInf, -kInf};
  for (auto i : sub) {
    const Point& p = d.point(i);
    centers.push_back(p);
    lo = {std::min(lo[0], p[0]), std::min(lo[1], p[1])};
    hi = {std::max(hi[0], p[0]), std::max(hi[1], p[1])};
  }
  centers.push_back({lo[0], lo[1]});
  centers.push_back({lo[0], hi[1]});
  centers.push_back({hi[0], lo[1]});
  centers.push_back({hi[0], hi[1]});

  double best = 0.0;
  if (d.shape() == Shape::box) {
    // Masked row prefix sums; each window is a union of row segments.
    const std::size_t nx = d.nx(), ny = d.ny();
    std::vector<double> rows(ny * (nx + 1), 0.0);
    for (std::size_t k = 0; k < sub.size(); ++k) {
      const std::size_t i = sub[k] % nx, j = sub[k] / nx;
      rows[j * (nx + 1) + i + 1] = contrib[k];
    }
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t i = 0; i < nx; ++i) rows[j * (nx + 1) + i + 1] += rows[j * (nx + 1) + i];
    }
    const double x0 = d.lower()[0], y0 = d.lower()[1];
    for (const auto& c : centers) {
      double total = 0.0;
      const long jlo = std::max(0L, static_cast<long>(std::ceil((c[1] - kReach - y0) / d.hy() - 1e-9)));
      const long jhi = std::min(static_cast<long>(ny) - 1,
                                static_cast<long>(std::floor((c[1] + kReach - y0) / d.hy() + 1e-9)));
      for (long j = jlo; j <= jhi; ++j) {
        const double dy = y0 + static_cast<double>(j) * d.hy() - c[1];
        const double half = kReach * kReach - dy * dy;
        if (half < 0.0) continue;
        const double a = std::sqrt(half);
        const long ilo = std::max(0L, static_cast<long>(std::ceil((c[0] - a - x0) / d.hx() - 1e-9)));
        const long ihi = std::min(static_cast<long>(nx) - 1,
                                  static_cast<long>(std::floor((c[0] + a - x0) / d.hx() + 1e-9)));
        if (ihi < ilo) continue;
        const double* row = &rows[static_cast<std::size_t>(j) * (nx + 1)];
        total += row[ihi + 1] - row[ilo];
      }
      best = std::max(best, total);
    }
    return best;
  }

  // Polar grids: masked per-ring prefix sums over the angle; a unit window
  // meets each ring in one arc.
  const std::size_t nr = d.n_rings(), nt = d.n_theta();
  const std::size_t offset = d.has_center() ? 1 : 0;
  std::vector<double> rings(nr * (nt + 1), 0.0);
  double center_mass = 0.0;
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (sub[k] < offset) {
      center_mass = contrib[k];
      continue;
    }
    const std::size_t local = sub[k] - offset;
    rings[(local / nt) * (nt + 1) + local % nt + 1] = contrib[k];
  }
  for (std::size_t ring = 0; ring < nr; ++ring) {
    for (std::size_t k = 0; k < nt; ++k) rings[ring * (nt + 1) + k + 1] += rings[ring * (nt + 1) + k];
  }
  const double dt = d.dtheta();
  for (const auto& c : centers) {
    const double rho = std::hypot(c[0], c[1]);
    const double theta = std::atan2(c[1], c[0]);
    double total = rho <= kReach ? center_mass : 0.0;
    for (std::size_t ring = 0; ring < nr; ++ring) {
      const double r = d.ring_radius(ring);
      if (std::abs(r - rho) > kReach) continue;
      const double* row = &rings[ring * (nt + 1)];
      const double cosv = rho > 0.0 ? (r * r + rho * rho - kReach * kReach) / (2.0 * r * rho) : -1.0;
      if (cosv <= -1.0) {
        total += row[nt];
        continue;
      }
      const double alpha = std::acos(std::min(1.0, cosv));
      const long klo = static_cast<long>(std::ceil((theta - alpha) / dt - 1e-9));
      const long khi = static_cast<long>(std::floor((theta + alpha) / dt + 1e-9));
      if (khi < klo) continue;
      const long len = khi - klo + 1;
      if (len >= static_cast<long>(nt)) {
        total += row[nt];
        continue;
      }
      const long n = static_cast<long>(nt);
      const long a = ((klo % n) + n) % n;
      total += a + len <= n ? row[a + len] - row[a] : row[n] - row[a] + row[a + len - n];
    }
    best = std::max(best, total);
  }
  return best;
}

}  // namespace

double lebesgue_norm(const GridFunction& f, double s, const NodeSubset& sub) {
  check_exponent(s);
  if (std::isinf(s)) return sup_abs(f, sub);
  const GridDomain& d = f.domain();
  double total = 0.0;
  for (auto i : sub) total += d.cell_volume(i) * std::pow(std::abs(f[i]), s);
  return std::pow(total, 1.0 / s);
}

double lebesgue_norm(const GridFunction& f, double s) {
  return lebesgue_norm(f, s, all_nodes(f.domain()));
}

double ul_norm(const GridFunction& f, double s, const NodeSubset& sub) {
  check_exponent(s);
  if (sub.empty()) return 0.0;
  if (std::isinf(s)) return sup_abs(f, sub);
  return std::pow(max_window_integral(f, s, sub), 1.0 / s);
}

double ul_norm(const GridFunction& f, double s) { return ul_norm(f, s, all_nodes(f.domain())); }

double level_set_measure(const GridFunction& u, double a, const NodeSubset& sub) {
  const GridDomain& d = u.domain();
  double v = 0.0;
  for (auto i : sub) {
    if (u[i] > a) v += d.cell_volume(i);
  }
  return v;
}

double sup_over(const GridFunction& u, const NodeSubset& sub) {
  if (sub.empty()) throw DomainError("sup over an empty node set");
  double m = -kInf;
  for (auto i : sub) m = std::max(m, u[i]);
  return m;
}

double inf_over(const GridFunction& u, const NodeSubset& sub) {
  if (sub.empty()) throw DomainError("inf over an empty node set");
  double m = kInf;
  for (auto i : sub) m = std::min(m, u[i]);
  return m;
}

}  // namespace harnlab
