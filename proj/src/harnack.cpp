#include "harnlab/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

#include "harnlab/errors.hpp"

namespace harnlab {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double region_radius(const Region& g) {
  switch (g.kind) {
    case Region::Kind::ball:
    case Region::Kind::annulus:
      return g.r_outer;
    case Region::Kind::interval:
      return std::max(std::abs(g.lo[0]), std::abs(g.hi[0]));
    case Region::Kind::box:
      return std::max({std::abs(g.lo[0]), std::abs(g.hi[0]), std::abs(g.lo[1]), std::abs(g.hi[1])});
    case Region::Kind::everything:
      break;
  }
  throw DomainError("the cover needs a bounded region");
}

std::pair<Point, Point> region_bounds(const Region& g) {
  switch (g.kind) {
    case Region::Kind::ball:
    case Region::Kind::annulus:
      return {g.center - Point{g.r_outer, g.r_outer}, g.center + Point{g.r_outer, g.r_outer}};
    case Region::Kind::interval:
      return {{g.lo[0], 0.0}, {g.hi[0], 0.0}};
    case Region::Kind::box:
      return {g.lo, g.hi};
    case Region::Kind::everything:
      break;
  }
  throw DomainError("the cover needs a bounded region");
}

// Does the closed ball B_r(c) lie inside the grid's domain?
bool ball_inside_grid(const GridDomain& d, const Point& c, double r) {
  const double tol = 1e-9 * (1.0 + r);
  switch (d.shape()) {
    case Shape::interval:
      return c[0] - r >= d.lower()[0] - tol && c[0] + r <= d.upper()[0] + tol;
    case Shape::box:
      return c[0] - r >= d.lower()[0] - tol && c[0] + r <= d.upper()[0] + tol &&
             c[1] - r >= d.lower()[1] - tol && c[1] + r <= d.upper()[1] + tol;
    case Shape::disk:
      return norm(c) + r <= d.r_outer() + tol;
    case Shape::annulus:
      return norm(c) - r >= d.r_inner() - tol && norm(c) + r <= d.r_outer() + tol;
  }
  return false;
}

std::vector<std::size_t> bfs(const ChainCover& cover, std::size_t from,
                             std::vector<std::size_t>& parent) {
  std::vector<std::size_t> dist(cover.size(), kNone);
  parent.assign(cover.size(), kNone);
  std::deque<std::size_t> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j : cover.neighbours[i]) {
      if (dist[j] != kNone) continue;
      dist[j] = dist[i] + 1;
      parent[j] = i;
      queue.push_back(j);
    }
  }
  return dist;
}

double positive_part_norm(const GridFunction& f, double s, const NodeSubset& sub) {
  if (sub.empty()) return 0.0;
  return lebesgue_norm(f, s, sub);
}

GridFunction sampled_abs(const EllipticProblem& pb, const GridFunction& u, const ScalarField& f) {
  const GridDomain& d = u.domain();
  std::vector<double> v(d.size(), 0.0);
  if (f) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      v[i] = std::abs(f(sample_location(pb.coeffs, d.point(i), d.spacing())));
    }
  }
  return GridFunction(u.domain_ptr(), std::move(v));
}

}  // namespace

HarnackRegions harnack_regions(HarnackGeometry geometry, double R) {
  if (!(R > 2.0)) throw DomainError("R must exceed 2");
  if (geometry == HarnackGeometry::ball) {
    return {Region::ball({0, 0}, R), Region::ball({0, 0}, R + 1)};
  }
  return {Region::annulus({0, 0}, 2.0, R), Region::annulus({0, 0}, 1.0, R + 1)};
}

double ChainCover::cardinality_constant() const {
  return static_cast<double>(centers.size()) * std::pow(r0 / R, dimension);
}

ChainCover build_chain_cover(const Region& g_r, int n, double r0) {
  if (n != 1 && n != 2) throw DomainError("dimension must be 1 or 2");
  if (!(r0 > 0.0 && r0 <= 0.5)) throw DomainError("r0 must lie in (0, 1/2]");
  if (n == 2 && g_r.kind == Region::Kind::interval) throw DomainError("interval region in 2D");
  ChainCover cover;
  cover.dimension = n;
  cover.r0 = r0;
  cover.spacing = r0 / (2.0 * std::sqrt(static_cast<double>(n)));
  cover.R = region_radius(g_r);
  if (!(cover.R > 2.0)) throw DomainError("R must exceed 2");
  cover.region = g_r;

  const Region grown = g_r.grown(r0);
  const double s = cover.spacing;
  auto [lo, hi] = region_bounds(grown);
  long kmin[2] = {0, 0}, kmax[2] = {0, 0};
  for (int a = 0; a < n; ++a) {
    kmin[a] = static_cast<long>(std::ceil(lo[a] / s - 1e-9));
    kmax[a] = static_cast<long>(std::floor(hi[a] / s + 1e-9));
  }
  const long n0 = kmax[0] - kmin[0] + 1, n1 = kmax[1] - kmin[1] + 1;
  std::vector<std::size_t> dense(static_cast<std::size_t>(n0 * n1), kNone);
  for (long k1 = kmin[1]; k1 <= kmax[1]; ++k1) {
    for (long k0 = kmin[0]; k0 <= kmax[0]; ++k0) {
      const Point p{static_cast<double>(k0) * s, static_cast<double>(k1) * s};
      if (!grown.contains(p)) continue;
      dense[static_cast<std::size_t>((k1 - kmin[1]) * n0 + (k0 - kmin[0]))] = cover.centers.size();
      cover.centers.push_back(p);
    }
  }
  if (cover.centers.empty()) throw DomainError("empty cover");

  // Integer offsets o with |o| s <= r0, that is |o|^2 <= 4n.
  std::vector<std::array<long, 2>> offsets;
  const long reach = 2 * n;
  for (long o1 = (n == 2 ? -reach : 0); o1 <= (n == 2 ? reach : 0); ++o1) {
    for (long o0 = -reach; o0 <= reach; ++o0) {
      const long q = o0 * o0 + o1 * o1;
      if (q > 0 && q <= 4 * n) offsets.push_back({o0, o1});
    }
  }
  cover.neighbours.resize(cover.centers.size());
  for (std::size_t i = 0; i < cover.centers.size(); ++i) {
    const long k0 = std::lround(cover.centers[i][0] / s), k1 = std::lround(cover.centers[i][1] / s);
    for (const auto& o : offsets) {
      const long j0 = k0 + o[0] - kmin[0], j1 = k1 + o[1] - kmin[1];
      if (j0 < 0 || j0 >= n0 || j1 < 0 || j1 >= n1) continue;
      const std::size_t j = dense[static_cast<std::size_t>(j1 * n0 + j0)];
      if (j != kNone) cover.neighbours[i].push_back(j);
    }
  }
  return cover;
}

std::vector<std::size_t> chain_between(const ChainCover& cover, std::size_t k, std::size_t l) {
  if (k >= cover.size() || l >= cover.size()) throw DomainError("ball index out of range");
  std::vector<std::size_t> parent;
  const auto dist = bfs(cover, k, parent);
  if (dist[l] == kNone) throw std::logic_error("chain cover is disconnected");
  std::vector<std::size_t> chain{l};
  while (chain.back() != k) chain.push_back(parent[chain.back()]);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

std::size_t chain_diameter(const ChainCover& cover) {
  std::vector<std::size_t> parent;
  auto far = [&](std::size_t from) {
    const auto dist = bfs(cover, from, parent);
    std::size_t best = from;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (dist[i] == kNone) throw std::logic_error("chain cover is disconnected");
      if (dist[i] > dist[best]) best = i;
    }
    return std::pair{best, dist[best]};
  };
  const auto a = far(0).first;
  return far(a).second + 1;
}

bool covers(const ChainCover& cover, const GridDomain& d, const NodeSubset& nodes) {
  // Lattice keys of the centers, for a local search around each node.
  std::map<std::pair<long, long>, std::size_t> index;
  const double s = cover.spacing;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    index[{std::lround(cover.centers[i][0] / s), std::lround(cover.centers[i][1] / s)}] = i;
  }
  const long reach = cover.dimension == 2 ? 2 : 0;
  for (std::size_t node : nodes) {
    const Point& x = d.point(node);
    const long c0 = std::lround(x[0] / s), c1 = std::lround(x[1] / s);
    bool hit = false;
    for (long a = -2; a <= 2 && !hit; ++a) {
      for (long b = -reach; b <= reach && !hit; ++b) {
        auto it = index.find({c0 + a, c1 + b});
        if (it != index.end() && distance(cover.centers[it->second], x) <= cover.r0 * (1 + 1e-12)) {
          hit = true;
        }
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool doubled_balls_inside(const ChainCover& cover, const Region& outer) {
  const double r = 2.0 * cover.r0;
  const double tol = 1e-12 * (1.0 + r);
  for (const Point& x : cover.centers) {
    bool ok = true;
    switch (outer.kind) {
      case Region::Kind::everything:
        break;
      case Region::Kind::ball:
        ok = distance(x, outer.center) + r <= outer.r_outer + tol;
        break;
      case Region::Kind::annulus: {
        const double dd = distance(x, outer.center);
        ok = dd - r >= outer.r_inner - tol && dd + r <= outer.r_outer + tol;
        break;
      }
      case Region::Kind::interval:
        ok = x[0] - r >= outer.lo[0] - tol && x[0] + r <= outer.hi[0] + tol;
        break;
      case Region::Kind::box:
        ok = x[0] - r >= outer.lo[0] - tol && x[0] + r <= outer.hi[0] + tol &&
             (cover.dimension == 1 || (x[1] - r >= outer.lo[1] - tol && x[1] + r <= outer.hi[1] + tol));
        break;
    }
    if (!ok) return false;
  }
  return true;
}

double overlap_volume(const ChainCover& cover, std::size_t i, std::size_t j) {
  constexpr int kCells = 32;
  const double r0 = cover.r0, eta = r0 / kCells;
  const Point v = cover.centers[j] - cover.centers[i];
  const int b0 = cover.dimension == 2 ? -kCells : 0, b1 = cover.dimension == 2 ? kCells : 1;
  std::size_t count = 0;
  for (int b = b0; b < b1; ++b) {
    const double y = cover.dimension == 2 ? (b + 0.5) * eta : 0.0;
    for (int a = -kCells; a < kCells; ++a) {
      const Point p{(a + 0.5) * eta, y};
      if (norm(p) <= r0 && distance(p, v) <= r0) ++count;
    }
  }
  return static_cast<double>(count) * std::pow(eta, cover.dimension);
}

double min_overlap_constant(const ChainCover& cover) {
  const double s = cover.spacing;
  std::map<std::pair<long, long>, double> seen;
  double best = kInf;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    for (std::size_t j : cover.neighbours[i]) {
      const Point v = cover.centers[j] - cover.centers[i];
      const std::pair<long, long> key{std::lround(v[0] / s), std::lround(v[1] / s)};
      auto it = seen.find(key);
      if (it == seen.end()) it = seen.emplace(key, overlap_volume(cover, i, j)).first;
      best = std::min(best, it->second);
    }
  }
  return best / std::pow(cover.r0, cover.dimension);
}

double HarnackMeasurement::ratio() const { return inf > 0.0 ? sup / inf : kInf; }

double HarnackMeasurement::weak_constant() const {
  const double den = inf + source_norm;
  if (den <= 0.0) return eps_integral > 0.0 ? kInf : 0.0;
  return std::log(eps_integral / den) / (A * R);
}

double HarnackMeasurement::full_constant() const {
  const double den = inf + source_norm;
  if (den <= 0.0) return sup > 0.0 ? kInf : 0.0;
  return std::log(sup / den) / (A * R);
}

double HarnackMeasurement::local_max_constant() const {
  const double den = std::pow(A, dimension / eps) * eps_integral_outer + source_norm;
  if (den <= 0.0) return sup > 0.0 ? kInf : 0.0;
  return sup / den;
}

HarnackMeasurement measure_harnack(const EllipticProblem& problem, const GridFunction& u,
                                   HarnackGeometry geometry, double R, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const GridDomain& d = u.domain();
  const int n = d.dimension();
  if (problem.coeffs.dimension != n) throw DomainError("problem and grid dimensions differ");
  const HarnackRegions reg = harnack_regions(geometry, R);
  if (!ball_inside_grid(d, {0, 0}, R + 1)) throw DomainError("grid does not cover G'_R");
  const NodeSubset inner = select(d, reg.inner), outer = select(d, reg.outer);
  if (inner.empty()) throw DomainError("no nodes in G_R");

  double mx = 0.0, mn = kInf;
  for (std::size_t i : outer) {
    mx = std::max(mx, std::abs(u[i]));
    mn = std::min(mn, u[i]);
  }
  if (mn < -1e-10 * mx) throw PreconditionError("solution is negative on G'_R");
  std::vector<double> clipped(u.values().begin(), u.values().end());
  for (double& x : clipped) x = std::max(x, 0.0);
  const GridFunction v(u.domain_ptr(), std::move(clipped));

  HarnackMeasurement m;
  m.dimension = n;
  m.R = R;
  m.eps = eps;
  m.sup = sup_over(v, inner);
  m.inf = inf_over(v, inner);
  m.eps_integral = lebesgue_norm(v, eps, inner);
  m.eps_integral_outer = lebesgue_norm(v, eps, outer);
  m.A = compute_A(problem.coeffs, u.domain_ptr(), outer);
  if (problem.g) m.source_norm += ul_norm(sampled_abs(problem, u, problem.g), problem.coeffs.p, outer);
  if (problem.flux_source) {
    const auto& h = problem.flux_source;
    const GridFunction hn = sampled_abs(problem, u, [&h](const Point& x) { return norm(h(x)); });
    m.source_norm += lebesgue_norm(hn, problem.coeffs.q, outer);
  }
  return m;
}

HarnackMeasurement extrapolate(const HarnackMeasurement& coarse, const HarnackMeasurement& fine,
                               double factor) {
  if (!(factor > 1.0)) throw DomainError("refinement factor must exceed 1");
  const double w = 1.0 / (factor * factor - 1.0);
  auto ex = [w](double c, double f) { return std::max(0.0, f + (f - c) * w); };
  HarnackMeasurement m = fine;
  m.A = std::max(1.0, fine.A + (fine.A - coarse.A) * w);
  m.sup = ex(coarse.sup, fine.sup);
  m.inf = ex(coarse.inf, fine.inf);
  m.eps_integral = ex(coarse.eps_integral, fine.eps_integral);
  m.eps_integral_outer = ex(coarse.eps_integral_outer, fine.eps_integral_outer);
  m.source_norm = ex(coarse.source_norm, fine.source_norm);
  return m;
}

HarnackVerdict check(const HarnackMeasurement& m, const HarnackConstants& k, double tolerance) {
  HarnackVerdict v;
  const double base = m.inf + m.source_norm;
  const double slack = 1.0 + tolerance;
  v.weak_bound = std::exp(k.weak * m.A * m.R) * base;
  v.full_bound = std::exp(k.full * m.A * m.R) * base;
  v.local_max_bound =
      k.local_max * (std::pow(m.A, m.dimension / m.eps) * m.eps_integral_outer + m.source_norm);
  v.weak_ok = m.eps_integral <= v.weak_bound * slack;
  v.full_ok = m.sup <= v.full_bound * slack;
  v.local_max_ok = m.sup <= v.local_max_bound * slack;
  return v;
}

bool composition_holds(const HarnackMeasurement& m) {
  const double base = m.inf + m.source_norm;
  if (base <= 0.0) return true;
  const double full = m.sup / base;
  const double product =
      m.local_max_constant() * (std::pow(m.A, m.dimension / m.eps) * m.eps_integral_outer / base + 1.0);
  return full <= product * (1 + 1e-12);
}

HarnackConstants calibrate(const std::vector<HarnackMeasurement>& ms, int n) {
  HarnackConstants k;
  bool any = false;
  for (const auto& m : ms) {
    if (m.dimension != n) continue;
    any = true;
    k.weak = std::max(k.weak, m.weak_constant());
    k.full = std::max(k.full, m.full_constant());
    k.local_max = std::max(k.local_max, m.local_max_constant());
  }
  if (!any) throw DomainError("no measurements of that dimension");
  return k;
}

AbpReport abp_check(const EllipticProblem& problem, const GridFunction& w, double p) {
  const GridDomain& d = w.domain();
  if (d.diameter() > 1.0 + 1e-12) throw PreconditionError("ABP check needs diam <= 1");
  double mx = 0.0;
  for (double x : w.values()) mx = std::max(mx, std::abs(x));
  for (std::size_t i : d.boundary_nodes()) {
    if (w[i] > 1e-12 * mx) throw PreconditionError("w must be <= 0 on the boundary");
  }
  AbpReport r;
  r.sup_w = *std::max_element(w.values().begin(), w.values().end());
  NodeSubset positive;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (w[i] > 0.0) positive.push_back(i);
  }
  if (positive.empty()) return r;
  r.g_norm = positive_part_norm(sampled_abs(problem, w, problem.g), p, positive);
  r.ratio = r.g_norm > 0.0 ? r.sup_w / r.g_norm : kInf;
  return r;
}

GrowthLemmaCheck verify_growth_lemma(const GridFunction& u, const Point& x1, double rho, double a,
                                     double delta, double kappa, double cbar, double g_norm,
                                     double p) {
  const GridDomain& d = u.domain();
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (!ball_inside_grid(d, x1, 2.0 * rho)) throw DomainError("B_2rho(x1) leaves the grid");
  const NodeSubset ball = select(d, Region::ball(x1, rho));
  if (ball.empty()) throw DomainError("ball contains no nodes");
  GrowthLemmaCheck r;
  r.fraction = level_set_measure(u, a, ball) / measure(d, ball);
  r.hypothesis = r.fraction >= 1.0 - delta;
  r.infimum = inf_over(u, ball);
  const double power = std::isinf(p) ? 2.0 : 2.0 - d.dimension() / p;
  r.threshold = kappa * a - cbar * std::pow(rho, power) * g_norm;
  r.conclusion = r.infimum > r.threshold;
  return r;
}

InkspotsCheck verify_inkspots(const GridDomain& d, const NodeSubset& E, const NodeSubset& F,
                              const Region& ball, double delta, double c) {
  if (ball.kind != Region::Kind::ball) throw DomainError("B must be a ball");
  const NodeSubset B = select(d, ball);
  if (!std::includes(F.begin(), F.end(), E.begin(), E.end())) throw DomainError("E is not inside F");
  if (!std::includes(B.begin(), B.end(), F.begin(), F.end())) throw DomainError("F is not inside B");
  InkspotsCheck r;
  r.e_measure = measure(d, E);
  r.f_measure = measure(d, F);
  r.b_measure = measure(d, B);
  r.conclusion = r.e_measure <= (1.0 - c * delta) * r.f_measure * (1 + 1e-12) + 1e-300;

  bool hyp = r.e_measure <= (1.0 - delta) * r.b_measure * (1 + 1e-12);
  std::vector<char> inE(d.size(), 0), inF(d.size(), 0);
  for (std::size_t i : E) inE[i] = 1;
  for (std::size_t i : F) inF[i] = 1;
  const double rad = ball.r_outer;
  for (std::size_t x : B) {
    if (!hyp) break;
    const Point& cx = d.point(x);
    for (double r = d.spacing(); hyp && distance(cx, ball.center) + r <= rad * (1 + 1e-12); r *= 2.0) {
      double vol = 0.0, hit = 0.0;
      bool inside_f = true;
      for (std::size_t y : B) {
        if (distance(d.point(y), cx) > r * (1 + 1e-12)) continue;
        vol += d.cell_volume(y);
        if (inE[y]) hit += d.cell_volume(y);
        if (!inF[y]) inside_f = false;
      }
      if (hit > (1.0 - delta) * vol && !inside_f) hyp = false;
    }
  }
  r.hypotheses = hyp;
  return r;
}

LevelSetDecay verify_levelset_decay(const GridFunction& u, const NodeSubset& ball, double M,
                                    double c, double delta, int kmax) {
  if (ball.empty()) throw DomainError("empty ball");
  if (!(M > 1.0) || kmax < 1) throw DomainError("need M > 1 and kmax >= 1");
  LevelSetDecay r;
  const GridDomain& d = u.domain();
  for (std::size_t i : ball) {
    if (u[i] < 0.0) r.precondition = false;
  }
  if (inf_over(u, ball) > 1.0) r.precondition = false;
  const double vol = measure(d, ball);
  for (int k = 1; k <= kmax; ++k) {
    const double f = level_set_measure(u, std::pow(M, k), ball) / vol;
    const double b = std::pow(1.0 - c * delta, k);
    r.fraction.push_back(f);
    r.bound.push_back(b);
    if (r.first_violation == 0 && f > b * (1 + 1e-12)) r.first_violation = k;
  }
  return r;
}

}  // namespace harnlab
