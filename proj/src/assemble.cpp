#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "harnlab/errors.hpp"
#include "harnlab/operators.hpp"

namespace harnlab {

namespace {

using Triplet = Eigen::Triplet<double>;

// Everything the stencil code needs, per node.
struct NodeData {
  std::vector<Sym2> A;
  std::vector<Point> b1;  // inside the flux (divergence form only)
  std::vector<Point> b2;  // transport drift
  std::vector<double> c, g, bc;
  std::vector<Point> flux;  // divergence source
  bool divergence = false;
};

class RowBuilder {
 public:
  explicit RowBuilder(std::vector<Triplet>& t) : t_(t) {}
  void start(std::size_t row) {
    row_ = row;
    upwind_ = false;
  }
  void add(std::size_t col, double v) {
    if (v != 0.0) t_.emplace_back(static_cast<int>(row_), static_cast<int>(col), v);
  }
  std::size_t row() const { return row_; }

  // beta * du along a direction with neighbours plus/minus at distance step.
  void transport(std::size_t plus, std::size_t minus, double beta, double step, double a) {
    if (beta == 0.0) return;
    if (std::abs(beta) * step > 2.0 * a) {
      upwind_ = true;
      if (beta > 0.0) {
        add(plus, beta / step);
        add(row_, -beta / step);
      } else {
        add(minus, -beta / step);
        add(row_, beta / step);
      }
    } else {
      add(plus, beta / (2 * step));
      add(minus, -beta / (2 * step));
    }
  }

  // coef * U where U is the face value between this node and nb. The
  // one-sided choice keeps off-diagonals nonnegative.
  void face(std::size_t nb, double coef, bool one_sided) {
    if (coef == 0.0) return;
    if (one_sided) {
      upwind_ = true;
      add(coef > 0.0 ? nb : row_, coef);
    } else {
      add(row_, 0.5 * coef);
      add(nb, 0.5 * coef);
    }
  }

  bool upwinded() const { return upwind_; }

 private:
  std::vector<Triplet>& t_;
  std::size_t row_ = 0;
  bool upwind_ = false;
};

Point avg(const Point& a, const Point& b) { return 0.5 * (a + b); }
double avg(double a, double b) { return 0.5 * (a + b); }

double quad(const Sym2& A, const Point& e, const Point& f) {
  return e[0] * (A.xx * f[0] + A.xy * f[1]) + e[1] * (A.xy * f[0] + A.yy * f[1]);
}

void interval_row(const GridDomain& d, const NodeData& nd, std::size_t i, RowBuilder& rb,
                  double& rhs) {
  const double h = d.hx();
  const std::size_t e = i + 1, w = i - 1;
  if (!nd.divergence) {
    const double a = nd.A[i].xx;
    rb.add(e, a / (h * h));
    rb.add(w, a / (h * h));
    rb.add(i, -2 * a / (h * h));
    rb.transport(e, w, nd.b2[i][0], h, a);
  } else {
    const double ap = avg(nd.A[i].xx, nd.A[e].xx), am = avg(nd.A[i].xx, nd.A[w].xx);
    rb.add(e, ap / (h * h));
    rb.add(w, am / (h * h));
    rb.add(i, -(ap + am) / (h * h));
    const double bp = avg(nd.b1[i][0], nd.b1[e][0]), bm = avg(nd.b1[i][0], nd.b1[w][0]);
    rb.face(e, bp / h, std::abs(bp) * h > 2 * ap);
    rb.face(w, -bm / h, std::abs(bm) * h > 2 * am);
    rb.transport(e, w, nd.b2[i][0], h, nd.A[i].xx);
    rhs += (avg(nd.flux[i][0], nd.flux[e][0]) - avg(nd.flux[i][0], nd.flux[w][0])) / h;
  }
}

void box_row(const GridDomain& d, const NodeData& nd, std::size_t idx, RowBuilder& rb,
             double& rhs) {
  const std::size_t nx = d.nx();
  const std::size_t i = idx % nx, j = idx / nx;
  auto at = [&](std::size_t ii, std::size_t jj) { return d.box_index(ii, jj); };
  const std::size_t E = at(i + 1, j), W = at(i - 1, j), N = at(i, j + 1), S = at(i, j - 1);
  const std::size_t NE = at(i + 1, j + 1), NW = at(i - 1, j + 1), SE = at(i + 1, j - 1),
                    SW = at(i - 1, j - 1);
  const double hx = d.hx(), hy = d.hy();
  const Sym2& A = nd.A[idx];
  if (!nd.divergence) {
    const double ax = A.xx / (hx * hx), ay = A.yy / (hy * hy), axy = std::abs(A.xy) / (hx * hy);
    if (axy > 0.0 && ax >= axy && ay >= axy) {
      // Cross derivative along the diagonal matching the sign of a12: all
      // neighbour weights stay nonnegative.
      rb.add(E, ax - axy);
      rb.add(W, ax - axy);
      rb.add(N, ay - axy);
      rb.add(S, ay - axy);
      rb.add(idx, -2 * (ax + ay - axy));
      rb.add(A.xy > 0 ? NE : NW, axy);
      rb.add(A.xy > 0 ? SW : SE, axy);
    } else {
      rb.add(E, ax);
      rb.add(W, ax);
      rb.add(N, ay);
      rb.add(S, ay);
      rb.add(idx, -2 * ax - 2 * ay);
      const double x = A.xy / (2 * hx * hy);
      rb.add(NE, x);
      rb.add(SW, x);
      rb.add(NW, -x);
      rb.add(SE, -x);
    }
    rb.transport(E, W, nd.b2[idx][0], hx, A.xx);
    rb.transport(N, S, nd.b2[idx][1], hy, A.yy);
    return;
  }
  // x faces
  const double a11p = avg(A.xx, nd.A[E].xx), a11m = avg(A.xx, nd.A[W].xx);
  const double a12p = avg(A.xy, nd.A[E].xy), a12m = avg(A.xy, nd.A[W].xy);
  rb.add(E, a11p / (hx * hx));
  rb.add(W, a11m / (hx * hx));
  rb.add(idx, -(a11p + a11m) / (hx * hx));
  const double cx = 1.0 / (4 * hx * hy);
  rb.add(N, (a12p - a12m) * cx);
  rb.add(S, -(a12p - a12m) * cx);
  rb.add(NE, a12p * cx);
  rb.add(SE, -a12p * cx);
  rb.add(NW, -a12m * cx);
  rb.add(SW, a12m * cx);
  // y faces
  const double a22p = avg(A.yy, nd.A[N].yy), a22m = avg(A.yy, nd.A[S].yy);
  const double a21p = avg(A.xy, nd.A[N].xy), a21m = avg(A.xy, nd.A[S].xy);
  rb.add(N, a22p / (hy * hy));
  rb.add(S, a22m / (hy * hy));
  rb.add(idx, -(a22p + a22m) / (hy * hy));
  rb.add(E, (a21p - a21m) * cx);
  rb.add(W, -(a21p - a21m) * cx);
  rb.add(NE, a21p * cx);
  rb.add(NW, -a21p * cx);
  rb.add(SE, -a21m * cx);
  rb.add(SW, a21m * cx);

  const double bxp = avg(nd.b1[idx][0], nd.b1[E][0]), bxm = avg(nd.b1[idx][0], nd.b1[W][0]);
  const double byp = avg(nd.b1[idx][1], nd.b1[N][1]), bym = avg(nd.b1[idx][1], nd.b1[S][1]);
  rb.face(E, bxp / hx, std::abs(bxp) * hx > 2 * a11p);
  rb.face(W, -bxm / hx, std::abs(bxm) * hx > 2 * a11m);
  rb.face(N, byp / hy, std::abs(byp) * hy > 2 * a22p);
  rb.face(S, -bym / hy, std::abs(bym) * hy > 2 * a22m);
  rb.transport(E, W, nd.b2[idx][0], hx, A.xx);
  rb.transport(N, S, nd.b2[idx][1], hy, A.yy);
  rhs += (avg(nd.flux[idx][0], nd.flux[E][0]) - avg(nd.flux[idx][0], nd.flux[W][0])) / hx +
         (avg(nd.flux[idx][1], nd.flux[N][1]) - avg(nd.flux[idx][1], nd.flux[S][1])) / hy;
}

void check_isotropic(const Sym2& A, std::size_t i) {
  const double tol = 1e-12 * std::max(1.0, std::abs(A.xx));
  if (std::abs(A.xy) > tol || std::abs(A.xx - A.yy) > tol) {
    throw DomainError("divergence form on a polar grid needs isotropic A (node " +
                      std::to_string(i) + ")");
  }
}

void center_row(const GridDomain& d, const NodeData& nd, RowBuilder& rb, double& rhs) {
  const std::size_t N = d.n_theta();
  const double dr = d.dr(), dt = d.dtheta();
  const double fn = static_cast<double>(N);
  const Sym2& A = nd.A[0];
  double diag = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t nb = d.polar_index(0, k);
    const double th = static_cast<double>(k) * dt;
    const Point e{std::cos(th), std::sin(th)};
    if (!nd.divergence) {
      const double w = 2.0 / (fn * dr * dr) *
                       (A.trace() + 2 * (A.xx - A.yy) * std::cos(2 * th) + 4 * A.xy * std::sin(2 * th));
      rb.add(nb, w);
      diag -= w;
    } else {
      check_isotropic(nd.A[nb], nb);
      const double a = avg(A.xx, nd.A[nb].xx);
      rb.add(nb, 4 * a / (fn * dr * dr));
      diag -= 4 * a / (fn * dr * dr);
      const double bf = dot(avg(nd.b1[0], nd.b1[nb]), e);
      rb.face(nb, 4 * bf / (fn * dr), std::abs(bf) * dr > 2 * a);
      rhs += 4 * dot(avg(nd.flux[0], nd.flux[nb]), e) / (fn * dr);
    }
  }
  rb.add(0, diag);
  const Point beta = nd.b2[0];
  const double bn = norm(beta);
  if (bn > 0.0) {
    const bool one_sided = bn * dr > A.trace();
    for (std::size_t k = 0; k < N; ++k) {
      const std::size_t nb = d.polar_index(0, k);
      const double th = static_cast<double>(k) * dt;
      const double be = dot(beta, Point{std::cos(th), std::sin(th)});
      const double w = one_sided ? 4.0 / (fn * dr) * std::max(be, 0.0) : 2.0 / (fn * dr) * be;
      rb.add(nb, w);
      rb.add(0, -w);
    }
  }
}

void polar_row(const GridDomain& d, const NodeData& nd, std::size_t idx, RowBuilder& rb,
               double& rhs) {
  const std::size_t N = d.n_theta();
  const std::size_t first = d.has_center() ? 1 : 0;
  const std::size_t ring = (idx - first) / N, k = (idx - first) % N;
  const double r = d.ring_radius(ring), dr = d.dr(), dt = d.dtheta();
  const double th = static_cast<double>(k) * dt;
  const Point er{std::cos(th), std::sin(th)}, et{-std::sin(th), std::cos(th)};
  const bool to_center = d.has_center() && ring == 0;
  const std::size_t O = d.polar_index(ring + 1, k), Op = d.polar_index(ring + 1, k + 1),
                    Om = d.polar_index(ring + 1, k + N - 1);
  const std::size_t In = to_center ? 0 : d.polar_index(ring - 1, k);
  const std::size_t Ip = to_center ? 0 : d.polar_index(ring - 1, k + 1);
  const std::size_t Im = to_center ? 0 : d.polar_index(ring - 1, k + N - 1);
  const std::size_t Tp = d.polar_index(ring, k + 1), Tm = d.polar_index(ring, k + N - 1);
  const Sym2& A = nd.A[idx];

  if (!nd.divergence) {
    const double Arr = quad(A, er, er), Att = quad(A, et, et), Art = quad(A, er, et);
    rb.add(O, Arr / (dr * dr));
    rb.add(In, Arr / (dr * dr));
    rb.add(idx, -2 * Arr / (dr * dr));
    rb.add(Tp, Att / (r * r * dt * dt));
    rb.add(Tm, Att / (r * r * dt * dt));
    rb.add(idx, -2 * Att / (r * r * dt * dt));
    const double x = 2 * Art / (4 * r * dr * dt);
    rb.add(Op, x);
    rb.add(Im, x);
    rb.add(Om, -x);
    rb.add(Ip, -x);
    rb.transport(O, In, dot(nd.b2[idx], er) + Att / r, dr, Arr);
    rb.transport(Tp, Tm, dot(nd.b2[idx], et) - 2 * Art / r, r * dt, Att);
    return;
  }

  check_isotropic(A, idx);
  const double a = A.xx;
  const double ro = r + 0.5 * dr, ri = r - 0.5 * dr;
  const double ao = avg(a, nd.A[O].xx), ai = avg(a, nd.A[In].xx);
  const double atp = avg(a, nd.A[Tp].xx), atm = avg(a, nd.A[Tm].xx);
  rb.add(O, ro * ao / (r * dr * dr));
  rb.add(In, ri * ai / (r * dr * dr));
  rb.add(idx, -(ro * ao + ri * ai) / (r * dr * dr));
  rb.add(Tp, atp / (r * r * dt * dt));
  rb.add(Tm, atm / (r * r * dt * dt));
  rb.add(idx, -(atp + atm) / (r * r * dt * dt));

  const Point etp{-std::sin(th + 0.5 * dt), std::cos(th + 0.5 * dt)};
  const Point etm{-std::sin(th - 0.5 * dt), std::cos(th - 0.5 * dt)};
  const double bo = dot(avg(nd.b1[idx], nd.b1[O]), er), bi = dot(avg(nd.b1[idx], nd.b1[In]), er);
  const double btp = dot(avg(nd.b1[idx], nd.b1[Tp]), etp);
  const double btm = dot(avg(nd.b1[idx], nd.b1[Tm]), etm);
  rb.face(O, ro * bo / (r * dr), std::abs(bo) * dr > 2 * ao);
  rb.face(In, -ri * bi / (r * dr), std::abs(bi) * dr > 2 * ai);
  rb.face(Tp, btp / (r * dt), std::abs(btp) * r * dt > 2 * atp);
  rb.face(Tm, -btm / (r * dt), std::abs(btm) * r * dt > 2 * atm);
  rb.transport(O, In, dot(nd.b2[idx], er), dr, a);
  rb.transport(Tp, Tm, dot(nd.b2[idx], et), r * dt, a);

  rhs += (ro * dot(avg(nd.flux[idx], nd.flux[O]), er) - ri * dot(avg(nd.flux[idx], nd.flux[In]), er)) /
             (r * dr) +
         (dot(avg(nd.flux[idx], nd.flux[Tp]), etp) - dot(avg(nd.flux[idx], nd.flux[Tm]), etm)) /
             (r * dt);
}

LinearSystem build(const DomainPtr& dp, const NodeData& nd) {
  const GridDomain& d = *dp;
  const std::size_t n = d.size();
  std::vector<Triplet> trip;
  trip.reserve(n * 10);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  RowBuilder rb(trip);
  AssemblyDiagnostics diag;
  for (std::size_t i = 0; i < n; ++i) {
    rb.start(i);
    double b = 0.0;
    if (d.is_boundary(i)) {
      rb.add(i, 1.0);
      rhs[static_cast<Eigen::Index>(i)] = nd.bc[i];
      continue;
    }
    switch (d.shape()) {
      case Shape::interval:
        interval_row(d, nd, i, rb, b);
        break;
      case Shape::box:
        box_row(d, nd, i, rb, b);
        break;
      case Shape::disk:
      case Shape::annulus:
        if (d.has_center() && i == 0) {
          center_row(d, nd, rb, b);
        } else {
          polar_row(d, nd, i, rb, b);
        }
        break;
    }
    rb.add(i, nd.c[i]);
    rhs[static_cast<Eigen::Index>(i)] = nd.g[i] + b;
    if (rb.upwinded()) ++diag.upwind_nodes;
  }
  LinearSystem sys;
  sys.domain = dp;
  sys.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);

  for (auto i : d.interior_nodes()) {
    double dv = 0.0, off = 0.0;
    bool z = true;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.matrix,
                                                                        static_cast<Eigen::Index>(i));
         it; ++it) {
      if (static_cast<std::size_t>(it.col()) == i) {
        dv = it.value();
      } else {
        off += it.value();
        if (it.value() < 0.0) z = false;
      }
    }
    const bool row_z = z && dv < 0.0;
    const bool dom = off <= std::abs(dv) * (1 + 1e-12);
    if (!row_z) diag.z_pattern = false;
    if (!dom) diag.diagonally_dominant = false;
    if (!row_z || !dom) ++diag.violating_rows;
  }
  sys.diagnostics = diag;
  return sys;
}

NodeData base_data(const EllipticProblem& pb, const GridDomain& d) {
  pb.validate();
  const SampledCoefficients s = sample(pb.coeffs, d);
  NodeData nd;
  nd.A = s.A;
  nd.c = s.c;
  nd.g.assign(d.size(), 0.0);
  nd.bc.assign(d.size(), 0.0);
  nd.flux.assign(d.size(), Point{0.0, 0.0});
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Point y = sample_location(pb.coeffs, d.point(i), d.spacing());
    if (pb.g) nd.g[i] = pb.g(y);
    if (pb.flux_source) nd.flux[i] = pb.flux_source(y);
    if (d.dimension() == 1) nd.flux[i][1] = 0.0;
    if (pb.boundary && d.is_boundary(i)) nd.bc[i] = pb.boundary(d.point(i));
    if (!std::isfinite(nd.g[i] + nd.flux[i][0] + nd.flux[i][1] + nd.bc[i])) {
      throw DomainError("non-finite data at node " + std::to_string(i));
    }
  }
  if (pb.form.kind == OperatorKind::divergence) {
    nd.divergence = true;
    nd.b1 = s.b1;
    nd.b2 = s.b2;
  } else {
    nd.b1.assign(d.size(), Point{0.0, 0.0});
    nd.b2.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) nd.b2[i] = s.b1[i] + s.b2[i];
  }
  return nd;
}

// Discrete Hessian and gradient at an interior node, matching the stencils above.
void hessian_gradient(const GridDomain& d, const Eigen::VectorXd& u, std::size_t idx, Sym2& H,
                      Point& Du) {
  auto U = [&](std::size_t j) { return u[static_cast<Eigen::Index>(j)]; };
  switch (d.shape()) {
    case Shape::interval: {
      const double h = d.hx();
      H = {(U(idx + 1) - 2 * U(idx) + U(idx - 1)) / (h * h), 0.0, 0.0};
      Du = {(U(idx + 1) - U(idx - 1)) / (2 * h), 0.0};
      return;
    }
    case Shape::box: {
      const std::size_t nx = d.nx(), i = idx % nx, j = idx / nx;
      auto at = [&](std::size_t ii, std::size_t jj) { return U(d.box_index(ii, jj)); };
      const double hx = d.hx(), hy = d.hy();
      H.xx = (at(i + 1, j) - 2 * at(i, j) + at(i - 1, j)) / (hx * hx);
      H.yy = (at(i, j + 1) - 2 * at(i, j) + at(i, j - 1)) / (hy * hy);
      H.xy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) /
             (4 * hx * hy);
      Du = {(at(i + 1, j) - at(i - 1, j)) / (2 * hx), (at(i, j + 1) - at(i, j - 1)) / (2 * hy)};
      return;
    }
    case Shape::disk:
    case Shape::annulus:
      break;
  }
  const std::size_t N = d.n_theta();
  const double dr = d.dr(), dt = d.dtheta(), fn = static_cast<double>(N);
  if (d.has_center() && idx == 0) {
    double m0 = 0.0, mc = 0.0, ms = 0.0;
    Point g{0.0, 0.0};
    for (std::size_t k = 0; k < N; ++k) {
      const double th = static_cast<double>(k) * dt;
      const double s = 2 * (U(d.polar_index(0, k)) - U(0)) / (dr * dr);
      m0 += s / fn;
      mc += s * std::cos(2 * th) / fn;
      ms += s * std::sin(2 * th) / fn;
      g = g + (2.0 / (fn * dr) * (U(d.polar_index(0, k)) - U(0))) * Point{std::cos(th), std::sin(th)};
    }
    const double tr = 2 * m0, diff = 4 * mc;
    H = {0.5 * (tr + diff), 2 * ms, 0.5 * (tr - diff)};
    Du = g;
    return;
  }
  const std::size_t first = d.has_center() ? 1 : 0;
  const std::size_t ring = (idx - first) / N, k = (idx - first) % N;
  const bool to_center = d.has_center() && ring == 0;
  const double r = d.ring_radius(ring), th = static_cast<double>(k) * dt;
  const double uo = U(d.polar_index(ring + 1, k)), uop = U(d.polar_index(ring + 1, k + 1)),
               uom = U(d.polar_index(ring + 1, k + N - 1));
  const double ui = to_center ? U(0) : U(d.polar_index(ring - 1, k));
  const double uip = to_center ? U(0) : U(d.polar_index(ring - 1, k + 1));
  const double uim = to_center ? U(0) : U(d.polar_index(ring - 1, k + N - 1));
  const double utp = U(d.polar_index(ring, k + 1)), utm = U(d.polar_index(ring, k + N - 1));
  const double u0 = U(idx);
  const double ur = (uo - ui) / (2 * dr), ut = (utp - utm) / (2 * dt);
  const double hrr = (uo - 2 * u0 + ui) / (dr * dr);
  const double htt = ur / r + (utp - 2 * u0 + utm) / (r * r * dt * dt);
  const double hrt = (uop - uom - uip + uim) / (4 * dr * dt * r) - ut / (r * r);
  const Point er{std::cos(th), std::sin(th)}, et{-std::sin(th), std::cos(th)};
  // H = Q Hp Q^T with Q = [er et]
  H.xx = hrr * er[0] * er[0] + 2 * hrt * er[0] * et[0] + htt * et[0] * et[0];
  H.yy = hrr * er[1] * er[1] + 2 * hrt * er[1] * et[1] + htt * et[1] * et[1];
  H.xy = hrr * er[0] * er[1] + hrt * (er[0] * et[1] + er[1] * et[0]) + htt * et[0] * et[1];
  Du = ur * er + (ut / r) * et;
}

Sym2 frozen_matrix(const Sym2& H, double lambda, double Lambda, PucciSign sign, int dim) {
  auto coef = [&](double mu) {
    if (sign == PucciSign::plus) return mu > 0.0 ? Lambda : lambda;
    return mu < 0.0 ? Lambda : lambda;
  };
  if (dim == 1) return {coef(H.xx), 0.0, 0.0};
  Eigen::Matrix2d m;
  m << H.xx, H.xy, H.xy, H.yy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  for (int k = 0; k < 2; ++k) {
    const Eigen::Vector2d v = es.eigenvectors().col(k);
    A += coef(es.eigenvalues()[k]) * v * v.transpose();
  }
  return {A(0, 0), 0.5 * (A(0, 1) + A(1, 0)), A(1, 1)};
}

}  // namespace

LinearSystem assemble(const EllipticProblem& problem, const DomainPtr& d) {
  if (problem.form.is_pucci()) {
    throw DomainError("Pucci operators are nonlinear; use assemble_frozen");
  }
  return build(d, base_data(problem, *d));
}

LinearSystem assemble_frozen(const EllipticProblem& problem, const DomainPtr& dp,
                             const GridFunction& u) {
  if (!problem.form.is_pucci()) return assemble(problem, dp);
  const GridDomain& d = *dp;
  if (u.size() != d.size()) throw DomainError("iterate does not match the grid");
  NodeData nd = base_data(problem, d);
  const SampledCoefficients s = sample(problem.coeffs, d);
  const PucciSign sign =
      problem.form.kind == OperatorKind::pucci_plus ? PucciSign::plus : PucciSign::minus;
  const double drift_sign = sign == PucciSign::plus ? 1.0 : -1.0;
  Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.values().data(),
                                                         static_cast<Eigen::Index>(u.size()));
  for (auto i : d.interior_nodes()) {
    Sym2 H;
    Point Du;
    hessian_gradient(d, uv, i, H, Du);
    nd.A[i] = frozen_matrix(H, problem.coeffs.lambda, problem.coeffs.Lambda, sign, d.dimension());
    const double bmag = norm(s.b1[i]) + norm(s.b2[i]);
    const double gn = norm(Du);
    nd.b2[i] = gn > 0.0 ? (drift_sign * bmag / gn) * Du : Point{0.0, 0.0};
  }
  return build(dp, nd);
}

}  // namespace harnlab
