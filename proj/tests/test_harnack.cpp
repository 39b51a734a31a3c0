#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "harnlab/errors.hpp"
#include "harnlab/harnack.hpp"
#include "harnlab/solver.hpp"

using namespace harnlab;

namespace {

// All-pairs shortest hop counts by Floyd-Warshall on the link graph.
std::vector<std::vector<std::size_t>> floyd(const ChainCover& c) {
  const std::size_t m = c.size(), big = 1u << 30;
  std::vector<std::vector<std::size_t>> d(m, std::vector<std::size_t>(m, big));
  for (std::size_t i = 0; i < m; ++i) {
    d[i][i] = 0;
    for (std::size_t j : c.neighbours[i]) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

EllipticProblem ode(double b, double c) {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::constant(1, -2 * b, -c);
  return pb;
}

}  // namespace

TEST_CASE("one-dimensional chain cover") {
  const double r0 = 1.0 / 3.0;
  const ChainCover cover = build_chain_cover(Region::interval(-4, 4), 1, r0);
  CHECK(cover.size() == 53);
  CHECK(cover.spacing == doctest::Approx(r0 / 2));

  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    if (cover.centers[i][0] < cover.centers[lo][0]) lo = i;
    if (cover.centers[i][0] > cover.centers[hi][0]) hi = i;
  }
  const auto oracle = floyd(cover);
  const auto chain = chain_between(cover, lo, hi);
  CHECK(chain.size() == oracle[lo][hi] + 1);
  CHECK(chain.size() == 27);
  CHECK(chain.size() <= 49);
  CHECK(chain_diameter(cover) == 27);
  CHECK(chain_between(cover, 5, 5).size() == 1);
  CHECK(chain_between(cover, 5, cover.neighbours[5][0]).size() == 2);

  auto d = make_domain(GridDomain::interval(-5, 5, 0.01));
  CHECK(covers(cover, *d, select(*d, Region::interval(-4, 4))));
  CHECK(doubled_balls_inside(cover, Region::interval(-5, 5)));
  // Two unit-radius intervals at distance r0 overlap in length r0.
  CHECK(min_overlap_constant(cover) == doctest::Approx(1.0).epsilon(1.0 / 16));

  CHECK_THROWS_AS(build_chain_cover(Region::interval(-4, 4), 1, 0.6), DomainError);
  CHECK_THROWS_AS(build_chain_cover(Region::interval(-4, 4), 1, 0.0), DomainError);
  CHECK_THROWS_AS(build_chain_cover(Region::interval(-1.5, 1.5), 1, 0.25), DomainError);
}

TEST_CASE("two-dimensional chain cover on a disk") {
  const double r0 = 1.0 / 3.0;
  const ChainCover cover = build_chain_cover(Region::ball({0, 0}, 4), 2, r0);
  auto d = make_domain(GridDomain::box({-5, -5}, {5, 5}, 0.05));
  CHECK(covers(cover, *d, select(*d, Region::ball({0, 0}, 4))));
  CHECK(doubled_balls_inside(cover, Region::ball({0, 0}, 5)));
  const double lens = 2 * std::numbers::pi / 3 - std::sqrt(3.0) / 2;
  const double c5 = min_overlap_constant(cover);
  CHECK(c5 == doctest::Approx(lens).epsilon(0.02));

  // Chains are valid link paths whose overlaps respect the measured minimum.
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, cover.size() - 1);
  for (int t = 0; t < 20; ++t) {
    const auto chain = chain_between(cover, pick(rng), pick(rng));
    for (std::size_t i = 1; i < chain.size(); ++i) {
      const auto& nb = cover.neighbours[chain[i - 1]];
      CHECK(std::find(nb.begin(), nb.end(), chain[i]) != nb.end());
      CHECK(overlap_volume(cover, chain[i - 1], chain[i]) >= c5 * r0 * r0 * (1 - 1e-12));
    }
  }
  CHECK(cover.cardinality_constant() < 40);
}

TEST_CASE("chain cover constants are stable under the R and r0 sweep") {
  for (int n : {1, 2}) {
    double mlo = kInf, mhi = 0, dlo = kInf, dhi = 0;
    for (double R : {4.0, 8.0}) {
      for (double r0 : {1.0 / 3, 1.0 / 6}) {
        const auto c = build_chain_cover(Region::ball({0, 0}, R), n, r0);
        const double m = c.cardinality_constant();
        const double dd = static_cast<double>(chain_diameter(c)) * r0 / R;
        mlo = std::min(mlo, m), mhi = std::max(mhi, m);
        dlo = std::min(dlo, dd), dhi = std::max(dhi, dd);
      }
    }
    CHECK(mhi < 2 * mlo);
    CHECK(dhi < 2 * dlo);
  }
}

TEST_CASE("Harnack measurements on explicit solutions") {
  SUBCASE("constant solution") {
    EllipticProblem pb;
    pb.coeffs = CoefficientSet::laplacian(1);
    auto d = make_domain(GridDomain::interval(-5, 5, 0.01));
    const auto m = measure_harnack(pb, GridFunction::constant(d, 1.0), HarnackGeometry::ball, 4);
    CHECK(m.sup == 1.0);
    CHECK(m.inf == 1.0);
    CHECK(m.ratio() == 1.0);
    CHECK(m.A == 1.0);
    // G_R holds 801 nodes of weight h: (8.01)^2.
    CHECK(m.eps_integral == doctest::Approx(8.01 * 8.01).epsilon(1e-9));
  }
  SUBCASE("cosh ratio approaches e^R") {
    EllipticProblem pb = ode(0, 1);
    double prev = 0.0;
    for (double R : {4.0, 8.0}) {
      auto d = make_domain(GridDomain::interval(-R - 1, R + 1, 0.01));
      auto u = GridFunction::sample(d, [](const Point& x) { return std::cosh(x[0]); });
      const auto m = measure_harnack(pb, u, HarnackGeometry::ball, R);
      CHECK(m.ratio() == doctest::Approx(std::cosh(R)).epsilon(1e-9));
      CHECK(m.A == doctest::Approx(2.0).epsilon(1e-9));
      const double rate = std::log(m.ratio()) / R;
      CHECK(rate > prev);
      CHECK(rate < 1.0);
      prev = rate;
    }
    CHECK(prev > 1 - std::log(2.0) / 8 - 1e-6);
  }
  SUBCASE("exponential solution of the drift ODE") {
    const double D = 3 + std::sqrt(13.0);
    EllipticProblem pb = ode(3, 4);
    const double R = 4;
    auto d = make_domain(GridDomain::interval(-R - 1, R + 1, 0.01));
    auto u = GridFunction::sample(d, [D](const Point& x) { return std::exp(D * x[0]); });
    const auto m = measure_harnack(pb, u, HarnackGeometry::ball, R);
    CHECK(std::log(m.ratio()) / (2 * R) == doctest::Approx(D).epsilon(1e-9));
    CHECK(m.A == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(m.full_constant() == doctest::Approx(2 * D / 9).epsilon(1e-9));
    CHECK(composition_holds(m));
  }
  SUBCASE("negative solutions are rejected") {
    EllipticProblem pb;
    pb.coeffs = CoefficientSet::laplacian(1);
    auto d = make_domain(GridDomain::interval(-5, 5, 0.01));
    CHECK_THROWS_AS(measure_harnack(pb, GridFunction::sample(d, [](const Point& x) { return x[0]; }),
                                    HarnackGeometry::ball, 4),
                    PreconditionError);
    auto small = make_domain(GridDomain::interval(-3, 3, 0.01));
    CHECK_THROWS_AS(measure_harnack(pb, GridFunction::constant(small, 1.0), HarnackGeometry::ball, 4),
                    DomainError);
  }
}

TEST_CASE("calibrated constants reproduce the training suite") {
  std::vector<HarnackMeasurement> ms;
  for (const auto& c : training_suite()) {
    if (c.problem.coeffs.dimension != 1) continue;
    ms.push_back(measure_case(c));
    CHECK(ms.back().sup >= ms.back().inf);
    CHECK(ms.back().ratio() >= 1.0);
    CHECK(composition_holds(ms.back()));
  }
  const HarnackConstants k = calibrate(ms, 1);
  CHECK(k.weak > 0);
  CHECK(k.local_max > 0);
  for (const auto& m : ms) CHECK(check(m, k).ok());
  // A strictly smaller constant must fail somewhere.
  HarnackConstants tight = k;
  tight.full *= 0.9;
  bool some_fail = false;
  for (const auto& m : ms) some_fail = some_fail || !check(m, tight).full_ok;
  CHECK(some_fail);
}

TEST_CASE("ABP ratio") {
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::laplacian(1);
  pb.g = [](const Point&) { return -1.0; };
  auto d = make_domain(GridDomain::interval(0, 1, 0.01));
  auto r = abp_check(pb, solve(pb, d));
  CHECK(r.sup_w == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(r.g_norm == 1.0);
  CHECK(r.ratio == doctest::Approx(0.125).epsilon(1e-12));

  EllipticProblem zero;
  zero.coeffs = CoefficientSet::constant(1, 0.0, -2.0);
  zero.boundary = [](const Point&) { return -1.0; };
  auto z = abp_check(zero, solve(zero, d));
  CHECK(z.sup_w <= 0.0);
  CHECK(z.ratio == 0.0);

  // Random g <= 0 and c <= 0: comparison with the parabola bounds the ratio by 1/8.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int t = 0; t < 100; ++t) {
    const double a = U(rng), f = 1 + 5 * U(rng), ph = 6 * U(rng), cc = 3 * U(rng);
    EllipticProblem rp;
    rp.coeffs = CoefficientSet::constant(1, 0.0, -cc);
    rp.g = [a, f, ph](const Point& x) { return -(a + std::sin(f * x[0] + ph) * std::sin(f * x[0] + ph)); };
    const auto rr = abp_check(rp, solve(rp, d));
    CHECK(rr.ratio <= 0.125 * (1 + 1e-9));
  }

  EllipticProblem bad = pb;
  bad.boundary = [](const Point&) { return 1.0; };
  CHECK_THROWS_AS(abp_check(bad, solve(bad, d)), PreconditionError);
  auto wide = make_domain(GridDomain::interval(0, 2, 0.01));
  CHECK_THROWS_AS(abp_check(pb, solve(pb, wide)), PreconditionError);
}

TEST_CASE("growth lemma verifier") {
  auto d = make_domain(GridDomain::interval(-4, 4, 0.005));
  const double a = 2.0;
  auto flat = GridFunction::constant(d, 1.5 * a);
  auto g = verify_growth_lemma(flat, {0, 0}, 1.0, a, 0.1, 0.5, 1.0, 0.0);
  CHECK(g.hypothesis);
  CHECK(g.conclusion);
  CHECK(g.holds());

  auto low = GridFunction::constant(d, 0.5 * a);
  auto v = verify_growth_lemma(low, {0, 0}, 1.0, a, 0.1, 0.5, 1.0, 0.0);
  CHECK_FALSE(v.hypothesis);
  CHECK(v.holds());

  // Solutions of u'' = u: 50 random probes with kappa = 1/4, delta = 0.1.
  auto u = GridFunction::sample(d, [](const Point& x) { return std::cosh(x[0]) + 0.3 * std::sinh(x[0]); });
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0, 1);
  int hyp = 0;
  for (int t = 0; t < 50; ++t) {
    const double rho = 0.1 + 0.9 * U(rng);
    const double x1 = (4 - 2 * rho) * (2 * U(rng) - 1);
    const auto ball = select(*d, Region::ball({x1, 0}, rho));
    const double aa = inf_over(u, ball) * (1 + 0.5 * U(rng));
    const auto r = verify_growth_lemma(u, {x1, 0}, rho, aa, 0.1, 0.25, 1.0, 0.0);
    hyp += r.hypothesis;
    CHECK(r.holds());
  }
  CHECK(hyp > 0);
  CHECK_THROWS_AS(verify_growth_lemma(u, {3.5, 0}, 0.5, a, 0.1, 0.25, 1.0, 0.0), DomainError);
}

TEST_CASE("ink-spots verifier") {
  auto d = make_domain(GridDomain::interval(0, 1, 0.01));
  const Region B = Region::ball({0.5, 0}, 0.5);
  const NodeSubset all = select(*d, B);
  auto interval = [&](double lo, double hi) { return select(*d, Region::interval(lo, hi)); };

  auto e = verify_inkspots(*d, {}, interval(0.2, 0.6), B, 0.2, 0.5);
  CHECK(e.conclusion);
  CHECK(e.e_measure == 0.0);

  // F = B with |E| = (1 - delta)|B|: conclusion iff c <= 1.
  const NodeSubset E = interval(0.0, 0.8);
  const double delta = 1 - measure(*d, E) / measure(*d, all);
  CHECK(verify_inkspots(*d, E, all, B, delta, 0.9).conclusion);
  CHECK(verify_inkspots(*d, E, all, B, delta, 1.0).conclusion);
  CHECK_FALSE(verify_inkspots(*d, E, all, B, delta, 1.1).conclusion);
  // E = F of positive measure never satisfies |E| <= (1 - c delta)|F| for c delta > 0.
  CHECK_FALSE(verify_inkspots(*d, E, E, B, delta, 0.5).conclusion);

  // Nested intervals against directly computed lengths.
  const NodeSubset E2 = interval(0.3, 0.5), F2 = interval(0.2, 0.7);
  double e2 = 0.0, f2 = 0.0;
  for (std::size_t i = 0; i < d->size(); ++i) {
    const double x = d->point(i)[0], w = (i == 0 || i + 1 == d->size()) ? 0.005 : 0.01;
    if (x > 0.3 - 1e-9 && x < 0.5 + 1e-9) e2 += w;
    if (x > 0.2 - 1e-9 && x < 0.7 + 1e-9) f2 += w;
  }
  auto r = verify_inkspots(*d, E2, F2, B, 0.3, 0.5);
  CHECK(r.e_measure == doctest::Approx(e2).epsilon(1e-12));
  CHECK(r.f_measure == doctest::Approx(f2).epsilon(1e-12));
  CHECK(r.hypotheses);
  CHECK(r.conclusion == (e2 <= (1 - 0.15) * f2));

  CHECK_THROWS_AS(verify_inkspots(*d, interval(0.1, 0.3), interval(0.2, 0.7), B, 0.3, 0.5), DomainError);
}

TEST_CASE("level-set decay verifier") {
  auto d = make_domain(GridDomain::interval(-3, 3, 1e-3));
  const NodeSubset ball = all_nodes(*d);
  auto one = GridFunction::constant(d, 1.0);
  auto r0 = verify_levelset_decay(one, ball, 2.0, 1.0, 0.4, 5);
  for (double f : r0.fraction) CHECK(f == 0.0);
  CHECK(r0.first_violation == 0);

  auto u = GridFunction::sample(d, [](const Point& x) { return std::cosh(x[0]); });
  auto r = verify_levelset_decay(u, ball, 2.0, 1.0, 0.4, 4);
  CHECK(r.precondition);
  CHECK(r.first_violation == 0);
  for (int k = 1; k <= 4; ++k) {
    const double exact = std::max(0.0, (3 - std::acosh(std::pow(2.0, k))) / 3);
    CHECK(r.fraction[k - 1] == doctest::Approx(exact).epsilon(2e-3));
  }

  // A spike of height 10 on [0, 0.5): measure 0.5 / 6 until 2^k exceeds 10.
  auto spike = GridFunction::sample(d, [](const Point& x) { return x[0] >= 0 && x[0] < 0.5 ? 10.0 : 0.5; });
  auto s = verify_levelset_decay(spike, ball, 2.0, 1.0, 0.95, 5);
  for (int k = 1; k <= 3; ++k) CHECK(s.fraction[k - 1] == doctest::Approx(0.5 / 6).epsilon(1e-2));
  CHECK(s.fraction[3] == 0.0);
  CHECK(s.first_violation == 1);
}
