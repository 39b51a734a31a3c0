#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "harnlab/errors.hpp"
#include "harnlab/grid.hpp"

using namespace harnlab;

TEST_CASE("interval quadrature reproduces simple integrals") {
  auto d = make_domain(GridDomain::interval(0.0, 1.0, 1e-3));
  auto f = GridFunction::sample(d, [](const Point& x) { return x[0]; });
  CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));
  CHECK(lebesgue_norm(f, kInf) == doctest::Approx(1.0));
  CHECK(d->total_volume() == doctest::Approx(1.0).epsilon(1e-14));

  auto s = GridFunction::sample(d, [](const Point& x) { return std::sin(std::numbers::pi * x[0]); });
  CHECK(level_set_measure(s, 0.5, all_nodes(*d)) == doctest::Approx(2.0 / 3.0).epsilon(2e-3));
}

TEST_CASE("uniformly local norm of a constant is the unit-ball mass") {
  auto d = make_domain(GridDomain::interval(0.0, 10.0, 1e-4));
  auto one = GridFunction::constant(d, 1.0);
  CHECK(ul_norm(one, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
  CHECK(ul_norm(one, kInf) == 1.0);

  auto box = make_domain(GridDomain::box({-4, -4}, {4, 4}, 0.02));
  CHECK(ul_norm(GridFunction::constant(box, 1.0), 1.0) ==
        doctest::Approx(std::numbers::pi).epsilon(2e-2));

  auto disk = make_domain(GridDomain::disk(4.0, 0.02));
  CHECK(ul_norm(GridFunction::constant(disk, 1.0), 1.0) ==
        doctest::Approx(std::numbers::pi).epsilon(2e-2));
}

TEST_CASE("ul norm sees a localized bump and never exceeds the global norm") {
  auto d = make_domain(GridDomain::interval(-20.0, 20.0, 1e-3));
  auto bump = GridFunction::sample(d, [](const Point& x) { return std::abs(x[0] - 7) < 0.5 ? 3.0 : 0.0; });
  CHECK(ul_norm(bump, 1.0) == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(ul_norm(bump, 1.0) <= lebesgue_norm(bump, 1.0) + 1e-12);
  auto wide = GridFunction::sample(d, [](const Point& x) { return std::exp(-x[0] * x[0]); });
  for (double s : {1.0, 2.0, 3.5}) CHECK(ul_norm(wide, s) <= lebesgue_norm(wide, s) + 1e-12);
}

TEST_CASE("polar ul norm matches a brute-force window scan") {
  // Windows centered at every node and at the bounding-box corners.
  auto brute = [](const GridFunction& f, double s) {
    const GridDomain& d = f.domain();
    const auto [lo, hi] = d.bounding_box();
    std::vector<Point> centers{{lo[0], lo[1]}, {lo[0], hi[1]}, {hi[0], lo[1]}, {hi[0], hi[1]}};
    for (std::size_t i = 0; i < d.size(); ++i) centers.push_back(d.point(i));
    double best = 0.0;
    for (const auto& c : centers) {
      double t = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (distance(d.point(i), c) <= 1.0 + 1e-12) t += d.cell_volume(i) * std::pow(std::abs(f[i]), s);
      }
      best = std::max(best, t);
    }
    return std::pow(best, 1.0 / s);
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> amp(0.5, 2.0);
  for (auto d : {make_domain(GridDomain::disk(2.5, 0.1)), make_domain(GridDomain::annulus(0.5, 3.0, 0.1)),
                 make_domain(GridDomain::disk(0.8, 0.1))}) {
    const double a = amp(rng), b = amp(rng);
    auto f = GridFunction::sample(d, [a, b](const Point& x) { return a + std::sin(b * x[0]) * std::cos(x[1]); });
    for (double s : {1.0, 2.0}) CHECK(ul_norm(f, s) == doctest::Approx(brute(f, s)).epsilon(1e-12));
  }
}

TEST_CASE("exact cell volumes on polar grids") {
  auto disk = GridDomain::disk(3.0, 0.1);
  CHECK(disk.total_volume() == doctest::Approx(9 * std::numbers::pi).epsilon(1e-12));
  CHECK(disk.size() == 1 + disk.n_rings() * disk.n_theta());
  CHECK(2 * std::numbers::pi * 3.0 / static_cast<double>(disk.n_theta()) <= 0.1 + 1e-12);
  auto ann = GridDomain::annulus(2.0, 5.0, 0.1);
  CHECK(ann.total_volume() == doctest::Approx(21 * std::numbers::pi).epsilon(1e-12));
  CHECK(ann.boundary_nodes().size() == 2 * ann.n_theta());
  auto box = GridDomain::box({0, 0}, {2, 3}, 0.1);
  CHECK(box.total_volume() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("norm properties") {
  auto d = make_domain(GridDomain::interval(0.0, 1.0, 1e-3));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-2, 2);
  std::vector<double> v(d->size());
  for (auto& x : v) x = U(rng);
  GridFunction f(d, v);

  SUBCASE("reordering the subset changes nothing") {
    NodeSubset s = all_nodes(*d);
    const double ref = lebesgue_norm(f, 3.0, s);
    std::shuffle(s.begin(), s.end(), rng);
    CHECK(lebesgue_norm(f, 3.0, s) == doctest::Approx(ref).epsilon(1e-13));
  }
  SUBCASE("homogeneity") {
    std::vector<double> w(v);
    for (auto& x : w) x *= -2.5;
    CHECK(lebesgue_norm(GridFunction(d, w), 1.5) ==
          doctest::Approx(2.5 * lebesgue_norm(f, 1.5)).epsilon(1e-13));
  }
  SUBCASE("monotone in the exponent on a unit-measure domain") {
    double prev = 0.0;
    for (double s : {0.5, 1.0, 2.0, 4.0, 8.0, kInf}) {
      const double n = lebesgue_norm(f, s);
      CHECK(n >= prev * (1 - 1e-12));
      prev = n;
    }
  }
}

TEST_CASE("region selection and extrema") {
  auto d = make_domain(GridDomain::box({-2, -2}, {2, 2}, 0.05));
  auto ball = select(*d, Region::ball({0, 0}, 1.0));
  CHECK(measure(*d, ball) == doctest::Approx(std::numbers::pi).epsilon(2e-2));
  auto u = GridFunction::sample(d, [](const Point& x) { return x[0] + 2 * x[1]; });
  CHECK(sup_over(u, ball) == doctest::Approx(std::sqrt(5.0)).epsilon(2e-2));
  CHECK(inf_over(u, ball) == doctest::Approx(-std::sqrt(5.0)).epsilon(2e-2));
  CHECK_THROWS_AS(sup_over(u, NodeSubset{}), DomainError);
}

TEST_CASE("invalid grids and grid functions are rejected") {
  CHECK_THROWS_AS(GridDomain::interval(0, 1, 0.0), DomainError);
  CHECK_THROWS_AS(GridDomain::interval(1, 0, 0.1), DomainError);
  CHECK_THROWS_AS(GridDomain::annulus(3, 2, 0.1), DomainError);
  auto d = make_domain(GridDomain::interval(0, 1, 0.5));
  CHECK_THROWS_AS(GridFunction(d, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(GridFunction(d, {1.0, NAN, 2.0}), DomainError);
  CHECK_THROWS_AS(lebesgue_norm(GridFunction::constant(d, 1.0), 0.0), DomainError);
}
