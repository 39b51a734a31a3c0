#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "doctest.h"
#include "harnlab/errors.hpp"
#include "harnlab/smp.hpp"
#include "harnlab/solver.hpp"

using namespace harnlab;

TEST_CASE("primitive of s|ln s|^a matches the incomplete gamma function") {
  for (double a : {0.0, 1.0, 1.5, 2.0, 3.0}) {
    const auto f = Nonlinearity::log_power(a);
    CHECK(f(0.0) == 0.0);
    CHECK(f(-1.0) == 0.0);
    CHECK(f.primitive(0.0) == 0.0);
    double prev = 0.0;
    for (double s : {1e-12, 1e-6, 1e-3, 0.1, 0.5}) {
      // F(s) = Gamma(a + 1, 2 ln(1/s)) / 2^(a + 1)
      const double exact = boost::math::tgamma(a + 1, 2 * std::log(1 / s)) / std::pow(2.0, a + 1);
      CHECK(f.primitive(s) == doctest::Approx(exact).epsilon(1e-10));
      CHECK(f.primitive(s) >= prev);
      prev = f.primitive(s);
    }
  }
  CHECK_THROWS_AS(Nonlinearity([](double s) { return s + 1; }), DomainError);
}

TEST_CASE("m_delta") {
  const auto lin = Nonlinearity::power(1.0, 1.0);
  CHECK(m_delta(lin, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
  const Nonlinearity zero([](double) { return 0.0; });
  CHECK(m_delta(zero, 0.1, 1.0) == 0.0);

  // Brute force over 10^6 logarithmically spaced points.
  const auto f = Nonlinearity::log_power(2.0);
  const double L = std::exp(-2.0), delta = 1e-6;
  double brute = f(L) / (L + delta);
  for (int i = 0; i < 1000000; ++i) {
    const double s = L * std::pow(10.0, -12.0 * i / 1000000);
    brute = std::max(brute, f(s) / (s + delta));
  }
  const double m = m_delta(f, delta, L);
  CHECK(m == doctest::Approx(brute).epsilon(1e-2));
  CHECK(m >= brute * (1 - 1e-9));
  CHECK(m >= f(L) / (L + delta));
  CHECK(m_delta_log(f, std::log(delta), L) == doctest::Approx(m).epsilon(1e-9));

  SUBCASE("nonincreasing in delta and homogeneous in f") {
    const auto g = Nonlinearity::power(3.0, 1.0 / 3.0);
    double prev = kInf;
    for (double d : {1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
      const double v = m_delta(g, d, 1.0);
      CHECK(v <= prev * (1 + 1e-12));
      prev = v;
      CHECK(m_delta(g.scaled(2.5), d, 1.0) == doctest::Approx(2.5 * v).epsilon(1e-12));
    }
    CHECK(m_delta_log(f.scaled(3.0), -50.0, 0.5) == doctest::Approx(3 * m_delta_log(f, -50.0, 0.5)).epsilon(1e-12));
  }
  SUBCASE("growth like |ln delta|^a") {
    const auto h = Nonlinearity::log_power(1.5);
    for (double t : {50.0, 500.0, 5000.0}) {
      const double v = m_delta_log(h, -t, 0.5);
      CHECK(v <= std::pow(t, 1.5));
      CHECK(v >= 0.8 * std::pow(t, 1.5));
    }
  }
}

TEST_CASE("decay criterion traces") {
  const auto grid = default_log_deltas();
  for (double k : {0.1, 1.0, 10.0}) {
    CHECK(check_decay_criterion(Nonlinearity::power(1.0, 1.0), k, grid).verdict == DecayVerdict::holds);
  }
  CHECK(check_decay_criterion(Nonlinearity::log_power(1.5), 1.0, grid).verdict == DecayVerdict::holds);
  CHECK(check_decay_criterion(Nonlinearity::log_power(1.5), 0.5, grid).verdict == DecayVerdict::holds);
  CHECK(check_decay_criterion(Nonlinearity::log_power(3.0), 5.0, grid).verdict == DecayVerdict::fails);

  // The tail regime needs deltas far below 1e-12 for some pairs.
  const auto deep = extended_log_deltas(std::log(100.0), 1e5, 40);
  for (double k : {0.1, 1.0, 10.0}) {
    CHECK(check_decay_criterion(Nonlinearity::log_power(1.5), k, deep).verdict == DecayVerdict::holds);
    CHECK(check_decay_criterion(Nonlinearity::log_power(1.0), k, deep).verdict == DecayVerdict::holds);
    CHECK(check_decay_criterion(Nonlinearity::log_power(3.0), k, deep).verdict == DecayVerdict::fails);
    CHECK(check_decay_criterion(Nonlinearity::log_power(2.5), k, deep).verdict == DecayVerdict::fails);
  }
  // a = 2 with f <= s (ln s)^2: the threshold sits at k = 1.
  CHECK(check_decay_criterion(Nonlinearity::log_power(2.0), 2.0, deep).verdict == DecayVerdict::holds);
  CHECK(check_decay_criterion(Nonlinearity::log_power(2.0), 0.5, deep).verdict == DecayVerdict::fails);

  CHECK_THROWS_AS(check_decay_criterion(Nonlinearity::log_power(1.0), 0.0, grid), DomainError);
  CHECK_THROWS_AS(check_decay_criterion(Nonlinearity::log_power(1.0), 1.0, {-1, -2, -2, -3}), DomainError);
}

TEST_CASE("integral classification") {
  CHECK(classify_vazquez_integral(Nonlinearity::power(1.0, 1.0)) == SmpClass::smp_holds);
  CHECK(classify_vazquez_integral(Nonlinearity::power(1.0, 0.5)) == SmpClass::smp_may_fail);
  for (double a : {0.0, 1.0, 2.0}) {
    CHECK(classify_vazquez_integral(Nonlinearity::log_power(a)) == SmpClass::smp_holds);
  }
  for (double a : {2.5, 3.0}) {
    CHECK(classify_vazquez_integral(Nonlinearity::log_power(a)) == SmpClass::smp_may_fail);
  }
  // F vanishing near 0 counts as divergent.
  const Nonlinearity flat([](double s) { return s > 0.2 ? s - 0.2 : 0.0; });
  CHECK(classify_vazquez_integral(flat) == SmpClass::smp_holds);
}

TEST_CASE("dead-core profile") {
  const auto f = Nonlinearity::power(3.0, 1.0 / 3.0);
  const auto dc = dead_core_profile(f, 1 / (2 * std::sqrt(2.0)), 2e-4);
  CHECK(dc.T == doctest::Approx(1.0).epsilon(1e-9));
  double err = 0.0;
  for (std::size_t i = 0; i < dc.u.size(); ++i) {
    const double x = dc.u.domain().point(i)[0];
    const double exact = x > 0 ? std::pow(x / std::sqrt(2.0), 3) : 0.0;
    err = std::max(err, std::abs(dc.u[i] - exact));
  }
  CHECK(err <= 1e-4);
  CHECK(err <= 1e-10);
  CHECK(dc.residual <= 1e-4);
  CHECK(dc.u[0] == 0.0);

  // Residual drops with the spacing (the kink at 0 gives O(h)).
  const auto coarse = dead_core_profile(f, 1 / (2 * std::sqrt(2.0)), 4e-4);
  CHECK(dc.residual < coarse.residual);

  CHECK_THROWS_WITH_AS(dead_core_profile(Nonlinearity::power(1.0, 1.0), 0.5, 1e-3),
                       "no dead core: integral diverges", DomainError);

  const auto g = Nonlinearity::log_power(3.0);
  const auto d3 = dead_core_profile(g, 0.1, 1e-3);
  CHECK(std::isfinite(d3.T));
  CHECK(d3.T > 0.0);
  CHECK(d3.residual <= 1e-4);
}

TEST_CASE("rescaling experiment") {
  SUBCASE("zero field") {
    EllipticProblem pb;
    pb.coeffs = CoefficientSet::laplacian(1);
    auto d = make_domain(GridDomain::interval(-1, 1, 0.01));
    const auto r = vazquez_experiment(pb, GridFunction::constant(d, 0.0), Nonlinearity::log_power(1.5));
    CHECK(r.trace_to_zero);
    CHECK(r.sup_near_x0 == 0.0);
    CHECK(r.residual == 0.0);
  }
  SUBCASE("dead core of 3 s^(1/3) is not forced to vanish") {
    const auto f = Nonlinearity::power(3.0, 1.0 / 3.0);
    const auto dc = dead_core_profile(f, 1 / (2 * std::sqrt(2.0)), 1e-3);
    EllipticProblem pb;
    pb.coeffs = CoefficientSet::laplacian(1);
    pb.boundary = [](const Point& x) { return x[0] > 0 ? 1 / (2 * std::sqrt(2.0)) : 0.0; };
    const auto r = vazquez_experiment(pb, dc.u, f);
    CHECK_FALSE(r.trace_to_zero);
    CHECK(r.log_bound.back() > r.log_bound.front());
    CHECK(r.sup_near_x0 > 0.0);
    CHECK(std::abs(dc.u.domain().point(r.x0)[0]) < 2e-3);
  }
  SUBCASE("s|ln s|^1.5 field vanishes near its zero") {
    const auto f = Nonlinearity::log_power(1.5);
    EllipticProblem pb;
    pb.coeffs = CoefficientSet::laplacian(1);
    pb.boundary = [](const Point&) { return 0.5; };
    auto d = make_domain(GridDomain::interval(-10, 10, 0.01));
    const auto sol = solve_semilinear(pb, d, [&f](double s) { return f(s); });
    const auto r = vazquez_experiment(pb, sol.u, f);
    CHECK(r.residual < 1e-8);
    CHECK(r.trace_to_zero);
    CHECK(r.sup_near_x0 <= 1e-6);
  }
  SUBCASE("preconditions") {
    EllipticProblem pb;
    pb.coeffs = CoefficientSet::laplacian(1);
    auto d = make_domain(GridDomain::interval(-1, 1, 0.01));
    CHECK_THROWS_AS(vazquez_experiment(pb, GridFunction::constant(d, 1.0), Nonlinearity::log_power(1.0)),
                    PreconditionError);
    CHECK_THROWS_AS(vazquez_experiment(pb, GridFunction::sample(d, [](const Point& x) { return x[0]; }),
                                       Nonlinearity::log_power(1.0)),
                    PreconditionError);
  }
}
