#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "harnlab/config.hpp"
#include "harnlab/errors.hpp"
#include "harnlab/fit.hpp"
#include "harnlab/random.hpp"
#include "harnlab/report.hpp"

using namespace harnlab;

namespace {

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("harnlab_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
  const auto p = std::filesystem::path(dir) / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig config(const std::string& text, ExperimentKind kind) { return load_config(parse_ini(text), kind); }

double cell(const CsvTable& t, std::size_t row, const std::string& column) {
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (t.header[j] == column) return std::stod(t.rows.at(row).at(j));
  }
  FAIL("no column " << column);
  return 0.0;
}

}  // namespace

TEST_CASE("expressions") {
  const Point x{3.0, 4.0};
  CHECK(Expression::parse("1 + 2*3^2")(x) == 19.0);
  CHECK(Expression::parse("-2^2")(x) == -4.0);
  CHECK(Expression::parse("2^3^2")(x) == 512.0);
  CHECK(Expression::parse("(1 - 2) - 3")(x) == -4.0);
  CHECK(Expression::parse("8 / 4 / 2")(x) == 1.0);
  CHECK(Expression::parse("r")(x) == 5.0);
  CHECK(Expression::parse("min(x1, x2) + max(x1, x2)")(x) == 7.0);
  CHECK(Expression::parse("abs(x1 - x2) * 2")(x) == 2.0);
  CHECK(Expression::parse("ln(exp(2.5))")(x) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(Expression::parse("r^(-0.5)")(x) == doctest::Approx(1 / std::sqrt(5.0)).epsilon(1e-15));
  CHECK(Expression::parse("1e-3 * pi")(x) == doctest::Approx(std::acos(-1.0) * 1e-3).epsilon(1e-15));
  CHECK(Expression::parse(" 4 ").is_constant());
  CHECK_FALSE(Expression::parse("x1 * 0").is_constant());
  for (const char* bad : {"", "1 +", "x3", "foo(1)", "min(1)", "max(1, 2", "(1", "1 2", "2 ** 3", "ln 2"}) {
    CHECK_THROWS_AS(Expression::parse(bad), ConfigError);
  }
}

TEST_CASE("ini files and config validation") {
  const IniFile ini = parse_ini("# top\nseedless = 1\n[run]\n  R = 4, 8 \n; note\n[grid]\nh=0.1\n");
  CHECK(ini.sections.at("").at("seedless") == "1");
  CHECK(ini.sections.at("run").at("R") == "4, 8");
  CHECK(ini.sections.at("grid").at("h") == "0.1");
  CHECK_THROWS_AS(parse_ini("[run]\nR = 1\nR = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_ini("[run\n"), ConfigError);
  CHECK_THROWS_AS(parse_ini("[run]\nR\n"), ConfigError);

  const auto cfg = config("[coefficients]\ndimension = 2\nc = -1 - r\n[run]\nR = 3, 5\nseed = 42\n",
                          ExperimentKind::harnack);
  CHECK(cfg.dimension == 2);
  CHECK(cfg.R_grid == std::vector<double>{3, 5});
  CHECK(cfg.seed == 42);
  CHECK((*cfg.c)({3, 4}) == -6.0);
  CHECK(cfg.boundary->is_constant());

  CHECK_THROWS_AS(config("[run]\nR =\n", ExperimentKind::harnack), ConfigError);
  CHECK_THROWS_AS(config("[run]\nRR = 4\n", ExperimentKind::harnack), ConfigError);
  CHECK_THROWS_AS(config("[nowhere]\n", ExperimentKind::harnack), ConfigError);
  CHECK_THROWS_AS(config("[coefficients]\nc = x7\n", ExperimentKind::harnack), ConfigError);
  CHECK_THROWS_AS(config("[grid]\nh = -1\n", ExperimentKind::oracle), ConfigError);
  CHECK_THROWS_AS(config("[grid]\nh = 0.1x\n", ExperimentKind::oracle), ConfigError);
  CHECK_THROWS_AS(config("[run]\nseed = -3\n", ExperimentKind::oracle), ConfigError);
  CHECK_THROWS_AS(config("[run]\nkind = smp\n", ExperimentKind::oracle), ConfigError);
  CHECK_THROWS_AS(config("[run]\nr0 = 0.75\n", ExperimentKind::chain), ConfigError);
  CHECK_THROWS_AS(load_config(parse_ini("")), ConfigError);
  CHECK(load_config(parse_ini("[run]\nkind = smp\n")).kind == ExperimentKind::smp);
}

TEST_CASE("CSV numbers round-trip") {
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.next() % 200) - 100);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("oracle experiment reports D = b + sqrt(b^2 + c)") {
  const auto rep = run(config("[run]\nb = 3\nc = 4\n", ExperimentKind::oracle));
  REQUIRE(rep.tables.size() == 1);
  const CsvTable& t = rep.tables[0];
  REQUIRE(t.rows.size() == 1);
  CHECK(cell(t, 0, "b") == 3.0);
  CHECK(cell(t, 0, "c") == 4.0);
  CHECK(cell(t, 0, "D") == 3 + std::sqrt(13.0));
  CHECK(rep.violations == 0);
  CHECK(t.text().rfind("b,c,D,D_minus,h,refine,rel_sup_error\n3,4,", 0) == 0);
}

TEST_CASE("harnack experiment follows cosh for u'' = u") {
  const auto rep = run(config("[coefficients]\nc = -1\n[run]\nR = 4, 8, 16\n", ExperimentKind::harnack));
  const CsvTable& t = rep.tables.at(0);
  REQUIRE(t.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    // The outermost node inside G_R sits within one cell of R.
    const double R = cell(t, i, "R"), h = cell(t, i, "h");
    const double lr = std::log(cell(t, i, "ratio"));
    CHECK(lr >= std::log(std::cosh(R - h)) - 1e-3);
    CHECK(lr <= std::log(std::cosh(R)) + 1e-3);
    CHECK(cell(t, i, "A") == 2.0);
    CHECK(cell(t, i, "violation") == 0.0);
  }
  CHECK(cell(t, 2, "log_ratio_per_R") == doctest::Approx(1.0).epsilon(0.05));
  CHECK(rep.violations == 0);
}

TEST_CASE("other experiment kinds produce their tables") {
  SUBCASE("chain") {
    const auto rep = run(config("[run]\nn = 1\nR = 4\nr0 = 0.3333333333333333\n", ExperimentKind::chain));
    CHECK(cell(rep.tables.at(0), 0, "m") == 53.0);
    CHECK(cell(rep.tables.at(0), 0, "doubled_inside") == 1.0);
  }
  SUBCASE("smp") {
    const auto rep = run(config("[run]\na = 1.5\nk = 0.5\n", ExperimentKind::smp));
    CHECK(rep.tables.at(0).rows.size() == 11);
    CHECK(rep.tables.at(1).rows.at(0).at(2) == "holds");
    CHECK(rep.tables.at(1).rows.at(0).at(3) == "smp_holds");
  }
  SUBCASE("dead core") {
    const auto rep = run(config("[grid]\nh = 0.001\n[run]\nnonlinearity = power\n", ExperimentKind::dead_core));
    CHECK(cell(rep.tables.at(1), 0, "T") == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("abp") {
    const auto rep = run(config("[coefficients]\ng = -1\n[grid]\nh = 0.01\n", ExperimentKind::abp));
    CHECK(cell(rep.tables.at(0), 0, "sup_w") == doctest::Approx(0.125).epsilon(1e-10));
    CHECK(cell(rep.tables.at(0), 0, "ratio") == doctest::Approx(0.125).epsilon(1e-10));
  }
  SUBCASE("landis") {
    const auto rep = run(config("[run]\nb = 0, 1\nc = 1, 4\n", ExperimentKind::landis));
    CHECK(rep.tables.at(0).rows.size() == 4);
    CHECK(rep.violations == 0);
  }
}

TEST_CASE("fit_log_linear") {
  std::vector<std::pair<double, double>> exact, flat, noisy;
  SplitMix64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const double x = 0.25 * i;
    exact.emplace_back(x, std::exp(2 * x));
    flat.emplace_back(x, 5.0);
    noisy.emplace_back(x, std::exp(2 * x) * (1 + 0.01 * rng.uniform(-1, 1)));
  }
  const FitResult e = fit_log_linear(exact);
  CHECK(e.slope == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(e.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(e.count == 20);
  CHECK(e.residual <= 1e-12);
  const FitResult f = fit_log_linear(flat);
  CHECK(std::abs(f.slope) <= 1e-14);
  CHECK(f.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-14));
  CHECK(std::abs(fit_log_linear(noisy).slope - 2.0) <= 0.05);
  CHECK_THROWS_AS(fit_log_linear({{0, 1}, {1, 0}}), DomainError);
  CHECK_THROWS_AS(fit_log_linear({{0, 1}}), DomainError);
}

TEST_CASE("reruns give byte-identical CSV and the seed drives boundary noise") {
  const std::string dir = temp_dir("determinism");
  const std::string text =
      "[coefficients]\nc = -1 - 0.5*abs(x1)\nboundary = 1 + x1^2\nboundary_noise = 0.2\n[run]\nR = 4, 6\n";
  const std::string cfg = write_file(dir, "h.ini", text);
  std::ostringstream log, err;
  auto run_to = [&](const std::string& out, std::uint64_t seed) {
    CliOverrides cli;
    cli.config_path = cfg;
    cli.out = dir + "/" + out;
    cli.seed = seed;
    REQUIRE(run_command(ExperimentKind::harnack, cli, log, err) == 0);
    return read_file(dir + "/" + out + "/harnack.csv");
  };
  const std::string a = run_to("a", 9), b = run_to("b", 9), c = run_to("c", 10);
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("exit codes") {
  const std::string dir = temp_dir("exit");
  std::ostringstream log, err;
  CliOverrides cli;
  cli.out = dir + "/out";

  cli.config_path = write_file(dir, "ok.ini", "[run]\nb = 3\nc = 4\n");
  CHECK(run_command(ExperimentKind::oracle, cli, log, err) == 0);
  CHECK(std::filesystem::exists(dir + "/out/oracle.csv"));

  cli.config_path = write_file(dir, "empty.ini", "[run]\nR =\n");
  CHECK(run_command(ExperimentKind::harnack, cli, log, err) == 1);
  CHECK(err.str().find("R must not be empty") != std::string::npos);

  cli.config_path = dir + "/missing.ini";
  CHECK(run_command(ExperimentKind::harnack, cli, log, err) == 1);

  // A full-Harnack constant far below the cosh rate must be reported.
  cli.config_path = write_file(dir, "tight.ini", "[coefficients]\nc = -1\n[run]\nR = 8\nC_full = 0.1\n");
  CHECK(run_command(ExperimentKind::harnack, cli, log, err) == 2);

  cli.config_path = write_file(dir, "grid.ini", "[run]\nb = 1\nc = 1\n");
  cli.h = -0.5;
  CHECK(run_command(ExperimentKind::oracle, cli, log, err) == 1);
}
