#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "harnlab/expression.hpp"
#include "harnlab/harnack.hpp"
#include "harnlab/operators.hpp"

namespace harnlab {

enum class ExperimentKind { harnack, weak_harnack, local_max, abp, chain, smp, dead_core, landis, oracle };
std::string to_string(ExperimentKind k);
// Throws ConfigError on an unknown name.
ExperimentKind parse_kind(const std::string& name);

// Flat "key = value" lines grouped under "[section]" headers. Lines starting
// with '#' or ';' are comments; keys before the first header belong to "".
struct IniFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
};
// Throws ConfigError("line N: ...") on malformed lines and repeated keys.
IniFile parse_ini(const std::string& text);
IniFile read_ini(const std::string& path);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::oracle;

  // [operator]
  OperatorKind form = OperatorKind::nondivergence;
  double lambda = 1.0;
  double Lambda = 1.0;

  // [coefficients] Operator tr(A D^2 u) + b . Du + c u = g, u = boundary.
  int dimension = 1;
  std::optional<Expression> a11, a12, a22;
  std::optional<Expression> b1, b2;  // components of b along x1, x2
  std::optional<Expression> c, g;
  std::optional<Expression> boundary;
  double q = kInf;
  double p = kInf;
  bool singular_at_origin = false;   // sample coefficients half a cell off 0
  double boundary_noise = 0.0;       // boundary data times 1 + noise U(-1, 1)

  // [domain]
  HarnackGeometry geometry = HarnackGeometry::ball;
  double lo = 0.0, hi = 1.0;         // interval, or the square [lo, hi]^2

  // [grid]
  double h = 0.02;
  int refine = 0;

  // [run]
  std::vector<double> R_grid{4, 8, 16};
  std::vector<double> deltas;        // empty: decades 1e-2 .. 1e-12
  std::vector<double> k_values{0.5, 1, 5};
  std::vector<double> b_values{0, 1, 2, 3, 4};
  std::vector<double> c_values{0, 1, 2, 3, 4};
  std::vector<double> r0_values{1.0 / 3.0, 1.0 / 6.0};
  std::vector<double> n_values{1, 2};
  std::string nonlinearity = "log_power";  // or "power"
  double a = 1.5;                    // exponent of s |ln s|^a
  double coeff = 3.0;                // coeff s^exponent
  double exponent = 1.0 / 3.0;
  double u0 = 0.35355339059327373;   // 1 / (2 sqrt 2)
  double eps = 0.5;
  double L = 10.0;
  std::optional<double> C0;          // landis: calibrated on the grid when absent
  double C_weak = 1.0, C_full = 1.0, C_local_max = 1.0;
  double tolerance = 1e-3;
  std::uint64_t seed = 0;
  std::string out = ".";

  // Problem for the coefficient keys; boundary noise depends on the seed.
  EllipticProblem problem() const;
};

// Reads every key into the config, rejecting unknown sections and keys, bad
// numbers, bad expressions, empty grids and out-of-range values. A "kind"
// key under [run] must agree with the requested kind when one is given.
ExperimentConfig load_config(const IniFile& ini, std::optional<ExperimentKind> kind = std::nullopt);
// Repeats the checks that load_config applies after overrides.
void validate(const ExperimentConfig& cfg);

}  // namespace harnlab
