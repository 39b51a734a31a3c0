#include "harnlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "harnlab/errors.hpp"
#include "harnlab/random.hpp"

namespace harnlab {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames{
    {ExperimentKind::harnack, "harnack"},     {ExperimentKind::weak_harnack, "weak_harnack"},
    {ExperimentKind::local_max, "local_max"}, {ExperimentKind::abp, "abp"},
    {ExperimentKind::chain, "chain"},         {ExperimentKind::smp, "smp"},
    {ExperimentKind::dead_core, "dead_core"}, {ExperimentKind::landis, "landis"},
    {ExperimentKind::oracle, "oracle"}};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  const auto [end, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_number(key, item));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key + ": '" + text + "' is not a boolean");
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError("seed: '" + text + "' is not a 64-bit unsigned integer");
  }
  return v;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void require_positive_list(const std::vector<double>& v, const std::string& key) {
  require(!v.empty(), key + " must not be empty");
  for (double x : v) require(std::isfinite(x) && x > 0.0, key + " entries must be positive");
}

void require_nonnegative_list(const std::vector<double>& v, const std::string& key) {
  require(!v.empty(), key + " must not be empty");
  for (double x : v) require(std::isfinite(x) && x >= 0.0, key + " entries must be nonnegative");
}

bool harnack_family(ExperimentKind k) {
  return k == ExperimentKind::harnack || k == ExperimentKind::weak_harnack || k == ExperimentKind::local_max;
}

// Deterministic U(-1, 1) attached to a point, independent of node order.
double point_noise(std::uint64_t seed, const Point& x) {
  SplitMix64 rng(seed);
  rng.next();
  const auto k1 = static_cast<std::uint64_t>(std::llround(x[0] * 1e8));
  const auto k2 = static_cast<std::uint64_t>(std::llround(x[1] * 1e8));
  SplitMix64 mixed(rng.next() ^ k1 ^ SplitMix64(k2).next());
  return mixed.uniform(-1.0, 1.0);
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& [kind, n] : kKindNames) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown experiment kind '" + name + "'");
}

IniFile parse_ini(const std::string& text) {
  IniFile ini;
  std::string section;
  ini.sections[section];
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + "empty section name");
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + "empty key");
    auto& sec = ini.sections[section];
    if (sec.count(key)) throw ConfigError(where + "repeated key '" + key + "'");
    sec[key] = trim(line.substr(eq + 1));
  }
  return ini;
}

IniFile read_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ini(ss.str());
}

EllipticProblem ExperimentConfig::problem() const {
  EllipticProblem pb;
  pb.form.kind = form;
  pb.coeffs = CoefficientSet::laplacian(dimension);
  pb.coeffs.lambda = lambda;
  pb.coeffs.Lambda = Lambda;
  pb.coeffs.q = q;
  pb.coeffs.p = p;
  if (a11 || a12 || a22) {
    const Expression e11 = a11.value_or(Expression::constant(1.0));
    const Expression e12 = a12.value_or(Expression::constant(0.0));
    const Expression e22 = a22.value_or(Expression::constant(1.0));
    const int n = dimension;
    pb.coeffs.diffusion = [e11, e12, e22, n](const Point& x) {
      return n == 1 ? Sym2{e11(x), 0.0, 0.0} : Sym2{e11(x), e12(x), e22(x)};
    };
  }
  if (b1 || b2) {
    const Expression e1 = b1.value_or(Expression::constant(0.0));
    const Expression e2 = b2.value_or(Expression::constant(0.0));
    const int n = dimension;
    pb.coeffs.b2 = [e1, e2, n](const Point& x) { return Point{e1(x), n == 1 ? 0.0 : e2(x)}; };
  }
  if (c) pb.coeffs.c = [e = *c](const Point& x) { return e(x); };
  if (g) pb.g = [e = *g](const Point& x) { return e(x); };
  if (singular_at_origin) pb.coeffs.singular_points = {Point{0.0, 0.0}};
  if (boundary) {
    const Expression e = *boundary;
    if (boundary_noise > 0.0) {
      const double amp = boundary_noise;
      const std::uint64_t s = seed;
      pb.boundary = [e, amp, s](const Point& x) { return e(x) * (1.0 + amp * point_noise(s, x)); };
    } else {
      pb.boundary = [e](const Point& x) { return e(x); };
    }
  }
  return pb;
}

ExperimentConfig load_config(const IniFile& ini, std::optional<ExperimentKind> kind) {
  static const std::map<std::string, std::set<std::string>> kKeys{
      {"", {}},
      {"operator", {"form", "lambda", "Lambda"}},
      {"coefficients",
       {"dimension", "a11", "a12", "a22", "b1", "b2", "c", "g", "boundary", "q", "p", "singular_at_origin",
        "boundary_noise"}},
      {"domain", {"geometry", "lo", "hi"}},
      {"grid", {"h", "refine"}},
      {"run",
       {"kind", "R", "delta", "k", "b", "c", "r0", "n", "nonlinearity", "a", "coeff", "exponent", "u0", "eps", "L",
        "C0", "C_weak", "C_full", "C_local_max", "tolerance", "seed", "out"}}};

  for (const auto& [name, keys] : ini.sections) {
    const auto it = kKeys.find(name);
    if (it == kKeys.end()) throw ConfigError("unknown section [" + name + "]");
    for (const auto& [key, value] : keys) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
    }
  }
  auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
    const auto s = ini.sections.find(sec);
    if (s == ini.sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  auto number = [&](const std::string& sec, const std::string& key, double& target) {
    if (const auto* v = get(sec, key)) target = parse_number(key, *v);
  };
  auto list = [&](const std::string& sec, const std::string& key, std::vector<double>& target) {
    if (const auto* v = get(sec, key)) target = parse_list(key, *v);
  };
  auto expression = [&](const std::string& key, std::optional<Expression>& target) {
    if (const auto* v = get("coefficients", key)) target = Expression::parse(*v);
  };

  ExperimentConfig cfg;
  if (const auto* v = get("run", "kind")) {
    const ExperimentKind k = parse_kind(trim(*v));
    if (kind && *kind != k) {
      throw ConfigError("config kind '" + to_string(k) + "' does not match '" + to_string(*kind) + "'");
    }
    cfg.kind = k;
  } else if (kind) {
    cfg.kind = *kind;
  } else {
    throw ConfigError("no experiment kind given");
  }

  if (const auto* v = get("operator", "form")) {
    const std::string f = trim(*v);
    if (f == "nondivergence") {
      cfg.form = OperatorKind::nondivergence;
    } else if (f == "divergence") {
      cfg.form = OperatorKind::divergence;
    } else if (f == "pucci_plus") {
      cfg.form = OperatorKind::pucci_plus;
    } else if (f == "pucci_minus") {
      cfg.form = OperatorKind::pucci_minus;
    } else {
      throw ConfigError("form: unknown operator form '" + f + "'");
    }
  }
  number("operator", "lambda", cfg.lambda);
  number("operator", "Lambda", cfg.Lambda);

  double dim = 1;
  number("coefficients", "dimension", dim);
  require(dim == 1 || dim == 2, "dimension must be 1 or 2");
  cfg.dimension = static_cast<int>(dim);
  expression("a11", cfg.a11);
  expression("a12", cfg.a12);
  expression("a22", cfg.a22);
  expression("b1", cfg.b1);
  expression("b2", cfg.b2);
  expression("c", cfg.c);
  expression("g", cfg.g);
  expression("boundary", cfg.boundary);
  number("coefficients", "q", cfg.q);
  number("coefficients", "p", cfg.p);
  if (const auto* v = get("coefficients", "singular_at_origin")) {
    cfg.singular_at_origin = parse_bool("singular_at_origin", *v);
  }
  number("coefficients", "boundary_noise", cfg.boundary_noise);
  if (!cfg.boundary && harnack_family(cfg.kind)) cfg.boundary = Expression::constant(1.0);

  if (const auto* v = get("domain", "geometry")) {
    const std::string gname = trim(*v);
    if (gname == "ball") {
      cfg.geometry = HarnackGeometry::ball;
    } else if (gname == "annulus") {
      cfg.geometry = HarnackGeometry::annulus;
    } else {
      throw ConfigError("geometry: expected ball or annulus, got '" + gname + "'");
    }
  }
  number("domain", "lo", cfg.lo);
  number("domain", "hi", cfg.hi);

  number("grid", "h", cfg.h);
  double refine = 0;
  number("grid", "refine", refine);
  require(refine >= 0 && refine <= 6 && refine == std::floor(refine), "refine must be an integer in [0, 6]");
  cfg.refine = static_cast<int>(refine);

  list("run", "R", cfg.R_grid);
  list("run", "delta", cfg.deltas);
  list("run", "k", cfg.k_values);
  list("run", "b", cfg.b_values);
  list("run", "c", cfg.c_values);
  list("run", "r0", cfg.r0_values);
  list("run", "n", cfg.n_values);
  if (const auto* v = get("run", "nonlinearity")) cfg.nonlinearity = trim(*v);
  number("run", "a", cfg.a);
  number("run", "coeff", cfg.coeff);
  number("run", "exponent", cfg.exponent);
  number("run", "u0", cfg.u0);
  number("run", "eps", cfg.eps);
  number("run", "L", cfg.L);
  if (const auto* v = get("run", "C0")) cfg.C0 = parse_number("C0", *v);
  number("run", "C_weak", cfg.C_weak);
  number("run", "C_full", cfg.C_full);
  number("run", "C_local_max", cfg.C_local_max);
  number("run", "tolerance", cfg.tolerance);
  if (const auto* v = get("run", "seed")) cfg.seed = parse_seed(*v);
  if (const auto* v = get("run", "out")) cfg.out = trim(*v);

  validate(cfg);
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  require(cfg.lambda > 0.0 && cfg.Lambda >= cfg.lambda, "need 0 < lambda <= Lambda");
  require(std::isfinite(cfg.h) && cfg.h > 0.0, "h must be positive");
  require(cfg.refine >= 0 && cfg.refine <= 6, "refine must be in [0, 6]");
  require(cfg.boundary_noise >= 0.0 && cfg.boundary_noise < 1.0, "boundary_noise must be in [0, 1)");
  require(cfg.lo < cfg.hi, "need lo < hi");
  require(cfg.eps > 0.0, "eps must be positive");
  require(cfg.tolerance >= 0.0, "tolerance must be nonnegative");
  require(!cfg.out.empty(), "out must not be empty");
  switch (cfg.kind) {
    case ExperimentKind::harnack:
    case ExperimentKind::weak_harnack:
    case ExperimentKind::local_max:
      require_positive_list(cfg.R_grid, "R");
      for (double R : cfg.R_grid) {
        require(cfg.geometry == HarnackGeometry::ball || R > 2.0, "annulus geometry needs R > 2");
      }
      break;
    case ExperimentKind::chain:
      require_positive_list(cfg.R_grid, "R");
      for (double R : cfg.R_grid) require(R > 2.0, "chain covers need R > 2");
      require_positive_list(cfg.r0_values, "r0");
      for (double r0 : cfg.r0_values) require(r0 <= 0.5, "r0 must be in (0, 1/2]");
      require(!cfg.n_values.empty(), "n must not be empty");
      for (double n : cfg.n_values) require(n == 1 || n == 2, "n entries must be 1 or 2");
      break;
    case ExperimentKind::smp:
      require_positive_list(cfg.k_values, "k");
      for (double d : cfg.deltas) require(d > 0.0 && d < 1.0, "delta entries must be in (0, 1)");
      [[fallthrough]];
    case ExperimentKind::dead_core:
      require(cfg.nonlinearity == "log_power" || cfg.nonlinearity == "power",
              "nonlinearity must be log_power or power");
      require(cfg.coeff > 0.0 && cfg.exponent > 0.0, "power nonlinearity needs coeff, exponent > 0");
      require(cfg.u0 > 0.0, "u0 must be positive");
      break;
    case ExperimentKind::landis:
      require_nonnegative_list(cfg.b_values, "b");
      require_nonnegative_list(cfg.c_values, "c");
      require(cfg.L > 0.0, "L must be positive");
      require(!cfg.C0 || *cfg.C0 > 0.0, "C0 must be positive");
      break;
    case ExperimentKind::oracle:
      require_nonnegative_list(cfg.b_values, "b");
      require_nonnegative_list(cfg.c_values, "c");
      require(cfg.L > 0.0, "L must be positive");
      break;
    case ExperimentKind::abp:
      break;
  }
}

}  // namespace harnlab
