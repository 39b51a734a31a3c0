#include "harnlab/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "harnlab/errors.hpp"
#include "harnlab/harnack.hpp"
#include "harnlab/landis.hpp"
#include "harnlab/smp.hpp"
#include "harnlab/solver.hpp"

namespace harnlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw DomainError("number does not fit the CSV field");
  return std::string(buf, end);
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

std::string CsvTable::text() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_csv(const ExperimentReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : report.tables) {
    const auto path = std::filesystem::path(dir) / (t.name + ".csv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << t.text();
    if (!out) throw ConfigError("write failed for '" + path.string() + "'");
  }
}

double oracle_solve_error(double b, double c, double L, double h, int refine) {
  if (refine < 0) throw DomainError("refine must be nonnegative");
  const double D = ode_rates(b, c).growing;
  EllipticProblem pb;
  pb.coeffs = CoefficientSet::constant(1, -2.0 * b, -c);
  pb.boundary = [D](const Point& x) { return std::exp(D * x[0]); };

  const auto coarse = make_domain(GridDomain::interval(0.0, L, h));
  const std::size_t cells = coarse->size() - 1;
  // Romberg rows on the coarse nodes: row[m] removes the terms up to h^(2m).
  std::vector<std::vector<double>> prev;
  for (int k = 0; k <= refine; ++k) {
    const std::size_t stride = std::size_t{1} << k;
    const auto d = k == 0 ? coarse
                          : make_domain(GridDomain::interval(0.0, L, L / static_cast<double>(cells * stride)));
    if (d->size() != cells * stride + 1) throw DomainError("refined grid is not nested");
    const GridFunction u = solve(pb, d);
    std::vector<std::vector<double>> cur(1, std::vector<double>(cells + 1));
    for (std::size_t i = 0; i <= cells; ++i) cur[0][i] = u[i * stride];
    for (std::size_t m = 1; m <= prev.size(); ++m) {
      const double f = std::pow(4.0, static_cast<double>(m)) - 1.0;
      std::vector<double> next(cells + 1);
      for (std::size_t i = 0; i <= cells; ++i) next[i] = cur[m - 1][i] + (cur[m - 1][i] - prev[m - 1][i]) / f;
      cur.push_back(std::move(next));
    }
    prev = std::move(cur);
  }
  const std::vector<double>& best = prev.back();
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i <= cells; ++i) {
    const double exact = std::exp(D * coarse->point(i)[0]);
    err = std::max(err, std::abs(best[i] - exact));
    scale = std::max(scale, exact);
  }
  return err / scale;
}

namespace {

std::vector<double> log_deltas_of(const ExperimentConfig& cfg) {
  if (cfg.deltas.empty()) return default_log_deltas();
  std::vector<double> out;
  for (double d : cfg.deltas) out.push_back(std::log(d));
  return out;
}

Nonlinearity nonlinearity_of(const ExperimentConfig& cfg) {
  if (cfg.nonlinearity == "power") return Nonlinearity::power(cfg.coeff, cfg.exponent);
  return Nonlinearity::log_power(cfg.a);
}

// Measurement at spacing h, or extrapolated from h 2^-(K-1) and h 2^-K.
HarnackMeasurement harnack_at(const ExperimentConfig& cfg, const EllipticProblem& pb, double R, double& h_used) {
  auto at = [&](int factor) {
    const DomainPtr d = harnack_domain(cfg.dimension, R, cfg.h, factor);
    h_used = d->hx();
    return measure_harnack(pb, solve(pb, d), cfg.geometry, R, cfg.eps);
  };
  if (cfg.refine == 0) return at(1);
  const HarnackMeasurement m1 = at(1 << (cfg.refine - 1));
  const double h1 = h_used;
  const HarnackMeasurement m2 = at(1 << cfg.refine);
  return extrapolate(m1, m2, h1 / h_used);
}

ExperimentReport run_harnack(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  CsvTable t;
  t.name = to_string(cfg.kind);
  switch (cfg.kind) {
    case ExperimentKind::harnack:
      t.header = {"R", "h", "A", "sup", "inf", "source_norm", "ratio", "log_ratio_per_R", "bound_exp_C0_A_R",
                  "violation"};
      break;
    case ExperimentKind::weak_harnack:
      t.header = {"R", "h", "A", "eps", "eps_integral", "inf", "source_norm", "weak_constant", "bound_exp_C0_A_R",
                  "violation"};
      break;
    default:
      t.header = {"R", "h", "A", "eps", "sup", "eps_integral_outer", "source_norm", "local_max_constant",
                  "bound_C_eps_A_pow", "violation"};
      break;
  }
  const EllipticProblem pb = cfg.problem();
  pb.validate();
  const HarnackConstants k{cfg.C_weak, cfg.C_full, cfg.C_local_max};
  for (double R : cfg.R_grid) {
    double h_used = 0.0;
    const HarnackMeasurement m = harnack_at(cfg, pb, R, h_used);
    const HarnackVerdict v = check(m, k, cfg.tolerance);
    bool bad = false;
    switch (cfg.kind) {
      case ExperimentKind::harnack:
        bad = !v.full_ok;
        t.add_row({R, h_used, m.A, m.sup, m.inf, m.source_norm, m.ratio(), std::log(m.ratio()) / R, v.full_bound,
                   bad ? 1.0 : 0.0});
        break;
      case ExperimentKind::weak_harnack:
        bad = !v.weak_ok;
        t.add_row({R, h_used, m.A, m.eps, m.eps_integral, m.inf, m.source_norm, m.weak_constant(), v.weak_bound,
                   bad ? 1.0 : 0.0});
        break;
      default:
        bad = !v.local_max_ok;
        t.add_row({R, h_used, m.A, m.eps, m.sup, m.eps_integral_outer, m.source_norm, m.local_max_constant(),
                   v.local_max_bound, bad ? 1.0 : 0.0});
        break;
    }
    if (bad) ++rep.violations;
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

ExperimentReport run_abp(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  const EllipticProblem pb = cfg.problem();
  pb.validate();
  const DomainPtr d = cfg.dimension == 1 ? make_domain(GridDomain::interval(cfg.lo, cfg.hi, cfg.h))
                                         : make_domain(GridDomain::box({cfg.lo, cfg.lo}, {cfg.hi, cfg.hi}, cfg.h));
  const AbpReport r = abp_check(pb, solve(pb, d), cfg.p);
  const double C0 = cfg.C0.value_or(1.0);
  const double bound = C0 * r.g_norm;
  const bool bad = r.sup_w > bound * (1.0 + cfg.tolerance);
  CsvTable t;
  t.name = "abp";
  t.header = {"h", "sup_w", "g_norm", "ratio", "C0", "bound_C0_g_norm", "violation"};
  t.add_row({d->hx(), r.sup_w, r.g_norm, r.ratio, C0, bound, bad ? 1.0 : 0.0});
  if (bad) ++rep.violations;
  rep.tables.push_back(std::move(t));
  return rep;
}

ExperimentReport run_chain(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  CsvTable t;
  t.name = "chain";
  t.header = {"n", "R", "r0", "m", "d", "m_scaled", "d_scaled", "min_overlap_scaled", "doubled_inside"};
  for (double nd : cfg.n_values) {
    const int n = static_cast<int>(nd);
    for (double R : cfg.R_grid) {
      const HarnackRegions g = harnack_regions(cfg.geometry, R);
      for (double r0 : cfg.r0_values) {
        const ChainCover cover = build_chain_cover(g.inner, n, r0);
        const auto d = static_cast<double>(chain_diameter(cover));
        const bool inside = doubled_balls_inside(cover, g.outer);
        t.add_row({nd, R, r0, static_cast<double>(cover.size()), d, cover.cardinality_constant(), d * r0 / R,
                   min_overlap_constant(cover), inside ? 1.0 : 0.0});
        if (!inside) ++rep.violations;
      }
    }
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

ExperimentReport run_smp(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  const Nonlinearity f = nonlinearity_of(cfg);
  const std::vector<double> ld = log_deltas_of(cfg);
  const SmpClass cls = classify_vazquez_integral(f);
  CsvTable trace;
  trace.name = "smp_trace";
  trace.header = {"k", "delta", "log_delta", "M_delta", "log_trace"};
  CsvTable summary;
  summary.name = "smp_summary";
  summary.header = {"k", "tail_slope", "decay_criterion", "integral_class"};
  for (double k : cfg.k_values) {
    const DecayTrace tr = check_decay_criterion(f, k, ld);
    for (std::size_t i = 0; i < tr.log_delta.size(); ++i) {
      trace.add_row({k, std::exp(tr.log_delta[i]), tr.log_delta[i], m_delta_log(f, tr.log_delta[i], f.cap()),
                     tr.log_trace[i]});
    }
    summary.rows.push_back({format_number(k), format_number(tr.tail_slope), to_string(tr.verdict), to_string(cls)});
  }
  rep.tables.push_back(std::move(trace));
  rep.tables.push_back(std::move(summary));
  return rep;
}

ExperimentReport run_dead_core(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  const Nonlinearity f = nonlinearity_of(cfg);
  const DeadCore dc = dead_core_profile(f, cfg.u0, cfg.h);
  CsvTable prof;
  prof.name = "dead_core";
  prof.header = {"x", "u"};
  for (std::size_t i = 0; i < dc.u.size(); ++i) prof.add_row({dc.u.domain().point(i)[0], dc.u[i]});
  CsvTable summary;
  summary.name = "dead_core_summary";
  summary.header = {"u0", "T", "h", "residual"};
  summary.add_row({cfg.u0, dc.T, dc.u.domain().hx(), dc.residual});
  rep.tables.push_back(std::move(prof));
  rep.tables.push_back(std::move(summary));
  return rep;
}

ExperimentReport run_landis(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  std::vector<OdeDecay> ms;
  std::vector<double> oracle, A;
  for (double b : cfg.b_values) {
    for (double c : cfg.c_values) {
      ms.push_back(measure_ode_decay(b, c, cfg.L, cfg.h));
      oracle.push_back(ms.back().oracle);
      A.push_back(ms.back().A);
    }
  }
  const double C0 = cfg.C0 ? *cfg.C0 : calibrate_C0(oracle, A);
  CsvTable t;
  t.name = "landis";
  t.header = {"b", "c", "A", "oracle_rate", "coarse_rate", "measured_rate", "C1_C0_A", "violation"};
  for (const auto& m : ms) {
    const double C1 = C0 * m.A;
    const bool bad = m.rate > C1 * (1.0 + cfg.tolerance);
    t.add_row({m.b, m.c, m.A, m.oracle, m.coarse, m.rate, C1, bad ? 1.0 : 0.0});
    if (bad) ++rep.violations;
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

ExperimentReport run_oracle(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = cfg.kind;
  CsvTable t;
  t.name = "oracle";
  t.header = {"b", "c", "D", "D_minus", "h", "refine", "rel_sup_error"};
  for (double b : cfg.b_values) {
    for (double c : cfg.c_values) {
      const OdeRates r = ode_rates(b, c);
      t.add_row({b, c, r.growing, r.decaying, cfg.h, static_cast<double>(cfg.refine),
                 oracle_solve_error(b, c, cfg.L, cfg.h, cfg.refine)});
    }
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

}  // namespace

ExperimentReport run(const ExperimentConfig& cfg) {
  validate(cfg);
  switch (cfg.kind) {
    case ExperimentKind::harnack:
    case ExperimentKind::weak_harnack:
    case ExperimentKind::local_max: return run_harnack(cfg);
    case ExperimentKind::abp: return run_abp(cfg);
    case ExperimentKind::chain: return run_chain(cfg);
    case ExperimentKind::smp: return run_smp(cfg);
    case ExperimentKind::dead_core: return run_dead_core(cfg);
    case ExperimentKind::landis: return run_landis(cfg);
    case ExperimentKind::oracle: return run_oracle(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

int run_command(ExperimentKind kind, const CliOverrides& cli, std::ostream& log, std::ostream& err) {
  try {
    const IniFile ini = cli.config_path ? read_ini(*cli.config_path) : IniFile{};
    ExperimentConfig cfg = load_config(ini, kind);
    if (cli.out) cfg.out = *cli.out;
    if (cli.seed) cfg.seed = *cli.seed;
    if (cli.h) cfg.h = *cli.h;
    if (cli.refine) cfg.refine = *cli.refine;
    validate(cfg);
    const ExperimentReport rep = run(cfg);
    write_csv(rep, cfg.out);
    for (const auto& t : rep.tables) log << cfg.out << "/" << t.name << ".csv: " << t.rows.size() << " rows\n";
    if (rep.violations > 0) {
      log << rep.violations << " inequality check(s) failed\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace harnlab
