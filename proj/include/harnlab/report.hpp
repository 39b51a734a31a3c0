#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "harnlab/config.hpp"

namespace harnlab {

// Shortest round-trip decimal form (std::to_chars), so equal values always
// print equal text.
std::string format_number(double v);

struct CsvTable {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  // Comma-separated, '\n' line ends, header first.
  std::string text() const;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::oracle;
  std::vector<CsvTable> tables;
  std::size_t violations = 0;  // inequality checks that failed beyond tolerance
};

ExperimentReport run(const ExperimentConfig& cfg);
// Writes <dir>/<table name>.csv for every table, creating dir if needed.
void write_csv(const ExperimentReport& report, const std::string& dir);

// Relative sup error max|u - e^(Dx)| / max e^(Dx) of the discrete solve of
// u'' - 2b u' - c u = 0 on [0, L] with exact boundary values, after halving
// h `refine` times and Romberg extrapolation on the coarse nodes.
double oracle_solve_error(double b, double c, double L, double h, int refine);

// Command-line values that replace the config file's.
struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
  std::optional<int> refine;
};
// Loads, runs and writes one experiment. Returns 0 on success, 2 when an
// inequality check failed and 1 on any error (reported on err).
int run_command(ExperimentKind kind, const CliOverrides& cli, std::ostream& log, std::ostream& err);

}  // namespace harnlab
