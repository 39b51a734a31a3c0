#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "harnlab/config.hpp"
#include "harnlab/report.hpp"

int main(int argc, char** argv) {
  using namespace harnlab;
  CLI::App app{"Harnack, maximum principle and decay experiments"};
  app.require_subcommand(1);

  const std::vector<std::pair<ExperimentKind, std::string>> kinds{
      {ExperimentKind::harnack, "full Harnack ratio sup/inf on G_R"},
      {ExperimentKind::weak_harnack, "eps-integral against the infimum"},
      {ExperimentKind::local_max, "supremum against the eps-integral"},
      {ExperimentKind::abp, "sup w against the L^p norm of g"},
      {ExperimentKind::chain, "ball chain cover counts and lengths"},
      {ExperimentKind::smp, "M_delta decay trace and integral classification"},
      {ExperimentKind::dead_core, "dead-core profile of u'' = f(u)"},
      {ExperimentKind::landis, "decay rates against C0 A on a (b, c) grid"},
      {ExperimentKind::oracle, "exponential rates of u'' - 2b u' - c u = 0"}};

  std::map<CLI::App*, ExperimentKind> by_command;
  CliOverrides cli;
  std::string config, out;
  std::uint64_t seed = 0;
  double h = 0.0;
  int refine = 0;
  for (const auto& [kind, help] : kinds) {
    CLI::App* sub = app.add_subcommand(to_string(kind), help);
    sub->add_option("--config", config, "config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "seed of the randomized boundary data");
    sub->add_option("--grid-h", h, "grid spacing")->check(CLI::PositiveNumber);
    sub->add_option("--refine", refine, "halve h this many times and extrapolate")->check(CLI::Range(0, 6));
    by_command[sub] = kind;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--config")) cli.config_path = config;
  if (sub->count("--out")) cli.out = out;
  if (sub->count("--seed")) cli.seed = seed;
  if (sub->count("--grid-h")) cli.h = h;
  if (sub->count("--refine")) cli.refine = refine;
  return run_command(by_command.at(sub), cli, std::cout, std::cerr);
}
