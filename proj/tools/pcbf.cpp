// Command-line front end: run, compare, sweep and validate scenarios.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcbf/commands.hpp"

namespace {

void add_overrides(CLI::App * cmd, pcbf::Overrides & o)
{
  cmd->add_option("--seed", o.seed, "Override sim.seed");
  cmd->add_option("--dt", o.dt, "Override sim.dt")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", o.horizon, "Override sim.horizon")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Constant-sum barrier pair safety filters: scenario runner"};
  app.require_subcommand(1);

  pcbf::Overrides overrides;
  std::string config;
  std::string config_b;
  std::string out = "out";

  auto * run = app.add_subcommand("run", "Simulate one scenario and write trajectory.csv + summary.json");
  run->add_option("--config,-c", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  run->add_option("--out,-o", out, "Output directory");
  add_overrides(run, overrides);

  auto * compare = app.add_subcommand("compare", "Simulate two scenarios and write aligned outputs");
  compare->add_option("--config,-c", config, "First scenario YAML")->required()->check(CLI::ExistingFile);
  compare->add_option("--against,-b", config_b, "Second scenario YAML")->required()->check(CLI::ExistingFile);
  compare->add_option("--out,-o", out, "Output directory");
  add_overrides(compare, overrides);

  pcbf::SweepRequest sweep_req;
  auto * sweep = app.add_subcommand("sweep", "Rerun a scenario over values of one parameter");
  sweep->add_option("--config,-c", config, "Base scenario YAML")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out,-o", out, "Output directory");
  sweep->add_option("--param,-p", sweep_req.param, "c1, alpha, alpha_bar, liveness_gain, gain_margin, dt, horizon, seed")
    ->required();
  sweep->add_option("--values,-v", sweep_req.values, "Comma-separated values")->required()->delimiter(',');
  sweep->add_option("--workers,-j", sweep_req.workers, "Parallel runs (default: $PCBF_WORKERS or all cores)");
  add_overrides(sweep, overrides);

  auto * validate = app.add_subcommand("validate", "Derivative, gradient and gain checks for a scenario");
  validate->add_option("--config,-c", config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  add_overrides(validate, overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcbf::kExitUsage;
  }

  try {
    if (*run) { return pcbf::cmd_run(config, out, overrides, std::cout); }
    if (*compare) { return pcbf::cmd_compare(config, config_b, out, overrides, std::cout); }
    if (*sweep) {
      sweep_req.config = config;
      sweep_req.out_dir = out;
      sweep_req.overrides = overrides;
      return pcbf::cmd_sweep(sweep_req, std::cout);
    }
    if (*validate) { return pcbf::cmd_validate(config, overrides, std::cout); }
  } catch (const std::exception & e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return pcbf::kExitUsage;
}
