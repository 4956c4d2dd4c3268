#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcbf/io.hpp"

namespace pcbf {

/// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitEvent = 2;

/// Runs one scenario; writes trajectory.csv and summary.json into out_dir.
int cmd_run(const std::filesystem::path & config, const std::filesystem::path & out_dir,
  const Overrides & overrides, std::ostream & log);

/// Runs two scenarios; writes a_<name>.csv, b_<name>.csv and comparison.json.
int cmd_compare(const std::filesystem::path & config_a, const std::filesystem::path & config_b,
  const std::filesystem::path & out_dir, const Overrides & overrides, std::ostream & log);

struct SweepRequest
{
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::string param;  // c1, alpha, alpha_bar, liveness_gain, gain_margin, dt, horizon, seed
  std::vector<double> values;
  int workers{0};     // <= 0: PCBF_WORKERS or the OpenMP default
  Overrides overrides;
};

/// Sets one named parameter of a config; throws UsageError for unknown names.
void apply_sweep_param(ScenarioConfig & cfg, const std::string & param, double value);

/// Reruns a config for each parameter value, in parallel; one directory per run plus sweep.json.
int cmd_sweep(const SweepRequest & request, std::ostream & log);

/// Gradient, derivative, parallelism and gain checks; one PASS/FAIL line each.
int cmd_validate(const std::filesystem::path & config, const Overrides & overrides, std::ostream & log);

/// Worker count from PCBF_WORKERS, or 0 when unset/invalid.
int workers_from_env();

}  // namespace pcbf
