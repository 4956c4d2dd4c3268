#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pcbf/sim.hpp"

namespace pcbf {

/// Sample grid used by the `validate` command.
struct ValidateSettings
{
  int grid_along{41};
  int grid_across{21};  // odd so the midline is sampled
  int random_samples{100};
};

struct LoadedConfig
{
  ScenarioConfig scenario;
  ValidateSettings validate;
};

/// Malformed config; what() carries "<file>:<line>: <message>" when a line is known.
class ConfigParseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Parses the YAML scenario format documented in configs/README.md. Unknown keys are errors.
LoadedConfig parse_config(const std::string & text, const std::string & source_name = "<config>");
LoadedConfig load_config(const std::filesystem::path & path);

/// Command-line overrides applied on top of a loaded config.
struct Overrides
{
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> horizon;

  void apply(ScenarioConfig & cfg) const;
};

/// Trajectory CSV: t, states, u0_*, u_*, h_1..h_n, hbar_1..hbar_n, slab_lower, slab_upper, active_branch.
void write_trajectory_csv(std::ostream & os, const Trajectory & traj);
void write_trajectory_csv(const std::filesystem::path & path, const Trajectory & traj);
Trajectory read_trajectory_csv(std::istream & is);
Trajectory read_trajectory_csv(const std::filesystem::path & path);

Branch branch_from_string(std::string_view s);

struct RunSummary
{
  std::string scenario;
  std::string system;
  std::string filter;
  EventKind event{EventKind::Completed};
  double t_event{0.0};
  std::string detail;
  double min_h1{0.0};
  double min_hbar1{0.0};
  double min_all_levels{0.0};
  double max_abs_u_filtered{0.0};
  double max_correction_norm{0.0};
  double wall_time_s{0.0};
  std::size_t samples{0};
  std::vector<double> gains;      // chain gains c_1..c_{n-1} when a chain was built
  std::vector<double> constants;  // chain constants b_1..b_n
};

RunSummary summarize(const Scenario & scenario, const RunResult & result);
nlohmann::json to_json(const RunSummary & s);

/// 0 for Completed, 2 for any safety-relevant event.
int exit_code_for(EventKind kind);

}  // namespace pcbf
