#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcbf/backstepping.hpp"
#include "pcbf/filter.hpp"
#include "pcbf/systems.hpp"

namespace pcbf {

enum class FilterKind
{
  ParallelPair,
  SingleBaseline,
  None,
};

enum class NominalKind
{
  Constant,           // u0 = value
  ProportionalSpeed,  // u0[0] = gain (reference - speed), other inputs zero
  Sinusoidal,         // u0 = value * sin(frequency t)
  RandomPiecewise,    // each input uniform in [-value, value], redrawn every `period`
};

enum class EventKind
{
  Completed,
  SafetyViolation,
  ControlBlowUp,
  InfeasibleSlab,
  CbfInvalidity,
};

std::string_view to_string(FilterKind k);
std::string_view to_string(NominalKind k);
std::string_view to_string(EventKind k);
FilterKind filter_kind_from_string(std::string_view s);
NominalKind nominal_kind_from_string(std::string_view s);
EventKind event_kind_from_string(std::string_view s);

struct NominalSpec
{
  NominalKind kind{NominalKind::Constant};
  Eigen::VectorXd value;  // length m; empty means zeros
  double gain{1.0};
  double reference{2.0};
  double frequency{1.0};
  double period{0.5};
};

inline constexpr double kDefaultDt = 1e-3;
inline constexpr double kDefaultHorizon = 10.0;
inline constexpr double kDefaultBlowupThreshold = 1e4;
inline constexpr double kDefaultSafetyTol = 1e-6;

struct ScenarioConfig
{
  std::string name{"scenario"};
  SystemKind system{SystemKind::DoubleIntegrator};
  std::string barrier;  // empty selects the system's shipped corridor
  FilterKind filter{FilterKind::ParallelPair};
  /// Backstepping gains c_1..c_{n-1}; unset entries use the automatic rule.
  /// For the single baseline, gains[0] is its c1 (default 1).
  std::vector<std::optional<double>> gains;
  double gain_margin{0.1};
  double liveness_gain{1.0};  // c2 of the single baseline
  double alpha{1.0};
  double alpha_bar{1.0};
  State x0;
  double dt{kDefaultDt};
  double horizon{kDefaultHorizon};
  NominalSpec nominal;
  double blowup_threshold{kDefaultBlowupThreshold};
  double safety_tol{kDefaultSafetyTol};
  std::uint64_t seed{0};

  /// Throws ConfigurationError / ParameterError describing the first problem.
  void validate() const;
};

/// Nominal (unfiltered) control law evaluated at (t, x).
class NominalController
{
public:
  NominalController(const NominalSpec & spec, SystemKind system, int m, double horizon, std::uint64_t seed);

  ControlInput operator()(double t, const State & x) const;

private:
  NominalSpec spec_;
  int m_;
  int speed_index_;
  std::vector<Eigen::VectorXd> segments_;
};

/// Everything a run needs, built once from a validated config.
class Scenario
{
public:
  explicit Scenario(ScenarioConfig cfg);

  const ScenarioConfig & config() const { return cfg_; }
  const CorridorProblem & problem() const { return problem_; }
  const ControlAffineSystem & system() const { return problem_.system; }
  const std::optional<BacksteppingChain> & chain() const { return chain_; }
  const std::optional<SingleCbfBaseline> & baseline() const { return baseline_; }
  const NominalController & nominal() const { return nominal_; }
  const ClassKInfty & alpha() const { return alpha_; }
  const ClassKInfty & alpha_bar() const { return alpha_bar_; }

  /// Number of monitored barrier levels (n for the parallel filter, 1 otherwise).
  int levels() const { return chain_ ? chain_->relative_degree() : 1; }
  double level_h(int i, const State & x) const;
  double level_hbar(int i, const State & x) const;

private:
  ScenarioConfig cfg_;
  CorridorProblem problem_;
  std::optional<BacksteppingChain> chain_;
  std::optional<SingleCbfBaseline> baseline_;
  NominalController nominal_;
  ClassKInfty alpha_;
  ClassKInfty alpha_bar_;
};

struct ControlStep
{
  ControlInput u_nominal;
  FilterResult result;
  Eigen::VectorXd a;
  double lower{0.0};
  double upper{0.0};  // +inf for the one-sided baseline and the unfiltered case
  bool cbf_valid{true};
};

/// Nominal control, constraint evaluation and filtering at one state. Throws InfeasibleSlabError.
ControlStep closed_loop_control(const State & x, double t, const Scenario & scenario);

/// One classical Runge-Kutta step with u held constant.
State rk4_step(const ControlAffineSystem & system, const ControlInput & u, const State & x, double dt);

struct TrajectorySample
{
  double t{0.0};
  State state;
  ControlInput u_nominal;
  ControlInput u_filtered;
  std::vector<double> h;     // h_1..h_n
  std::vector<double> hbar;  // hbar_1..hbar_n
  double slab_lower{0.0};
  double slab_upper{0.0};
  Branch active{Branch::Nominal};
  double correction_norm{0.0};
};

struct Trajectory
{
  std::vector<std::string> state_names;
  std::vector<std::string> input_names;
  int levels{1};
  std::vector<TrajectorySample> samples;
};

struct SimEvent
{
  EventKind kind{EventKind::Completed};
  double t_event{0.0};
  std::string detail;
};

struct RunResult
{
  Trajectory trajectory;
  SimEvent event;
  double wall_seconds{0.0};
};

std::vector<std::string> state_names(SystemKind kind);
std::vector<std::string> input_names(SystemKind kind);

/// Steps until the horizon or the first event.
RunResult run_scenario(const Scenario & scenario);
RunResult run_scenario(const ScenarioConfig & cfg);

/// Independent runs in parallel (OpenMP); workers <= 0 uses the runtime default.
std::vector<RunResult> run_sweep(std::span<const ScenarioConfig> configs, int workers);
/// Serial reference of run_sweep.
std::vector<RunResult> run_sweep_serial(std::span<const ScenarioConfig> configs);

}  // namespace pcbf
