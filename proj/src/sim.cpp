#include "pcbf/sim.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>

#include "pcbf/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pcbf {

std::string_view to_string(FilterKind k)
{
  switch (k) {
    case FilterKind::ParallelPair: return "parallel";
    case FilterKind::SingleBaseline: return "single";
    case FilterKind::None: return "none";
  }
  return "unknown";
}

std::string_view to_string(NominalKind k)
{
  switch (k) {
    case NominalKind::Constant: return "constant";
    case NominalKind::ProportionalSpeed: return "proportional_speed";
    case NominalKind::Sinusoidal: return "sinusoidal";
    case NominalKind::RandomPiecewise: return "random_piecewise";
  }
  return "unknown";
}

std::string_view to_string(EventKind k)
{
  switch (k) {
    case EventKind::Completed: return "Completed";
    case EventKind::SafetyViolation: return "SafetyViolation";
    case EventKind::ControlBlowUp: return "ControlBlowUp";
    case EventKind::InfeasibleSlab: return "InfeasibleSlab";
    case EventKind::CbfInvalidity: return "CbfInvalidity";
  }
  return "unknown";
}

FilterKind filter_kind_from_string(std::string_view s)
{
  if (s == "parallel") { return FilterKind::ParallelPair; }
  if (s == "single") { return FilterKind::SingleBaseline; }
  if (s == "none") { return FilterKind::None; }
  throw ConfigurationError("unknown filter kind '" + std::string(s) + "'");
}

NominalKind nominal_kind_from_string(std::string_view s)
{
  if (s == "constant") { return NominalKind::Constant; }
  if (s == "proportional_speed") { return NominalKind::ProportionalSpeed; }
  if (s == "sinusoidal") { return NominalKind::Sinusoidal; }
  if (s == "random_piecewise") { return NominalKind::RandomPiecewise; }
  throw ConfigurationError("unknown nominal controller '" + std::string(s) + "'");
}

EventKind event_kind_from_string(std::string_view s)
{
  for (auto k : {EventKind::Completed, EventKind::SafetyViolation, EventKind::ControlBlowUp,
                 EventKind::InfeasibleSlab, EventKind::CbfInvalidity}) {
    if (to_string(k) == s) { return k; }
  }
  throw ConfigurationError("unknown event kind '" + std::string(s) + "'");
}

namespace {

int state_dim(SystemKind k) { return k == SystemKind::DoubleIntegrator ? 2 : 4; }
int input_dim(SystemKind k) { return k == SystemKind::DoubleIntegrator ? 1 : 2; }

std::string default_barrier(SystemKind k)
{
  return k == SystemKind::DoubleIntegrator ? "corridor" : "sine_corridor";
}

void require(bool ok, const std::string & msg)
{
  if (!ok) { throw ConfigurationError(msg); }
}

void require_param(bool ok, const std::string & msg)
{
  if (!ok) { throw ParameterError(msg); }
}

}  // namespace

void ScenarioConfig::validate() const
{
  require(barrier.empty() || barrier == default_barrier(system),
    "barrier '" + barrier + "' is not available for system " + std::string(to_string(system)));
  require(x0.size() == state_dim(system), "x0 must have length " + std::to_string(state_dim(system)));
  require(x0.allFinite(), "x0 must be finite");
  require_param(dt > 0.0 && std::isfinite(dt), "dt must be positive");
  require_param(horizon > 0.0 && std::isfinite(horizon), "horizon must be positive");
  require_param(dt <= horizon, "dt must not exceed the horizon");
  require_param(blowup_threshold > 0.0, "blowup_threshold must be positive");
  require_param(safety_tol >= 0.0, "safety_tol must be nonnegative");
  require_param(alpha > 0.0 && alpha_bar > 0.0, "class-K coefficients must be positive");
  require_param(gain_margin > 0.0, "gain_margin must be positive");
  require_param(liveness_gain > 0.0, "liveness_gain must be positive");
  // Both shipped systems have relative degree 2: one backstepping gain.
  require(gains.size() <= 1, "at most one backstepping gain (relative degree 2)");
  for (const auto & g : gains) { require_param(!g || *g > 0.0, "gains must be positive"); }
  require(nominal.value.size() == 0 || nominal.value.size() == input_dim(system),
    "nominal.value must have length " + std::to_string(input_dim(system)));
  require(nominal.value.allFinite(), "nominal.value must be finite");
  if (nominal.kind == NominalKind::RandomPiecewise) {
    require_param(nominal.period > 0.0, "nominal.period must be positive");
  }
}

NominalController::NominalController(
  const NominalSpec & spec, SystemKind system, int m, double horizon, std::uint64_t seed)
    : spec_(spec), m_(m), speed_index_(system == SystemKind::DoubleIntegrator ? 1 : UnicycleIndex::v)
{
  if (spec_.value.size() == 0) { spec_.value = Eigen::VectorXd::Zero(m); }
  if (spec_.kind == NominalKind::RandomPiecewise) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto count = static_cast<std::size_t>(std::ceil(horizon / spec_.period)) + 1;
    segments_.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
      Eigen::VectorXd u(m);
      for (int i = 0; i < m; ++i) { u[i] = spec_.value[i] * unit(rng); }
      segments_.push_back(std::move(u));
    }
  }
}

ControlInput NominalController::operator()(double t, const State & x) const
{
  switch (spec_.kind) {
    case NominalKind::Constant: return spec_.value;
    case NominalKind::ProportionalSpeed: {
      ControlInput u = ControlInput::Zero(m_);
      u[0] = spec_.gain * (spec_.reference - x[speed_index_]);
      return u;
    }
    case NominalKind::Sinusoidal: return spec_.value * std::sin(spec_.frequency * t);
    case NominalKind::RandomPiecewise: {
      auto j = static_cast<std::size_t>(std::floor(t / spec_.period));
      return segments_[std::min(j, segments_.size() - 1)];
    }
  }
  return ControlInput::Zero(m_);
}

namespace {

ScenarioConfig validated(ScenarioConfig cfg)
{
  cfg.validate();
  if (cfg.barrier.empty()) { cfg.barrier = default_barrier(cfg.system); }
  return cfg;
}

std::optional<double> first_gain(const ScenarioConfig & cfg)
{
  return cfg.gains.empty() ? std::nullopt : cfg.gains.front();
}

}  // namespace

Scenario::Scenario(ScenarioConfig cfg)
    : cfg_(validated(std::move(cfg))),
      problem_(corridor_problem(cfg_.system)),
      nominal_(cfg_.nominal, cfg_.system, problem_.system.m, cfg_.horizon, cfg_.seed),
      alpha_(class_k_linear(cfg_.alpha)),
      alpha_bar_(class_k_linear(cfg_.alpha_bar))
{
  if (cfg_.filter == FilterKind::ParallelPair) {
    ChainOptions opts;
    opts.margin = cfg_.gain_margin;
    opts.gain_overrides = cfg_.gains;
    chain_.emplace(build_chain(problem_.pair, problem_.jet, problem_.system, cfg_.x0, 2, opts));
  } else if (cfg_.filter == FilterKind::SingleBaseline) {
    baseline_.emplace(single_cbf_baseline(cfg_.system, first_gain(cfg_).value_or(1.0), cfg_.liveness_gain));
  }
}

double Scenario::level_h(int i, const State & x) const
{
  return chain_ ? chain_->h(i, x) : problem_.pair.h_value(x);
}

double Scenario::level_hbar(int i, const State & x) const
{
  return chain_ ? chain_->hbar(i, x) : problem_.pair.hbar_value(x);
}

ControlStep closed_loop_control(const State & x, double t, const Scenario & scenario)
{
  detail::require_finite(x, "state");
  ControlStep step;
  step.u_nominal = scenario.nominal()(t, x);

  if (const auto & chain = scenario.chain()) {
    const ConstraintSlab slab = target_slab(*chain, scenario.system(), scenario.alpha(), scenario.alpha_bar(), x);
    const double eps = default_eps(slab.a);
    step.a = slab.a;
    step.lower = slab.lower;
    step.upper = slab.upper;
    step.cbf_valid = zero_lg_consistency(slab, eps);
    step.result = solve_closed_form(slab, step.u_nominal, eps);
  } else if (const auto & baseline = scenario.baseline()) {
    const HalfSpaceConstraint c = baseline->constraint(x);
    const double eps = default_eps(c.a);
    step.a = c.a;
    step.lower = c.lower;
    step.upper = std::numeric_limits<double>::infinity();
    step.cbf_valid = zero_lg_consistency(c, eps);
    step.result = solve_half_space(c, step.u_nominal, eps);
  } else {
    step.a = Eigen::VectorXd::Zero(scenario.system().m);
    step.lower = -std::numeric_limits<double>::infinity();
    step.upper = std::numeric_limits<double>::infinity();
    step.result = FilterResult{step.u_nominal, Branch::Nominal, 0.0};
  }
  return step;
}

State rk4_step(const ControlAffineSystem & system, const ControlInput & u, const State & x, double dt)
{
  if (!(dt > 0.0)) { throw ParameterError("rk4_step: dt must be positive"); }
  const Eigen::VectorXd k1 = system.dynamics(x, u);
  const Eigen::VectorXd k2 = system.dynamics(x + 0.5 * dt * k1, u);
  const Eigen::VectorXd k3 = system.dynamics(x + 0.5 * dt * k2, u);
  const Eigen::VectorXd k4 = system.dynamics(x + dt * k3, u);
  State next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  detail::require_finite(next, "integrated state");
  return next;
}

std::vector<std::string> state_names(SystemKind kind)
{
  if (kind == SystemKind::DoubleIntegrator) { return {"x1", "x2"}; }
  return {"x", "y", "v", "theta"};
}

std::vector<std::string> input_names(SystemKind kind)
{
  if (kind == SystemKind::DoubleIntegrator) { return {"u"}; }
  return {"u_v", "u_theta"};
}

RunResult run_scenario(const Scenario & scenario)
{
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig & cfg = scenario.config();

  RunResult out;
  Trajectory & traj = out.trajectory;
  traj.state_names = state_names(cfg.system);
  traj.input_names = input_names(cfg.system);
  traj.levels = scenario.levels();

  const auto steps = static_cast<long>(std::floor(cfg.horizon / cfg.dt + 1e-9));
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

  State x = cfg.x0;
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;

    ControlStep step;
    try {
      step = closed_loop_control(x, t, scenario);
    } catch (const InfeasibleSlabError & e) {
      out.event = {EventKind::InfeasibleSlab, t, e.what()};
      break;
    }

    TrajectorySample s;
    s.t = t;
    s.state = x;
    s.u_nominal = step.u_nominal;
    s.u_filtered = step.result.u_star;
    for (int i = 1; i <= traj.levels; ++i) {
      s.h.push_back(scenario.level_h(i, x));
      s.hbar.push_back(scenario.level_hbar(i, x));
    }
    s.slab_lower = step.lower;
    s.slab_upper = step.upper;
    s.active = step.result.active;
    s.correction_norm = step.result.correction_norm;

    const double h1 = s.h.front();
    const double hbar1 = s.hbar.front();
    const double u_inf = s.u_filtered.cwiseAbs().maxCoeff();
    traj.samples.push_back(std::move(s));

    std::ostringstream detail;
    if (u_inf > cfg.blowup_threshold) {
      detail << "|u|_inf = " << u_inf << " exceeds " << cfg.blowup_threshold;
      out.event = {EventKind::ControlBlowUp, t, detail.str()};
      break;
    }
    if (h1 < -cfg.safety_tol || hbar1 < -cfg.safety_tol) {
      detail << "h1 = " << h1 << ", hbar1 = " << hbar1;
      out.event = {EventKind::SafetyViolation, t, detail.str()};
      break;
    }
    if (!step.cbf_valid) {
      detail << "L_g h ~ 0 with 0 outside [" << step.lower << ", " << step.upper << "]";
      out.event = {EventKind::CbfInvalidity, t, detail.str()};
      break;
    }
    if (k == steps) {
      out.event = {EventKind::Completed, t, "horizon reached"};
      break;
    }
    x = rk4_step(scenario.system(), step.result.u_star, x, cfg.dt);
  }

  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunResult run_scenario(const ScenarioConfig & cfg) { return run_scenario(Scenario(cfg)); }

std::vector<RunResult> run_sweep_serial(std::span<const ScenarioConfig> configs)
{
  std::vector<RunResult> out;
  out.reserve(configs.size());
  for (const auto & cfg : configs) { out.push_back(run_scenario(cfg)); }
  return out;
}

std::vector<RunResult> run_sweep(std::span<const ScenarioConfig> configs, int workers)
{
  std::vector<RunResult> out(configs.size());
  const auto count = static_cast<std::ptrdiff_t>(configs.size());
#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#else
  (void)workers;
#endif

  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_scenario(configs[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(pcbf_sweep_failure)
      if (!failure) { failure = std::current_exception(); }
    }
  }
  if (failure) { std::rethrow_exception(failure); }
  return out;
}

}  // namespace pcbf
