#include "pcbf/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

#include "pcbf/derivative_check.hpp"
#include "pcbf/errors.hpp"

namespace fs = std::filesystem;

namespace pcbf {

namespace {

void write_json(const fs::path & path, const nlohmann::json & j)
{
  std::ofstream out(path);
  if (!out) { throw UsageError("cannot write " + path.string()); }
  out << j.dump(2) << '\n';
}

ScenarioConfig load_scenario(const fs::path & path, const Overrides & overrides)
{
  ScenarioConfig cfg = load_config(path).scenario;
  overrides.apply(cfg);
  cfg.validate();
  return cfg;
}

std::string format_value(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void log_summary(std::ostream & log, const RunSummary & s)
{
  log << s.scenario << ": " << to_string(s.event) << " at t = " << s.t_event << " s (min h1 " << s.min_h1
      << ", min hbar1 " << s.min_hbar1 << ", max |u| " << s.max_abs_u_filtered << ")\n";
}

/// Runs fn and maps configuration/usage failures to exit code 1.
template<typename F>
int guarded(std::ostream & log, F && fn)
{
  try {
    return fn();
  } catch (const ConfigParseError & e) {
    log << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument & e) {
    log << "error: " << e.what() << '\n';
  } catch (const fs::filesystem_error & e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitUsage;
}

}  // namespace

int workers_from_env()
{
  const char * env = std::getenv("PCBF_WORKERS");
  if (env == nullptr) { return 0; }
  char * end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v <= 0 || v > 1024) { return 0; }
  return static_cast<int>(v);
}

int cmd_run(const fs::path & config, const fs::path & out_dir, const Overrides & overrides, std::ostream & log)
{
  return guarded(log, [&] {
    const Scenario scenario(load_scenario(config, overrides));
    const RunResult result = run_scenario(scenario);
    const RunSummary summary = summarize(scenario, result);

    fs::create_directories(out_dir);
    write_trajectory_csv(out_dir / "trajectory.csv", result.trajectory);
    write_json(out_dir / "summary.json", to_json(summary));
    log_summary(log, summary);
    return exit_code_for(summary.event);
  });
}

int cmd_compare(const fs::path & config_a, const fs::path & config_b, const fs::path & out_dir,
  const Overrides & overrides, std::ostream & log)
{
  return guarded(log, [&] {
    const Scenario a(load_scenario(config_a, overrides));
    const Scenario b(load_scenario(config_b, overrides));
    const RunResult ra = run_scenario(a);
    const RunResult rb = run_scenario(b);
    const RunSummary sa = summarize(a, ra);
    const RunSummary sb = summarize(b, rb);

    fs::create_directories(out_dir);
    write_trajectory_csv(out_dir / ("a_" + sa.scenario + ".csv"), ra.trajectory);
    write_trajectory_csv(out_dir / ("b_" + sb.scenario + ".csv"), rb.trajectory);

    auto blow_up = [](const RunSummary & s) -> nlohmann::json {
      return s.event == EventKind::ControlBlowUp ? nlohmann::json(s.t_event) : nlohmann::json(nullptr);
    };
    const nlohmann::json comparison = {
      {"a", to_json(sa)},
      {"b", to_json(sb)},
      {"events", {std::string(to_string(sa.event)), std::string(to_string(sb.event))}},
      {"blow_up_times", {blow_up(sa), blow_up(sb)}},
      {"min_h1", {sa.min_h1, sb.min_h1}},
      {"min_hbar1", {sa.min_hbar1, sb.min_hbar1}},
    };
    write_json(out_dir / "comparison.json", comparison);
    log_summary(log, sa);
    log_summary(log, sb);
    return std::max(exit_code_for(sa.event), exit_code_for(sb.event));
  });
}

void apply_sweep_param(ScenarioConfig & cfg, const std::string & param, double value)
{
  if (param == "c1") {
    if (cfg.gains.empty()) { cfg.gains.resize(1); }
    cfg.gains[0] = value;
  } else if (param == "alpha") {
    cfg.alpha = value;
  } else if (param == "alpha_bar") {
    cfg.alpha_bar = value;
  } else if (param == "liveness_gain") {
    cfg.liveness_gain = value;
  } else if (param == "gain_margin") {
    cfg.gain_margin = value;
  } else if (param == "dt") {
    cfg.dt = value;
  } else if (param == "horizon") {
    cfg.horizon = value;
  } else if (param == "seed") {
    if (value < 0.0 || value != std::floor(value)) { throw UsageError("seed values must be nonnegative integers"); }
    cfg.seed = static_cast<std::uint64_t>(value);
  } else {
    throw UsageError("unknown sweep parameter '" + param + "'");
  }
}

int cmd_sweep(const SweepRequest & request, std::ostream & log)
{
  return guarded(log, [&] {
    if (request.values.empty()) { throw UsageError("sweep needs at least one value"); }
    const ScenarioConfig base = load_scenario(request.config, request.overrides);

    std::vector<ScenarioConfig> configs;
    for (double v : request.values) {
      ScenarioConfig cfg = base;
      apply_sweep_param(cfg, request.param, v);
      cfg.name = base.name + "_" + request.param + "_" + format_value(v);
      cfg.validate();
      configs.push_back(std::move(cfg));
    }
    // Build every scenario up front so bad gains surface as usage errors before any run.
    for (const auto & cfg : configs) { Scenario check(cfg); }

    const int workers = request.workers > 0 ? request.workers : workers_from_env();
    const std::vector<RunResult> results = run_sweep(configs, workers);

    fs::create_directories(request.out_dir);
    nlohmann::json runs = nlohmann::json::array();
    int code = kExitOk;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const Scenario scenario(configs[i]);
      const RunSummary summary = summarize(scenario, results[i]);
      const fs::path dir = request.out_dir / configs[i].name;
      fs::create_directories(dir);
      write_trajectory_csv(dir / "trajectory.csv", results[i].trajectory);
      write_json(dir / "summary.json", to_json(summary));
      nlohmann::json entry = to_json(summary);
      entry["param"] = request.param;
      entry["value"] = request.values[i];
      runs.push_back(std::move(entry));
      log_summary(log, summary);
      code = std::max(code, exit_code_for(summary.event));
    }
    write_json(request.out_dir / "sweep.json", {{"param", request.param}, {"runs", runs}});
    return code;
  });
}

namespace {

struct CheckLine
{
  std::string name;
  bool pass{true};
  std::string detail;
};

}  // namespace

int cmd_validate(const fs::path & config, const Overrides & overrides, std::ostream & log)
{
  return guarded(log, [&] {
    const LoadedConfig loaded = load_config(config);
    ScenarioConfig cfg = loaded.scenario;
    overrides.apply(cfg);
    cfg.validate();
    const ValidateSettings & vs = loaded.validate;

    const CorridorProblem problem = corridor_problem(cfg.system);
    const bool single = cfg.filter == FilterKind::SingleBaseline;
    const std::vector<int> positional = cfg.system == SystemKind::Unicycle ? std::vector<int>{0, 1} : std::vector<int>{};
    const auto grid = corridor_grid(cfg.system, vs.grid_along, vs.grid_across);
    const auto samples = random_corridor_states(cfg.system, vs.random_samples, cfg.seed);

    std::vector<CheckLine> checks;
    std::vector<BarrierField> fields;
    std::optional<SingleCbfBaseline> baseline;
    if (single) {
      const double c1 = cfg.gains.empty() || !cfg.gains[0] ? 1.0 : *cfg.gains[0];
      baseline = single_cbf_baseline(cfg.system, c1, cfg.liveness_gain);
      fields = {baseline->h_s, baseline->h2_s};
    } else {
      fields.push_back(problem.pair.h());
      for (const auto & d : problem.jet.derivatives) { fields.push_back(d); }
    }

    {
      const BarrierField & target = fields.front();
      const bool ok = check_gradient_nonzero(target, grid, positional);
      checks.push_back({"gradient_nonzero", ok,
        target.label + (ok ? ": gradient nonzero on " : ": gradient vanishes on part of ") +
          std::to_string(grid.size()) + "-point corridor grid"});
    }

    for (const auto & field : fields) {
      const DerivativeErrors e = check_derivatives(field, samples);
      const bool ok = e.gradient <= 1e-6 && e.hessian <= 1e-6;
      checks.push_back({"finite_difference", ok,
        field.label + ": gradient err " + format_value(e.gradient) + ", hessian err " + format_value(e.hessian)});
    }

    if (!single) {
      const ParallelCheck pc = verify_parallel(problem.pair.h(), problem.pair.hbar_field(), samples);
      checks.push_back({"parallel", pc.parallel,
        "h + hbar = " + format_value(pc.b) + " (spread " + format_value(pc.spread) + ")"});
    }

    {
      CheckLine line{"gain_bound", true, ""};
      try {
        const double h0 = problem.pair.h_value(cfg.x0);
        const double lfh0 = problem.pair.h_gradient(cfg.x0).dot(problem.system.f(cfg.x0));
        const double bound = gain_lower_bound(h0, lfh0, problem.pair.b());
        line.detail = "c1 must exceed " + format_value(bound) + " at x0";
        if (!cfg.gains.empty() && cfg.gains[0] && !single) {
          line.pass = *cfg.gains[0] > bound;
          line.detail += "; configured c1 = " + format_value(*cfg.gains[0]);
        }
      } catch (const InteriorError & e) {
        line.pass = false;
        line.detail = e.what();
      }
      checks.push_back(line);

      if (line.pass && cfg.filter == FilterKind::ParallelPair) {
        ChainOptions opts;
        opts.margin = cfg.gain_margin;
        opts.gain_overrides = cfg.gains;
        const auto chain = build_chain(problem.pair, problem.jet, problem.system, cfg.x0, 2, opts);
        const auto rd = relative_degree_diagnostic(chain, problem.system, samples);
        log << (rd.suspicious ? "WARN" : "INFO") << " relative_degree: max |L_g h_i| below the target level = "
            << rd.max_lower_level_lg << '\n';
      }
    }

    bool all = true;
    for (const auto & c : checks) {
      log << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
      all = all && c.pass;
    }
    return all ? kExitOk : kExitEvent;
  });
}

}  // namespace pcbf
