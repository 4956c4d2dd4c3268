#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pcbf/errors.hpp"
#include "pcbf/io.hpp"

namespace pcbf {

namespace {

// 17 significant digits round-trip every double.
void put(std::ostream & os, double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

std::vector<std::string> split(const std::string & line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) { out.push_back(field); }
  if (!line.empty() && line.back() == ',') { out.emplace_back(); }
  return out;
}

double parse_real(const std::string & s, std::size_t line)
{
  char * end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw UsageError("trajectory csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

Branch branch_from_string(std::string_view s)
{
  for (auto b : {Branch::Nominal, Branch::UpperClamped, Branch::LowerClamped, Branch::ZeroLg}) {
    if (to_string(b) == s) { return b; }
  }
  throw UsageError("unknown branch '" + std::string(s) + "'");
}

void write_trajectory_csv(std::ostream & os, const Trajectory & traj)
{
  os << "t";
  for (const auto & n : traj.state_names) { os << ',' << n; }
  for (const auto & n : traj.input_names) { os << ",u0_" << n; }
  for (const auto & n : traj.input_names) { os << ",u_" << n; }
  for (int i = 1; i <= traj.levels; ++i) { os << ",h_" << i; }
  for (int i = 1; i <= traj.levels; ++i) { os << ",hbar_" << i; }
  os << ",slab_lower,slab_upper,active_branch\n";

  for (const auto & s : traj.samples) {
    put(os, s.t);
    for (Eigen::Index i = 0; i < s.state.size(); ++i) { os << ','; put(os, s.state[i]); }
    for (Eigen::Index i = 0; i < s.u_nominal.size(); ++i) { os << ','; put(os, s.u_nominal[i]); }
    for (Eigen::Index i = 0; i < s.u_filtered.size(); ++i) { os << ','; put(os, s.u_filtered[i]); }
    for (double v : s.h) { os << ','; put(os, v); }
    for (double v : s.hbar) { os << ','; put(os, v); }
    os << ',';
    put(os, s.slab_lower);
    os << ',';
    put(os, s.slab_upper);
    os << ',' << to_string(s.active) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path & path, const Trajectory & traj)
{
  std::ofstream out(path);
  if (!out) { throw UsageError("cannot write " + path.string()); }
  write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv(std::istream & is)
{
  std::string line;
  if (!std::getline(is, line)) { throw UsageError("trajectory csv: missing header"); }
  const auto header = split(line);
  if (header.size() < 5 || header.front() != "t" || header.back() != "active_branch") {
    throw UsageError("trajectory csv: unexpected header");
  }

  Trajectory traj;
  std::size_t col = 1;
  auto starts_with = [](const std::string & s, std::string_view p) { return s.rfind(p, 0) == 0; };
  while (col < header.size() && !starts_with(header[col], "u0_")) { traj.state_names.push_back(header[col++]); }
  while (col < header.size() && starts_with(header[col], "u0_")) { traj.input_names.push_back(header[col++].substr(3)); }
  col += traj.input_names.size();
  int levels = 0;
  while (col < header.size() && starts_with(header[col], "h_")) {
    ++levels;
    ++col;
  }
  traj.levels = levels;
  const std::size_t expected = 1 + traj.state_names.size() + 2 * traj.input_names.size() + 2 * levels + 3;
  if (header.size() != expected || levels == 0) { throw UsageError("trajectory csv: inconsistent header"); }

  const auto ns = static_cast<Eigen::Index>(traj.state_names.size());
  const auto ni = static_cast<Eigen::Index>(traj.input_names.size());
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) { continue; }
    const auto f = split(line);
    if (f.size() != expected) {
      throw UsageError("trajectory csv line " + std::to_string(lineno) + ": wrong field count");
    }
    TrajectorySample s;
    std::size_t c = 0;
    s.t = parse_real(f[c++], lineno);
    s.state.resize(ns);
    for (Eigen::Index i = 0; i < ns; ++i) { s.state[i] = parse_real(f[c++], lineno); }
    s.u_nominal.resize(ni);
    for (Eigen::Index i = 0; i < ni; ++i) { s.u_nominal[i] = parse_real(f[c++], lineno); }
    s.u_filtered.resize(ni);
    for (Eigen::Index i = 0; i < ni; ++i) { s.u_filtered[i] = parse_real(f[c++], lineno); }
    for (int i = 0; i < levels; ++i) { s.h.push_back(parse_real(f[c++], lineno)); }
    for (int i = 0; i < levels; ++i) { s.hbar.push_back(parse_real(f[c++], lineno)); }
    s.slab_lower = parse_real(f[c++], lineno);
    s.slab_upper = parse_real(f[c++], lineno);
    s.active = branch_from_string(f[c++]);
    s.correction_norm = (s.u_filtered - s.u_nominal).norm();
    traj.samples.push_back(std::move(s));
  }
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) { throw UsageError("cannot read " + path.string()); }
  return read_trajectory_csv(in);
}

int exit_code_for(EventKind kind) { return kind == EventKind::Completed ? 0 : 2; }

RunSummary summarize(const Scenario & scenario, const RunResult & result)
{
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const auto & cfg = scenario.config();
  RunSummary s;
  s.scenario = cfg.name;
  s.system = std::string(to_string(cfg.system));
  s.filter = std::string(to_string(cfg.filter));
  s.event = result.event.kind;
  s.t_event = result.event.t_event;
  s.detail = result.event.detail;
  s.wall_time_s = result.wall_seconds;
  s.samples = result.trajectory.samples.size();
  if (const auto & chain = scenario.chain()) {
    s.gains = chain->gains();
    s.constants = chain->constants();
  } else if (const auto & base = scenario.baseline()) {
    s.gains = {base->c1};
  }

  if (result.trajectory.samples.empty()) {
    s.min_h1 = s.min_hbar1 = s.min_all_levels = nan;
    s.max_abs_u_filtered = s.max_correction_norm = nan;
    return s;
  }
  s.min_h1 = s.min_hbar1 = s.min_all_levels = std::numeric_limits<double>::infinity();
  for (const auto & smp : result.trajectory.samples) {
    s.min_h1 = std::min(s.min_h1, smp.h.front());
    s.min_hbar1 = std::min(s.min_hbar1, smp.hbar.front());
    for (double v : smp.h) { s.min_all_levels = std::min(s.min_all_levels, v); }
    for (double v : smp.hbar) { s.min_all_levels = std::min(s.min_all_levels, v); }
    s.max_abs_u_filtered = std::max(s.max_abs_u_filtered, smp.u_filtered.cwiseAbs().maxCoeff());
    s.max_correction_norm = std::max(s.max_correction_norm, smp.correction_norm);
  }
  return s;
}

nlohmann::json to_json(const RunSummary & s)
{
  return {
    {"scenario", s.scenario},
    {"system", s.system},
    {"filter", s.filter},
    {"event", std::string(to_string(s.event))},
    {"t_event", s.t_event},
    {"detail", s.detail},
    {"min_h1", s.min_h1},
    {"min_hbar1", s.min_hbar1},
    {"min_all_levels", s.min_all_levels},
    {"max_abs_u_filtered", s.max_abs_u_filtered},
    {"max_correction_norm", s.max_correction_norm},
    {"wall_time_s", s.wall_time_s},
    {"samples", s.samples},
    {"gains", s.gains},
    {"constants", s.constants},
    {"exit_code", exit_code_for(s.event)},
  };
}

}  // namespace pcbf
