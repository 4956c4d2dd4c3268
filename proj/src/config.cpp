#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pcbf/errors.hpp"
#include "pcbf/io.hpp"

namespace pcbf {

namespace {

class Parser
{
public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node & node, const std::string & msg) const
  {
    std::ostringstream os;
    os << source_;
    if (node.Mark().line >= 0) { os << ":" << node.Mark().line + 1; }
    os << ": " << msg;
    throw ConfigParseError(os.str());
  }

  double real(const YAML::Node & node, const std::string & key) const
  {
    if (!node.IsScalar()) { fail(node, key + ": expected a number"); }
    const std::string text = node.Scalar();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception &) {
      fail(node, key + ": '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) { fail(node, key + ": '" + text + "' is not a finite number"); }
    return v;
  }

  double positive(const YAML::Node & node, const std::string & key) const
  {
    const double v = real(node, key);
    if (!(v > 0.0)) { fail(node, key + ": must be positive"); }
    return v;
  }

  double nonnegative(const YAML::Node & node, const std::string & key) const
  {
    const double v = real(node, key);
    if (v < 0.0) { fail(node, key + ": must be nonnegative"); }
    return v;
  }

  std::uint64_t natural(const YAML::Node & node, const std::string & key) const
  {
    if (!node.IsScalar()) { fail(node, key + ": expected a nonnegative integer"); }
    const std::string text = node.Scalar();
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
      fail(node, key + ": '" + text + "' is not a nonnegative integer");
    }
    try {
      return std::stoull(text);
    } catch (const std::exception &) {
      fail(node, key + ": '" + text + "' is out of range");
    }
  }

  int count(const YAML::Node & node, const std::string & key) const
  {
    const auto v = natural(node, key);
    if (v == 0 || v > 100000) { fail(node, key + ": must be in 1..100000"); }
    return static_cast<int>(v);
  }

  std::string text(const YAML::Node & node, const std::string & key) const
  {
    if (!node.IsScalar()) { fail(node, key + ": expected a string"); }
    return node.Scalar();
  }

  Eigen::VectorXd vector(const YAML::Node & node, const std::string & key) const
  {
    if (!node.IsSequence()) { fail(node, key + ": expected a list of numbers"); }
    Eigen::VectorXd out(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i) {
      out[static_cast<Eigen::Index>(i)] = real(node[i], key + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  /// Calls the handler registered for each key; unknown keys are errors.
  void walk(
    const YAML::Node & map,
    const std::string & prefix,
    const std::map<std::string, std::function<void(const YAML::Node &)>> & handlers) const
  {
    if (!map.IsMap()) { fail(map, (prefix.empty() ? std::string("config") : prefix) + ": expected a mapping"); }
    for (const auto & kv : map) {
      const std::string key = kv.first.as<std::string>();
      const auto it = handlers.find(key);
      if (it == handlers.end()) { fail(kv.first, "unknown key '" + prefix + key + "'"); }
      it->second(kv.second);
    }
  }

  template<typename F>
  auto guarded(const YAML::Node & node, F && f) const
  {
    try {
      return f();
    } catch (const ConfigParseError &) {
      throw;
    } catch (const std::exception & e) {
      fail(node, e.what());
    }
  }

private:
  std::string source_;
};

}  // namespace

LoadedConfig parse_config(const std::string & text, const std::string & source_name)
{
  const Parser p(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception & e) {
    std::ostringstream os;
    os << source_name << ":" << e.mark.line + 1 << ": " << e.msg;
    throw ConfigParseError(os.str());
  }
  if (!root || root.IsNull()) { throw ConfigParseError(source_name + ": empty config"); }

  LoadedConfig out;
  ScenarioConfig & cfg = out.scenario;
  bool have_system = false;
  bool have_x0 = false;
  YAML::Node x0_node;

  p.walk(root, "", {
    {"name", [&](const YAML::Node & n) { cfg.name = p.text(n, "name"); }},
    {"system", [&](const YAML::Node & n) {
       cfg.system = p.guarded(n, [&] { return system_kind_from_string(p.text(n, "system")); });
       have_system = true;
     }},
    {"barrier", [&](const YAML::Node & n) { cfg.barrier = p.text(n, "barrier"); }},
    {"filter", [&](const YAML::Node & n) {
       cfg.filter = p.guarded(n, [&] { return filter_kind_from_string(p.text(n, "filter")); });
     }},
    {"gains", [&](const YAML::Node & n) {
       if (!n.IsSequence()) { p.fail(n, "gains: expected a list (use 'auto' for automatic)"); }
       cfg.gains.clear();
       for (std::size_t i = 0; i < n.size(); ++i) {
         const YAML::Node g = n[i];
         if (g.IsNull() || (g.IsScalar() && g.Scalar() == "auto")) {
           cfg.gains.emplace_back(std::nullopt);
         } else {
           cfg.gains.emplace_back(p.positive(g, "gains[" + std::to_string(i) + "]"));
         }
       }
     }},
    {"gain_margin", [&](const YAML::Node & n) { cfg.gain_margin = p.positive(n, "gain_margin"); }},
    {"liveness_gain", [&](const YAML::Node & n) { cfg.liveness_gain = p.positive(n, "liveness_gain"); }},
    {"class_k", [&](const YAML::Node & n) {
       p.walk(n, "class_k.", {
         {"alpha", [&](const YAML::Node & v) { cfg.alpha = p.positive(v, "class_k.alpha"); }},
         {"alpha_bar", [&](const YAML::Node & v) { cfg.alpha_bar = p.positive(v, "class_k.alpha_bar"); }},
       });
     }},
    {"x0", [&](const YAML::Node & n) {
       cfg.x0 = p.vector(n, "x0");
       x0_node = n;
       have_x0 = true;
     }},
    {"sim", [&](const YAML::Node & n) {
       p.walk(n, "sim.", {
         {"dt", [&](const YAML::Node & v) { cfg.dt = p.positive(v, "sim.dt"); }},
         {"horizon", [&](const YAML::Node & v) { cfg.horizon = p.positive(v, "sim.horizon"); }},
         {"blowup_threshold", [&](const YAML::Node & v) { cfg.blowup_threshold = p.positive(v, "sim.blowup_threshold"); }},
         {"safety_tol", [&](const YAML::Node & v) { cfg.safety_tol = p.nonnegative(v, "sim.safety_tol"); }},
         {"seed", [&](const YAML::Node & v) { cfg.seed = p.natural(v, "sim.seed"); }},
       });
     }},
    {"nominal", [&](const YAML::Node & n) {
       p.walk(n, "nominal.", {
         {"kind", [&](const YAML::Node & v) {
            cfg.nominal.kind = p.guarded(v, [&] { return nominal_kind_from_string(p.text(v, "nominal.kind")); });
          }},
         {"value", [&](const YAML::Node & v) { cfg.nominal.value = p.vector(v, "nominal.value"); }},
         {"gain", [&](const YAML::Node & v) { cfg.nominal.gain = p.real(v, "nominal.gain"); }},
         {"reference", [&](const YAML::Node & v) { cfg.nominal.reference = p.real(v, "nominal.reference"); }},
         {"frequency", [&](const YAML::Node & v) { cfg.nominal.frequency = p.real(v, "nominal.frequency"); }},
         {"period", [&](const YAML::Node & v) { cfg.nominal.period = p.positive(v, "nominal.period"); }},
       });
     }},
    {"validate", [&](const YAML::Node & n) {
       p.walk(n, "validate.", {
         {"grid_along", [&](const YAML::Node & v) { out.validate.grid_along = p.count(v, "validate.grid_along"); }},
         {"grid_across", [&](const YAML::Node & v) { out.validate.grid_across = p.count(v, "validate.grid_across"); }},
         {"random_samples", [&](const YAML::Node & v) {
            out.validate.random_samples = p.count(v, "validate.random_samples");
          }},
       });
     }},
  });

  if (!have_system) { p.fail(root, "missing required key 'system'"); }
  if (!have_x0) { p.fail(root, "missing required key 'x0'"); }
  try {
    cfg.validate();
  } catch (const std::exception & e) {
    const std::string msg = e.what();
    p.fail(msg.rfind("x0", 0) == 0 ? x0_node : root, msg);
  }
  return out;
}

LoadedConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigParseError(path.string() + ": cannot open"); }
  std::ostringstream buf;
  buf << in.rdbuf();
  LoadedConfig out = parse_config(buf.str(), path.string());
  if (out.scenario.name.empty() || out.scenario.name == "scenario") { out.scenario.name = path.stem().string(); }
  return out;
}

void Overrides::apply(ScenarioConfig & cfg) const
{
  if (seed) { cfg.seed = *seed; }
  if (dt) { cfg.dt = *dt; }
  if (horizon) { cfg.horizon = *horizon; }
}

}  // namespace pcbf
