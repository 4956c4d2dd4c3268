#include "pcbf/systems.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pcbf/errors.hpp"

namespace pcbf {

std::string_view to_string(SystemKind k)
{
  switch (k) {
    case SystemKind::DoubleIntegrator: return "double_integrator";
    case SystemKind::Unicycle: return "unicycle";
  }
  return "unknown";
}

SystemKind system_kind_from_string(std::string_view s)
{
  if (s == "double_integrator") { return SystemKind::DoubleIntegrator; }
  if (s == "unicycle") { return SystemKind::Unicycle; }
  throw ConfigurationError("unknown system '" + std::string(s) + "'");
}

CorridorProblem double_integrator()
{
  ControlAffineSystem sys;
  sys.n = 2;
  sys.m = 1;
  sys.label = "double_integrator";
  sys.drift = [](const State & x) -> Eigen::VectorXd { return Eigen::Vector2d(x[1], 0.0); };
  sys.input_matrix = [](const State &) -> Eigen::MatrixXd { return Eigen::Vector2d(0.0, 1.0); };

  BarrierField h;
  h.label = "1 + x1";
  h.value = [](const State & x) { return 1.0 + x[0]; };
  h.gradient = [](const State &) -> Eigen::VectorXd { return Eigen::Vector2d(1.0, 0.0); };
  h.hessian = [](const State &) -> Eigen::MatrixXd { return Eigen::Matrix2d::Zero(); };

  BarrierField lfh;
  lfh.label = "x2";
  lfh.value = [](const State & x) { return x[1]; };
  lfh.gradient = [](const State &) -> Eigen::VectorXd { return Eigen::Vector2d(0.0, 1.0); };

  return {std::move(sys), ParallelPair(std::move(h), 2.0), SmoothJet{{std::move(lfh)}}};
}

State UnicycleState::to_state() const { return Eigen::Vector4d(x, y, v, theta); }

UnicycleState UnicycleState::from_state(const State & s)
{
  if (s.size() != 4) { throw ConfigurationError("unicycle state must have length 4"); }
  return {s[UnicycleIndex::x], s[UnicycleIndex::y], s[UnicycleIndex::v], s[UnicycleIndex::theta]};
}

UnicycleModel unicycle_extended()
{
  ControlAffineSystem sys;
  sys.n = 4;
  sys.m = 2;
  sys.label = "unicycle";
  sys.drift = [](const State & s) -> Eigen::VectorXd {
    const double v = s[UnicycleIndex::v];
    const double th = s[UnicycleIndex::theta];
    return Eigen::Vector4d(v * std::cos(th), v * std::sin(th), 0.0, 0.0);
  };
  sys.input_matrix = [](const State &) -> Eigen::MatrixXd {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 2);
    g(UnicycleIndex::v, UnicycleIndex::u_v) = 1.0;
    g(UnicycleIndex::theta, UnicycleIndex::u_theta) = 1.0;
    return g;
  };
  return {std::move(sys), UnicycleIndex{}};
}

CorridorBarrier sine_corridor()
{
  BarrierField h;
  h.label = "sin x + y + 1";
  h.value = [](const State & s) { return std::sin(s[0]) + s[1] + 1.0; };
  h.gradient = [](const State & s) -> Eigen::VectorXd {
    return Eigen::Vector4d(std::cos(s[0]), 1.0, 0.0, 0.0);
  };
  h.hessian = [](const State & s) -> Eigen::MatrixXd {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(4, 4);
    H(0, 0) = -std::sin(s[0]);
    return H;
  };

  // L_f h1 = v (cos x cos(theta) + sin(theta))
  BarrierField lfh;
  lfh.label = "L_f(sin x + y + 1)";
  lfh.value = [](const State & s) {
    const double th = s[UnicycleIndex::theta];
    return s[UnicycleIndex::v] * (std::cos(s[0]) * std::cos(th) + std::sin(th));
  };
  lfh.gradient = [](const State & s) -> Eigen::VectorXd {
    const double x = s[0];
    const double v = s[UnicycleIndex::v];
    const double th = s[UnicycleIndex::theta];
    return Eigen::Vector4d(
      -v * std::sin(x) * std::cos(th),
      0.0,
      std::cos(x) * std::cos(th) + std::sin(th),
      v * (-std::cos(x) * std::sin(th) + std::cos(th)));
  };

  return {ParallelPair(std::move(h), 2.0), SmoothJet{{std::move(lfh)}}};
}

CorridorProblem unicycle_sine_corridor()
{
  auto model = unicycle_extended();
  auto corridor = sine_corridor();
  return {std::move(model.system), std::move(corridor.pair), std::move(corridor.jet)};
}

CorridorProblem corridor_problem(SystemKind kind)
{
  return kind == SystemKind::DoubleIntegrator ? double_integrator() : unicycle_sine_corridor();
}

UnicycleLieTerms unicycle_lie_terms(double c1, const UnicycleState & s, const BarrierField & h1)
{
  if (!(c1 > 0.0)) { throw ParameterError("unicycle_lie_terms: c1 must be positive"); }
  if (!h1.has_hessian()) { throw ConfigurationError(h1.label + ": Hessian required"); }

  const State x = s.to_state();
  const Eigen::Vector2d grad = h1.gradient(x).head<2>();
  const Eigen::Matrix2d hess = h1.hessian(x).topLeftCorner<2, 2>();
  const Eigen::Vector2d heading(std::cos(s.theta), std::sin(s.theta));
  const Eigen::Vector2d normal(-std::sin(s.theta), std::cos(s.theta));

  UnicycleLieTerms out;
  out.lgv = grad.dot(heading);
  out.lgtheta = s.v * grad.dot(normal);
  out.drift = c1 * s.v * grad.dot(heading) + s.v * s.v * heading.dot(hess * heading);
  return out;
}

UnicycleLieTerms unicycle_lie_terms(double c1, const UnicycleState & s)
{
  return unicycle_lie_terms(c1, s, sine_corridor().pair.h());
}

bool check_gradient_nonzero(
  const BarrierField & h, std::span<const State> samples, std::span<const int> components)
{
  if (samples.empty()) { throw UsageError("check_gradient_nonzero: no samples"); }
  for (const State & x : samples) {
    const Eigen::VectorXd g = h.gradient(x);
    bool nonzero = false;
    if (components.empty()) {
      nonzero = (g.array() != 0.0).any();
    } else {
      for (int c : components) {
        if (c < 0 || c >= g.size()) { throw ConfigurationError("gradient component out of range"); }
        nonzero = nonzero || g[c] != 0.0;
      }
    }
    if (!nonzero) { return false; }
  }
  return true;
}

bool check_gradient_nonzero(
  const ParallelPair & pair, std::span<const State> samples, std::span<const int> components)
{
  return check_gradient_nonzero(pair.h(), samples, components);
}

HalfSpaceConstraint SingleCbfBaseline::constraint(const State & x) const
{
  const Eigen::VectorXd grad = h2_s.gradient(x);
  HalfSpaceConstraint c;
  c.a = system.g(x).transpose() * grad;
  c.lower = -c2 * h2_s.value(x) - grad.dot(system.f(x));
  return c;
}

namespace {

void fill_double_integrator_baseline(SingleCbfBaseline & out)
{
  const double c1 = out.c1;
  out.system = double_integrator().system;

  out.h_s.label = "1 - x1^2";
  out.h_s.value = [](const State & x) { return 1.0 - x[0] * x[0]; };
  out.h_s.gradient = [](const State & x) -> Eigen::VectorXd { return Eigen::Vector2d(-2.0 * x[0], 0.0); };
  out.h_s.hessian = [](const State &) -> Eigen::MatrixXd {
    Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
    H(0, 0) = -2.0;
    return H;
  };

  out.h2_s.label = "c1 (1 - x1^2) - 2 x1 x2";
  out.h2_s.value = [c1](const State & x) { return c1 * (1.0 - x[0] * x[0]) - 2.0 * x[0] * x[1]; };
  out.h2_s.gradient = [c1](const State & x) -> Eigen::VectorXd {
    return Eigen::Vector2d(-2.0 * c1 * x[0] - 2.0 * x[1], -2.0 * x[0]);
  };
  out.h2_s.hessian = [c1](const State &) -> Eigen::MatrixXd {
    Eigen::Matrix2d H;
    H << -2.0 * c1, -2.0, -2.0, 0.0;
    return H;
  };
}

void fill_unicycle_baseline(SingleCbfBaseline & out)
{
  const double c1 = out.c1;
  out.system = unicycle_extended().system;

  // s = sin x + y is the signed offset from the corridor midline.
  out.h_s.label = "1 - (sin x + y)^2";
  out.h_s.value = [](const State & x) {
    const double s = std::sin(x[0]) + x[1];
    return 1.0 - s * s;
  };
  out.h_s.gradient = [](const State & x) -> Eigen::VectorXd {
    const double s = std::sin(x[0]) + x[1];
    return Eigen::Vector4d(-2.0 * s * std::cos(x[0]), -2.0 * s, 0.0, 0.0);
  };
  out.h_s.hessian = [](const State & x) -> Eigen::MatrixXd {
    const double s = std::sin(x[0]) + x[1];
    const Eigen::Vector4d ds(std::cos(x[0]), 1.0, 0.0, 0.0);
    Eigen::MatrixXd H = -2.0 * ds * ds.transpose();
    H(0, 0) += 2.0 * s * std::sin(x[0]);
    return H;
  };

  // h2_s = c1 (1 - s^2) - 2 s v w,  w = cos x cos(theta) + sin(theta)
  out.h2_s.label = "c1 h_s + L_f h_s";
  out.h2_s.value = [c1](const State & x) {
    const double s = std::sin(x[0]) + x[1];
    const double v = x[UnicycleIndex::v];
    const double th = x[UnicycleIndex::theta];
    const double w = std::cos(x[0]) * std::cos(th) + std::sin(th);
    return c1 * (1.0 - s * s) - 2.0 * s * v * w;
  };
  out.h2_s.gradient = [c1](const State & x) -> Eigen::VectorXd {
    const double cx = std::cos(x[0]);
    const double sx = std::sin(x[0]);
    const double s = sx + x[1];
    const double v = x[UnicycleIndex::v];
    const double th = x[UnicycleIndex::theta];
    const double w = cx * std::cos(th) + std::sin(th);
    return Eigen::Vector4d(
      -2.0 * c1 * s * cx - 2.0 * v * (cx * w - s * sx * std::cos(th)),
      -2.0 * c1 * s - 2.0 * v * w,
      -2.0 * s * w,
      -2.0 * s * v * (-cx * std::sin(th) + std::cos(th)));
  };
}

}  // namespace

SingleCbfBaseline single_cbf_baseline(SystemKind kind, double c1, double c2)
{
  if (!(c1 > 0.0) || !(c2 > 0.0)) { throw ParameterError("baseline gains must be positive"); }
  SingleCbfBaseline out;
  out.kind = kind;
  out.c1 = c1;
  out.c2 = c2;
  if (kind == SystemKind::DoubleIntegrator) {
    fill_double_integrator_baseline(out);
  } else {
    fill_unicycle_baseline(out);
  }
  return out;
}

namespace {

std::vector<double> linspace(double a, double b, int count)
{
  std::vector<double> out;
  if (count == 1) {
    out.push_back(0.5 * (a + b));
    return out;
  }
  for (int i = 0; i < count; ++i) { out.push_back(a + (b - a) * i / (count - 1)); }
  return out;
}

}  // namespace

std::vector<State> corridor_grid(SystemKind kind, int along, int across)
{
  if (along < 1 || across < 1) { throw UsageError("corridor_grid: counts must be positive"); }
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(along) * static_cast<std::size_t>(across));
  for (double offset : linspace(-1.0, 1.0, across)) {
    if (kind == SystemKind::DoubleIntegrator) {
      for (double x2 : linspace(-2.0, 2.0, along)) { out.push_back(Eigen::Vector2d(offset, x2)); }
    } else {
      for (double x : linspace(-std::numbers::pi, std::numbers::pi, along)) {
        out.push_back(UnicycleState{x, offset - std::sin(x), 1.0, 0.5}.to_state());
      }
    }
  }
  return out;
}

std::vector<State> random_corridor_states(SystemKind kind, int count, std::uint64_t seed)
{
  if (count < 0) { throw UsageError("random_corridor_states: negative count"); }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto interior_offset = [&] {
    double o = unit(rng);
    while (o <= -1.0 || o >= 1.0) { o = unit(rng); }
    return o;
  };

  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    if (kind == SystemKind::DoubleIntegrator) {
      const double x1 = interior_offset();
      out.push_back(Eigen::Vector2d(x1, 3.0 * unit(rng)));
    } else {
      const double x = 2.0 * std::numbers::pi * unit(rng);
      const double y = interior_offset() - std::sin(x);
      const double v = 3.0 * unit(rng);
      const double th = std::numbers::pi * unit(rng);
      out.push_back(UnicycleState{x, y, v, th}.to_state());
    }
  }
  return out;
}

}  // namespace pcbf
