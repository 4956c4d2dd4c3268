#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pcbf/backstepping.hpp"
#include "pcbf/core.hpp"
#include "pcbf/filter.hpp"

namespace pcbf {

enum class SystemKind
{
  DoubleIntegrator,
  Unicycle,
};

std::string_view to_string(SystemKind k);
SystemKind system_kind_from_string(std::string_view s);

/// A system together with its constant-sum corridor pair and drift jet.
struct CorridorProblem
{
  ControlAffineSystem system;
  ParallelPair pair;
  SmoothJet jet;
};

/// x1dot = x2, x2dot = u with the corridor pair h = 1 + x1, b = 2.
CorridorProblem double_integrator();

/// Index map of the integrator-augmented unicycle state [x, y, v, theta] and input [u_v, u_theta].
struct UnicycleIndex
{
  static constexpr int x = 0;
  static constexpr int y = 1;
  static constexpr int v = 2;
  static constexpr int theta = 3;
  static constexpr int u_v = 0;
  static constexpr int u_theta = 1;
};

struct UnicycleState
{
  double x{0.0};
  double y{0.0};
  double v{0.0};
  double theta{0.0};  // not wrapped

  State to_state() const;
  static UnicycleState from_state(const State & s);
};

struct UnicycleModel
{
  ControlAffineSystem system;
  UnicycleIndex index;
};

/// Unicycle with an integrator on the forward speed: uniform relative degree 2 for positional barriers.
UnicycleModel unicycle_extended();

struct CorridorBarrier
{
  ParallelPair pair;
  SmoothJet jet;
};

/// h1 = sin x + y + 1, b = 2, with the unicycle drift derivative L_f h1.
CorridorBarrier sine_corridor();

/// sine_corridor() paired with unicycle_extended().
CorridorProblem unicycle_sine_corridor();

/// Problem for a system kind with its shipped corridor.
CorridorProblem corridor_problem(SystemKind kind);

struct UnicycleLieTerms
{
  double lgv{0.0};      // L_{g_v} h2
  double lgtheta{0.0};  // L_{g_theta} h2
  double drift{0.0};    // L_f h2
};

/**
 * Hand-derived Lie derivatives of h2 = c1 h1 + L_f h1 for a positional
 * barrier h1(x, y) on the augmented unicycle. h1 must provide a Hessian.
 */
UnicycleLieTerms unicycle_lie_terms(double c1, const UnicycleState & s, const BarrierField & h1);
/// Same, for the shipped sine corridor.
UnicycleLieTerms unicycle_lie_terms(double c1, const UnicycleState & s);

/**
 * Sampled nonvanishing-gradient check. `components` restricts the gradient
 * to a sub-block (e.g. {x, y} for positional barriers); empty means all.
 */
bool check_gradient_nonzero(
  const BarrierField & h, std::span<const State> samples, std::span<const int> components = {});
bool check_gradient_nonzero(
  const ParallelPair & pair, std::span<const State> samples, std::span<const int> components = {});

/// Single barrier covering the whole corridor, backstepped once, used as the failing baseline.
struct SingleCbfBaseline
{
  SystemKind kind{SystemKind::DoubleIntegrator};
  ControlAffineSystem system;
  BarrierField h_s;   // vanishing gradient on the corridor midline
  BarrierField h2_s;  // c1 h_s + L_f h_s
  double c1{1.0};
  double c2{1.0};     // liveness gain on h2_s

  /// L_f h2 + L_g h2 u >= -c2 h2  written as  a u >= lower.
  HalfSpaceConstraint constraint(const State & x) const;
};

SingleCbfBaseline single_cbf_baseline(SystemKind kind, double c1, double c2);

/**
 * Structured grid over the corridor: `along` points along it and `across`
 * offsets spanning it from one boundary to the other (odd `across` hits the midline).
 */
std::vector<State> corridor_grid(SystemKind kind, int along, int across);

/// Uniform random states strictly inside the corridor.
std::vector<State> random_corridor_states(SystemKind kind, int count, std::uint64_t seed);

}  // namespace pcbf
