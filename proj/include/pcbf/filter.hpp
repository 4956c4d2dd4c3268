#pragma once

#include <span>
#include <string_view>

#include "pcbf/core.hpp"

namespace pcbf {

/// Which case of the closed-form projection produced u*.
enum class Branch
{
  Nominal,       // a u0 already inside [lower, upper]
  UpperClamped,  // projected onto a u = upper
  LowerClamped,  // projected onto a u = lower
  ZeroLg,        // input direction vanished, u0 passed through
};

std::string_view to_string(Branch b);

struct FilterResult
{
  ControlInput u_star;
  Branch active{Branch::Nominal};
  double correction_norm{0.0};  // |u_star - u0|
};

/// Relative threshold below which L_g h is treated as zero.
inline constexpr double kZeroLgScale = 1e-10;

/// kZeroLgScale * (1 + |a|_inf).
double default_eps(const Eigen::VectorXd & a);

/**
 * Minimum-norm correction of u0 onto  lower <= a u <= upper.
 *
 * Closed form of  min 0.5 |u - u0|^2  s.t. the slab. When |a| < eps the
 * nominal input is returned unchanged. An empty slab with |a| >= eps throws
 * InfeasibleSlabError: valid parallel pairs never produce one.
 */
FilterResult solve_closed_form(const ConstraintSlab & slab, const ControlInput & u0, double eps);
FilterResult solve_closed_form(const ConstraintSlab & slab, const ControlInput & u0);

/// upper - lower; nonnegative means both barrier conditions can be met at once.
double feasibility_gap(const ConstraintSlab & slab);

/// False when a ~ 0 but zero is outside [lower, upper] (the pair is not a valid CBF here).
bool zero_lg_consistency(const ConstraintSlab & slab, double eps);

/// One-sided constraint  a u >= lower  used by the single-barrier baseline.
struct HalfSpaceConstraint
{
  Eigen::VectorXd a;
  double lower{0.0};
};

/// Standard single-constraint CBF filter: u0 + a^T max(0, lower - a u0) / |a|^2.
FilterResult solve_half_space(const HalfSpaceConstraint & c, const ControlInput & u0, double eps);
FilterResult solve_half_space(const HalfSpaceConstraint & c, const ControlInput & u0);

/// False when a ~ 0 and lower > 0 (no input can satisfy the condition).
bool zero_lg_consistency(const HalfSpaceConstraint & c, double eps);

struct SlabInstance
{
  ConstraintSlab slab;
  ControlInput u0;
};

/// Filters a batch of independent instances in parallel (OpenMP), default eps per instance.
void solve_batch(std::span<const SlabInstance> in, std::span<FilterResult> out);
/// Serial reference of solve_batch.
void solve_batch_serial(std::span<const SlabInstance> in, std::span<FilterResult> out);

}  // namespace pcbf
