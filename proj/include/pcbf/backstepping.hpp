#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pcbf/core.hpp"

namespace pcbf {

/**
 * Closed-form drift derivatives of a barrier: derivatives[k-1] evaluates
 * L_f^k h together with its state gradient, for k = 1..depth().
 */
struct SmoothJet
{
  std::vector<BarrierField> derivatives;

  int depth() const { return static_cast<int>(derivatives.size()); }
};

/**
 * Smallest admissible backstepping gain for one level at the initial state:
 * max(-L_f h / h, L_f h / (b - h), 0). Any gain strictly above it keeps the
 * next level's pair positive at x0. Throws InteriorError unless 0 < h < b.
 */
double gain_lower_bound(double h_val, double lfh_val, double b);

struct ChainOptions
{
  /// Added to the lower bound when a level's gain is chosen automatically.
  double margin{0.1};
  /// Per-level explicit gains c_1..c_{n-1}; std::nullopt selects the automatic rule.
  std::vector<std::optional<double>> gain_overrides;
};

/**
 * Backstepped constant-sum barrier levels
 *
 *   h_1 = h,  h_i = c_{i-1} h_{i-1} + L_f h_{i-1},  b_i = c_{i-1} b_{i-1},
 *
 * with hbar_i = b_i - h_i. Each h_i is stored as a linear combination of
 * the jet terms L_f^k h, k < i. Immutable once built.
 */
class BacksteppingChain
{
public:
  int relative_degree() const { return n_; }
  const std::vector<double> & gains() const { return gains_; }
  const std::vector<double> & constants() const { return constants_; }
  const State & x0() const { return x0_; }

  /// Level values and gradients, i in 1..n.
  double h(int i, const State & x) const;
  double hbar(int i, const State & x) const { return constant(i) - h(i, x); }
  Eigen::VectorXd gradient(int i, const State & x) const;
  double constant(int i) const;

  /// Level i as a standalone field (value and gradient).
  BarrierField level_field(int i) const;
  /// (h_n, b_n): the pair the safety filter acts on.
  const ParallelPair & target_pair() const { return *target_; }

private:
  friend BacksteppingChain build_chain(
    const ParallelPair &, const SmoothJet &, const ControlAffineSystem &, const State &, int,
    const ChainOptions &);

  void check_level(int i) const;

  int n_{0};
  std::vector<double> gains_;
  std::vector<double> constants_;
  std::vector<std::vector<double>> coefficients_;  // coefficients_[i-1][k] multiplies L_f^k h
  std::vector<BarrierField> terms_;               // h, L_f h, ..., L_f^{n-1} h
  State x0_;
  std::optional<ParallelPair> target_;
};

/**
 * Builds the chain up to relative degree n, tuning every gain to x0.
 * Requires x0 strictly inside both original barrier sets and a jet of depth >= n-1.
 */
BacksteppingChain build_chain(
  const ParallelPair & pair,
  const SmoothJet & jet,
  const ControlAffineSystem & system,
  const State & x0,
  int n,
  const ChainOptions & options = {});

/// Joint slab of the target level pair (h_n, b_n - h_n).
ConstraintSlab target_slab(
  const BacksteppingChain & chain,
  const ControlAffineSystem & system,
  const ClassKInfty & alpha_n,
  const ClassKInfty & alpha_bar_n,
  const State & x);

/// True iff 0 <= h_i(x) <= b_i for every level i = 1..n.
bool membership(const BacksteppingChain & chain, const State & x);

inline constexpr double kRelativeDegreeWarnTol = 1e-8;

struct RelativeDegreeReport
{
  double max_lower_level_lg{0.0};  // max over samples and i < n of |L_g h_i|
  int worst_level{0};
  bool suspicious{false};          // max_lower_level_lg > kRelativeDegreeWarnTol
};

/// Sampled check that the input does not enter below level n.
RelativeDegreeReport relative_degree_diagnostic(
  const BacksteppingChain & chain, const ControlAffineSystem & system, std::span<const State> samples);

}  // namespace pcbf
