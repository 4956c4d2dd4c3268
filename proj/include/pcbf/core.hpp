#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace pcbf {

using State = Eigen::VectorXd;
using ControlInput = Eigen::VectorXd;

/**
 * Control-affine dynamics  xdot = f(x) + g(x) u.
 *
 * The raw callables are kept public so systems can be assembled in place;
 * use the checked accessors f(), g() and dynamics() from library code.
 */
struct ControlAffineSystem
{
  int n{0};
  int m{0};
  std::function<Eigen::VectorXd(const State &)> drift;
  std::function<Eigen::MatrixXd(const State &)> input_matrix;
  std::string label;

  /// Drift f(x); throws on size mismatch or non-finite output.
  Eigen::VectorXd f(const State & x) const;
  /// Input matrix g(x), n x m.
  Eigen::MatrixXd g(const State & x) const;
  /// f(x) + g(x) u.
  Eigen::VectorXd dynamics(const State & x, const ControlInput & u) const;
};

/// Extended class-K-infinity function. The linear family s -> c s is the default.
class ClassKInfty
{
public:
  static ClassKInfty linear(double c);
  /// Arbitrary user function; monotonicity is the caller's responsibility.
  static ClassKInfty custom(std::function<double(double)> fn, std::string label);

  double operator()(double s) const { return fn_(s); }

  /// Slope for the linear family, empty for custom functions.
  std::optional<double> coefficient() const { return coefficient_; }
  const std::string & label() const { return label_; }

private:
  ClassKInfty(std::function<double(double)> fn, std::optional<double> c, std::string label)
      : fn_(std::move(fn)), coefficient_(c), label_(std::move(label))
  {}

  std::function<double(double)> fn_;
  std::optional<double> coefficient_;
  std::string label_;
};

/// s -> c s. Throws ParameterError unless c > 0.
ClassKInfty class_k_linear(double c);

/// Scalar barrier candidate with analytic first (and optionally second) derivatives.
struct BarrierField
{
  std::function<double(const State &)> value;
  std::function<Eigen::VectorXd(const State &)> gradient;
  /// Only needed when the field seeds a backstepping chain of depth >= 2.
  std::function<Eigen::MatrixXd(const State &)> hessian;
  std::string label;

  bool has_hessian() const { return static_cast<bool>(hessian); }
};

/**
 * Constant-sum barrier pair (h, b - h).
 *
 * The complementary barrier is never stored; it is always evaluated as
 * b - h(x), so h + hbar = b holds exactly and grad hbar = -grad h.
 */
class ParallelPair
{
public:
  ParallelPair(BarrierField h, double b);

  const BarrierField & h() const { return h_; }
  double b() const { return b_; }

  double h_value(const State & x) const { return h_.value(x); }
  double hbar_value(const State & x) const { return b_ - h_.value(x); }
  Eigen::VectorXd h_gradient(const State & x) const { return h_.gradient(x); }
  Eigen::VectorXd hbar_gradient(const State & x) const { return -h_.gradient(x); }

  /// The complementary barrier as a standalone field (derived from h and b).
  BarrierField hbar_field() const;

private:
  BarrierField h_;
  double b_;
};

/// Two-sided linear constraint  lower <= a u <= upper  on the control.
struct ConstraintSlab
{
  Eigen::VectorXd a;  // L_g h(x), one entry per input
  double lower{0.0};
  double upper{0.0};
};

/// Joint slab for a parallel pair at x (both barrier conditions in one constraint).
ConstraintSlab eval_slab(
  const ParallelPair & pair,
  const ControlAffineSystem & system,
  const ClassKInfty & alpha,
  const ClassKInfty & alpha_bar,
  const State & x);

struct ParallelCheck
{
  bool parallel{false};
  double b{0.0};       // mean of h + hbar over the samples
  double spread{0.0};  // max - min of h + hbar
};

inline constexpr double kParallelTol = 1e-9;

/// Checks h + hbar is a positive constant over the samples (absolute tolerance).
ParallelCheck verify_parallel(
  const BarrierField & h,
  const BarrierField & hbar,
  std::span<const State> samples,
  double tol = kParallelTol);

namespace detail {
void require_finite(const Eigen::Ref<const Eigen::VectorXd> & v, const char * what);
void require_finite(double v, const char * what);
}  // namespace detail

}  // namespace pcbf
