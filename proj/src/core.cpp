#include "pcbf/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcbf/errors.hpp"

namespace pcbf {

namespace detail {

void require_finite(const Eigen::Ref<const Eigen::VectorXd> & v, const char * what)
{
  if (!v.allFinite()) { throw NumericalDomainError(std::string(what) + " is not finite"); }
}

void require_finite(double v, const char * what)
{
  if (!std::isfinite(v)) { throw NumericalDomainError(std::string(what) + " is not finite"); }
}

}  // namespace detail

namespace {

void require_state(const ControlAffineSystem & sys, const State & x)
{
  if (x.size() != sys.n) {
    std::ostringstream os;
    os << sys.label << ": state has length " << x.size() << ", expected " << sys.n;
    throw ConfigurationError(os.str());
  }
}

}  // namespace

Eigen::VectorXd ControlAffineSystem::f(const State & x) const
{
  require_state(*this, x);
  Eigen::VectorXd out = drift(x);
  if (out.size() != n) { throw ConfigurationError(label + ": drift returned wrong length"); }
  detail::require_finite(out, "drift");
  return out;
}

Eigen::MatrixXd ControlAffineSystem::g(const State & x) const
{
  require_state(*this, x);
  Eigen::MatrixXd out = input_matrix(x);
  if (out.rows() != n || out.cols() != m) {
    throw ConfigurationError(label + ": input matrix has wrong shape");
  }
  if (!out.allFinite()) { throw NumericalDomainError(label + ": input matrix is not finite"); }
  return out;
}

Eigen::VectorXd ControlAffineSystem::dynamics(const State & x, const ControlInput & u) const
{
  if (u.size() != m) { throw ConfigurationError(label + ": control has wrong length"); }
  return f(x) + g(x) * u;
}

ClassKInfty ClassKInfty::linear(double c)
{
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ParameterError("class-K coefficient must be positive and finite");
  }
  std::ostringstream os;
  os << "linear(" << c << ")";
  return ClassKInfty([c](double s) { return c * s; }, c, os.str());
}

ClassKInfty ClassKInfty::custom(std::function<double(double)> fn, std::string label)
{
  if (!fn) { throw ParameterError("class-K function is empty"); }
  return ClassKInfty(std::move(fn), std::nullopt, std::move(label));
}

ClassKInfty class_k_linear(double c) { return ClassKInfty::linear(c); }

ParallelPair::ParallelPair(BarrierField h, double b) : h_(std::move(h)), b_(b)
{
  if (!(b > 0.0) || !std::isfinite(b)) { throw ParameterError("parallel pair constant b must be positive"); }
  if (!h_.value || !h_.gradient) { throw ConfigurationError("barrier field needs value and gradient"); }
}

BarrierField ParallelPair::hbar_field() const
{
  BarrierField out;
  out.value = [h = h_.value, b = b_](const State & x) { return b - h(x); };
  out.gradient = [g = h_.gradient](const State & x) -> Eigen::VectorXd { return -g(x); };
  if (h_.hessian) {
    out.hessian = [H = h_.hessian](const State & x) -> Eigen::MatrixXd { return -H(x); };
  }
  out.label = "b - " + h_.label;
  return out;
}

ConstraintSlab eval_slab(
  const ParallelPair & pair,
  const ControlAffineSystem & system,
  const ClassKInfty & alpha,
  const ClassKInfty & alpha_bar,
  const State & x)
{
  detail::require_finite(x, "state");
  const Eigen::VectorXd grad = pair.h_gradient(x);
  if (grad.size() != system.n) {
    throw ConfigurationError(pair.h().label + ": gradient length does not match " + system.label);
  }
  const double h = pair.h_value(x);
  detail::require_finite(h, "barrier value");
  detail::require_finite(grad, "barrier gradient");

  const double lfh = grad.dot(system.f(x));
  ConstraintSlab slab;
  slab.a = system.g(x).transpose() * grad;
  slab.lower = -lfh - alpha(h);
  slab.upper = -lfh + alpha_bar(pair.b() - h);
  detail::require_finite(slab.lower, "slab lower bound");
  detail::require_finite(slab.upper, "slab upper bound");
  return slab;
}

ParallelCheck verify_parallel(
  const BarrierField & h, const BarrierField & hbar, std::span<const State> samples, double tol)
{
  if (samples.empty()) { throw UsageError("verify_parallel: no samples"); }
  double lo = INFINITY;
  double hi = -INFINITY;
  double sum = 0.0;
  for (const State & x : samples) {
    const double s = h.value(x) + hbar.value(x);
    detail::require_finite(s, "h + hbar");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    sum += s;
  }
  ParallelCheck out;
  out.b = sum / static_cast<double>(samples.size());
  out.spread = hi - lo;
  out.parallel = out.spread <= tol && out.b > 0.0;
  return out;
}

}  // namespace pcbf
