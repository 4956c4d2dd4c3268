#include "pcbf/backstepping.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcbf/errors.hpp"

namespace pcbf {

double gain_lower_bound(double h_val, double lfh_val, double b)
{
  detail::require_finite(h_val, "h(x0)");
  detail::require_finite(lfh_val, "L_f h(x0)");
  if (!(h_val > 0.0) || !(h_val < b)) {
    std::ostringstream os;
    os << "initial state not strictly inside the barrier pair: h = " << h_val << ", b = " << b;
    throw InteriorError(os.str());
  }
  return std::max({0.0, -lfh_val / h_val, lfh_val / (b - h_val)});
}

void BacksteppingChain::check_level(int i) const
{
  if (i < 1 || i > n_) {
    std::ostringstream os;
    os << "chain level " << i << " out of range 1.." << n_;
    throw UsageError(os.str());
  }
}

double BacksteppingChain::constant(int i) const
{
  check_level(i);
  return constants_[static_cast<std::size_t>(i - 1)];
}

double BacksteppingChain::h(int i, const State & x) const
{
  check_level(i);
  const auto & coef = coefficients_[static_cast<std::size_t>(i - 1)];
  double v = 0.0;
  for (std::size_t k = 0; k < coef.size(); ++k) { v += coef[k] * terms_[k].value(x); }
  return v;
}

Eigen::VectorXd BacksteppingChain::gradient(int i, const State & x) const
{
  check_level(i);
  const auto & coef = coefficients_[static_cast<std::size_t>(i - 1)];
  Eigen::VectorXd g = coef[0] * terms_[0].gradient(x);
  for (std::size_t k = 1; k < coef.size(); ++k) { g += coef[k] * terms_[k].gradient(x); }
  return g;
}

BarrierField BacksteppingChain::level_field(int i) const
{
  check_level(i);
  std::vector<double> coef = coefficients_[static_cast<std::size_t>(i - 1)];
  std::vector<BarrierField> terms(terms_.begin(), terms_.begin() + static_cast<std::ptrdiff_t>(coef.size()));

  BarrierField out;
  out.value = [coef, terms](const State & x) {
    double v = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) { v += coef[k] * terms[k].value(x); }
    return v;
  };
  out.gradient = [coef, terms](const State & x) -> Eigen::VectorXd {
    Eigen::VectorXd g = coef[0] * terms[0].gradient(x);
    for (std::size_t k = 1; k < coef.size(); ++k) { g += coef[k] * terms[k].gradient(x); }
    return g;
  };
  out.label = terms_[0].label + "[level " + std::to_string(i) + "]";
  return out;
}

BacksteppingChain build_chain(
  const ParallelPair & pair,
  const SmoothJet & jet,
  const ControlAffineSystem & system,
  const State & x0,
  int n,
  const ChainOptions & options)
{
  if (n < 2) { throw ConfigurationError("backstepping needs relative degree n >= 2"); }
  if (jet.depth() < n - 1) {
    std::ostringstream os;
    os << "jet depth " << jet.depth() << " is too shallow for relative degree " << n;
    throw ConfigurationError(os.str());
  }
  if (!(options.margin > 0.0)) { throw ParameterError("gain margin must be positive"); }
  if (options.gain_overrides.size() > static_cast<std::size_t>(n - 1)) {
    throw ConfigurationError("more gain overrides than backstepping levels");
  }
  detail::require_finite(x0, "x0");

  BacksteppingChain chain;
  chain.n_ = n;
  chain.x0_ = x0;
  chain.terms_.push_back(pair.h());
  for (int k = 0; k < n - 1; ++k) { chain.terms_.push_back(jet.derivatives[static_cast<std::size_t>(k)]); }
  chain.coefficients_.push_back({1.0});
  chain.constants_.push_back(pair.b());

  const Eigen::VectorXd f0 = system.f(x0);
  for (int i = 2; i <= n; ++i) {
    const double h_prev = chain.h(i - 1, x0);
    const double lfh_prev = chain.gradient(i - 1, x0).dot(f0);
    const double b_prev = chain.constants_.back();
    const double bound = gain_lower_bound(h_prev, lfh_prev, b_prev);

    const auto level = static_cast<std::size_t>(i - 2);
    double c = bound + options.margin;
    if (level < options.gain_overrides.size() && options.gain_overrides[level]) {
      c = *options.gain_overrides[level];
      if (!(c > bound)) {
        std::ostringstream os;
        os << "gain c_" << (i - 1) << " = " << c << " does not exceed its lower bound " << bound;
        throw ParameterError(os.str());
      }
    }
    chain.gains_.push_back(c);
    chain.constants_.push_back(c * b_prev);

    const auto & prev = chain.coefficients_.back();
    std::vector<double> next(prev.size() + 1, 0.0);
    for (std::size_t k = 0; k < prev.size(); ++k) {
      next[k] += c * prev[k];
      next[k + 1] += prev[k];
    }
    chain.coefficients_.push_back(std::move(next));
  }

  for (int i = 1; i <= n; ++i) {
    const double hi = chain.h(i, x0);
    const double hbi = chain.hbar(i, x0);
    if (!(hi > 0.0) || !(hbi > 0.0)) {
      std::ostringstream os;
      os << "level " << i << " pair not positive at x0 (h = " << hi << ", hbar = " << hbi << ")";
      throw InteriorError(os.str());
    }
  }

  BarrierField top = chain.level_field(n);
  top.label = pair.h().label + "[target]";
  chain.target_.emplace(std::move(top), chain.constants_.back());
  return chain;
}

ConstraintSlab target_slab(
  const BacksteppingChain & chain,
  const ControlAffineSystem & system,
  const ClassKInfty & alpha_n,
  const ClassKInfty & alpha_bar_n,
  const State & x)
{
  return eval_slab(chain.target_pair(), system, alpha_n, alpha_bar_n, x);
}

bool membership(const BacksteppingChain & chain, const State & x)
{
  for (int i = 1; i <= chain.relative_degree(); ++i) {
    const double h = chain.h(i, x);
    if (!(h >= 0.0) || !(chain.constant(i) - h >= 0.0)) { return false; }
  }
  return true;
}

RelativeDegreeReport relative_degree_diagnostic(
  const BacksteppingChain & chain, const ControlAffineSystem & system, std::span<const State> samples)
{
  if (samples.empty()) { throw UsageError("relative_degree_diagnostic: no samples"); }
  RelativeDegreeReport report;
  for (const State & x : samples) {
    const Eigen::MatrixXd g = system.g(x);
    for (int i = 1; i < chain.relative_degree(); ++i) {
      const double lg = (g.transpose() * chain.gradient(i, x)).norm();
      if (lg > report.max_lower_level_lg) {
        report.max_lower_level_lg = lg;
        report.worst_level = i;
      }
    }
  }
  report.suspicious = report.max_lower_level_lg > kRelativeDegreeWarnTol;
  return report;
}

}  // namespace pcbf
