#include "pcbf/derivative_check.hpp"

#include <algorithm>
#include <cmath>

#include "pcbf/errors.hpp"

namespace pcbf {

double fd_step(const State & x) { return 1e-5 * (1.0 + x.cwiseAbs().maxCoeff()); }

namespace {

double rel_err(double analytic, double approx) { return std::abs(analytic - approx) / (1.0 + std::abs(analytic)); }

}  // namespace

DerivativeErrors check_derivatives(const BarrierField & field, std::span<const State> samples)
{
  if (samples.empty()) { throw UsageError("check_derivatives: no samples"); }
  DerivativeErrors out;
  for (const State & x : samples) {
    const double step = fd_step(x);
    const Eigen::VectorXd grad = field.gradient(x);
    Eigen::MatrixXd hess;
    if (field.has_hessian()) { hess = field.hessian(x); }

    for (Eigen::Index i = 0; i < x.size(); ++i) {
      State xp = x;
      State xm = x;
      xp[i] += step;
      xm[i] -= step;
      const double d = (field.value(xp) - field.value(xm)) / (2.0 * step);
      out.gradient = std::max(out.gradient, rel_err(grad[i], d));

      if (field.has_hessian()) {
        const Eigen::VectorXd col = (field.gradient(xp) - field.gradient(xm)) / (2.0 * step);
        for (Eigen::Index j = 0; j < x.size(); ++j) { out.hessian = std::max(out.hessian, rel_err(hess(j, i), col[j])); }
      }
    }
  }
  return out;
}

}  // namespace pcbf
