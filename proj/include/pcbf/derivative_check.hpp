#pragma once

#include <span>

#include "pcbf/core.hpp"

namespace pcbf {

/// Central-difference step used for derivative checks: 1e-5 (1 + |x|_inf).
double fd_step(const State & x);

struct DerivativeErrors
{
  double gradient{0.0};  // max |analytic - fd| / (1 + |analytic|) over components and samples
  double hessian{0.0};   // same for the Hessian against differences of the gradient; 0 without one
};

/// Compares a field's analytic gradient (and Hessian, when present) to central differences.
DerivativeErrors check_derivatives(const BarrierField & field, std::span<const State> samples);

}  // namespace pcbf
