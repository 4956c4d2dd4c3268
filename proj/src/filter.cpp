#include "pcbf/filter.hpp"

#include <cmath>
#include <sstream>

#include "pcbf/errors.hpp"

namespace pcbf {

std::string_view to_string(Branch b)
{
  switch (b) {
    case Branch::Nominal: return "nominal";
    case Branch::UpperClamped: return "upper";
    case Branch::LowerClamped: return "lower";
    case Branch::ZeroLg: return "zero_lg";
  }
  return "unknown";
}

double default_eps(const Eigen::VectorXd & a)
{
  const double scale = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  return kZeroLgScale * (1.0 + scale);
}

namespace {

void check_inputs(const Eigen::VectorXd & a, const ControlInput & u0, double eps)
{
  if (!(eps > 0.0)) { throw ParameterError("filter eps must be positive"); }
  if (a.size() != u0.size()) {
    throw ConfigurationError("constraint row and nominal control differ in length");
  }
  detail::require_finite(a, "L_g h");
  detail::require_finite(u0, "nominal control");
}

FilterResult passthrough(const ControlInput & u0, Branch b) { return {u0, b, 0.0}; }

FilterResult project(const ControlInput & u0, const Eigen::VectorXd & a, double target, double s, Branch b)
{
  FilterResult r;
  r.u_star = u0 + a * ((target - s) / a.squaredNorm());
  r.active = b;
  r.correction_norm = (r.u_star - u0).norm();
  return r;
}

}  // namespace

FilterResult solve_closed_form(const ConstraintSlab & slab, const ControlInput & u0, double eps)
{
  check_inputs(slab.a, u0, eps);
  detail::require_finite(slab.lower, "slab lower bound");
  detail::require_finite(slab.upper, "slab upper bound");

  if (slab.a.norm() < eps) { return passthrough(u0, Branch::ZeroLg); }
  if (slab.lower > slab.upper) {
    std::ostringstream os;
    os << "infeasible slab: lower " << slab.lower << " > upper " << slab.upper;
    throw InfeasibleSlabError(os.str(), slab.lower, slab.upper);
  }

  const double s = slab.a.dot(u0);
  if (s > slab.upper) { return project(u0, slab.a, slab.upper, s, Branch::UpperClamped); }
  if (s < slab.lower) { return project(u0, slab.a, slab.lower, s, Branch::LowerClamped); }
  return passthrough(u0, Branch::Nominal);
}

FilterResult solve_closed_form(const ConstraintSlab & slab, const ControlInput & u0)
{
  return solve_closed_form(slab, u0, default_eps(slab.a));
}

double feasibility_gap(const ConstraintSlab & slab) { return slab.upper - slab.lower; }

bool zero_lg_consistency(const ConstraintSlab & slab, double eps)
{
  if (slab.a.norm() >= eps) { return true; }
  return slab.lower <= 0.0 && 0.0 <= slab.upper;
}

FilterResult solve_half_space(const HalfSpaceConstraint & c, const ControlInput & u0, double eps)
{
  check_inputs(c.a, u0, eps);
  detail::require_finite(c.lower, "constraint lower bound");

  if (c.a.norm() < eps) { return passthrough(u0, Branch::ZeroLg); }
  const double s = c.a.dot(u0);
  if (s < c.lower) { return project(u0, c.a, c.lower, s, Branch::LowerClamped); }
  return passthrough(u0, Branch::Nominal);
}

FilterResult solve_half_space(const HalfSpaceConstraint & c, const ControlInput & u0)
{
  return solve_half_space(c, u0, default_eps(c.a));
}

bool zero_lg_consistency(const HalfSpaceConstraint & c, double eps)
{
  return c.a.norm() >= eps || c.lower <= 0.0;
}

}  // namespace pcbf
