#pragma once

// Test-side oracles. Nothing here calls the closed-form filter or the
// library's derivative checker; they exist to check those independently.

#include <cstdint>
#include <span>
#include <vector>

#include "pcbf/core.hpp"

namespace pcbf::oracle {

struct OracleReport
{
  std::vector<ControlInput> candidates;  // feasible active-set candidates
  ControlInput minimizer;
  double objective{0.0};    // 0.5 |minimizer - u0|^2
  double certificate{0.0};  // best objective decrease found by random feasible perturbation
};

/**
 * Projection of u0 onto  lower <= a u <= upper  by active-set enumeration.
 *
 * The minimizer of a strictly convex quadratic over a slab is u0 itself or
 * lies on one of the two bounding hyperplanes; each hyperplane candidate is
 * obtained by solving its KKT system with a dense LU factorization. After the
 * pick, `perturbations` random feasible points in a ball of `radius` around
 * the minimizer are tried and the largest objective improvement is recorded.
 */
OracleReport project_onto_slab_oracle(
  const Eigen::VectorXd & a,
  double lower,
  double upper,
  const ControlInput & u0,
  std::uint64_t seed = 0,
  int perturbations = 1000,
  double radius = 0.5);

/**
 * Worst relative error max |analytic - numeric| / (1 + |analytic|) of the
 * field's gradient (and Hessian, when present) against fourth-order central
 * differences.
 */
double finite_difference_check(const BarrierField & field, std::span<const State> samples);

}  // namespace pcbf::oracle
