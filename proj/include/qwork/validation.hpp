#pragma once

#include "qwork/grape.hpp"

#include <span>
#include <vector>

namespace qwork {

// Brute-force counterparts of the fast paths. Everything here recomputes from
// first principles so it can certify the production code.

// Explicit one-step Euler matrices M_k = I + dt A(u_k).
struct PropagatorCache {
  double dt = 0.0;
  std::vector<Mat4> step_matrices;  // size N
};

PropagatorCache make_propagator_cache(const ModelSpec& model, const ControlProtocol& protocol);

// Ordered product M_{k_to-1} ... M_{k_from}; identity when k_from == k_to.
// Maps the state at step k_from to the state at step k_to.
Mat4 discrete_propagator(const PropagatorCache& cache, int k_from, int k_to);

// Unrolled double sum over source pairs,
//   sigma^2 = 2 sum_{k1} sum_{k2 < k1} dt^2 v_{k1} g.P(k1, k2+1) [v_{k2} s(x_{k2})],
// algebraically identical to unwinding the auxiliary-state recursion, with no
// diagonal term. The raw overload takes prebuilt step matrices and sources so
// tests can pin the generator to a fixed control level.
double variance_double_sum(std::span<const Mat4> step_matrices, std::span<const double> v,
                           std::span<const Vec4> sources, double dt);
double variance_double_sum(const ModelSpec& model, const ControlProtocol& protocol,
                           const Trajectory& traj);

// Central differences of the discrete cost with respect to v at the listed
// indices, two full propagations each. Returned in the same per-unit-time
// normalization as control_gradient (the raw difference quotient divided by dt).
std::vector<double> finite_difference_gradient(const ModelSpec& model, const TimeGrid& grid,
                                               double u0, double u_target,
                                               const OptimizerConfig& config,
                                               const ControlProtocol& protocol, double h,
                                               std::span<const int> indices);

}  // namespace qwork
