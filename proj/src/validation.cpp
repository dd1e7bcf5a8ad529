#include "qwork/validation.hpp"

#include <stdexcept>

namespace qwork {

PropagatorCache make_propagator_cache(const ModelSpec& model, const ControlProtocol& protocol) {
  model.validate();
  protocol.validate();
  PropagatorCache cache;
  cache.dt = protocol.grid.dt();
  const auto u = protocol.controls();
  cache.step_matrices.resize(protocol.v.size());
  for (std::size_t k = 0; k < protocol.v.size(); ++k) {
    cache.step_matrices[k] = Mat4::identity() + cache.dt * generator(model, u[k]);
  }
  return cache;
}

Mat4 discrete_propagator(const PropagatorCache& cache, int k_from, int k_to) {
  const int n = static_cast<int>(cache.step_matrices.size());
  if (k_from < 0 || k_to < k_from || k_to > n) {
    throw std::invalid_argument("propagator indices must satisfy 0 <= k_from <= k_to <= N");
  }
  Mat4 p = Mat4::identity();
  for (int k = k_from; k < k_to; ++k) {
    p = cache.step_matrices[static_cast<std::size_t>(k)] * p;
  }
  return p;
}

double variance_double_sum(std::span<const Mat4> step_matrices, std::span<const double> v,
                           std::span<const Vec4> sources, double dt) {
  const std::size_t n = v.size();
  if (step_matrices.size() != n || sources.size() != n) {
    throw std::invalid_argument("double-sum inputs must share the step count");
  }
  double total = 0.0;
  for (std::size_t k2 = 0; k2 < n; ++k2) {
    Vec4 w = v[k2] * sources[k2];
    for (std::size_t k1 = k2 + 1; k1 < n; ++k1) {
      if (k1 > k2 + 1) w = step_matrices[k1 - 1] * w;
      total += 2.0 * dt * dt * v[k1] * (w[1] - w[0]);
    }
  }
  return total;
}

double variance_double_sum(const ModelSpec& model, const ControlProtocol& protocol,
                           const Trajectory& traj) {
  const PropagatorCache cache = make_propagator_cache(model, protocol);
  const std::size_t n = protocol.v.size();
  if (traj.x.size() != n + 1) {
    throw std::invalid_argument("trajectory length does not match the protocol grid");
  }
  std::vector<Vec4> sources(n);
  for (std::size_t k = 0; k < n; ++k) sources[k] = s_vector(traj.x[k]);
  return variance_double_sum(cache.step_matrices, protocol.v, sources, cache.dt);
}

std::vector<double> finite_difference_gradient(const ModelSpec& model, const TimeGrid& grid,
                                               double u0, double u_target,
                                               const OptimizerConfig& config,
                                               const ControlProtocol& protocol, double h,
                                               std::span<const int> indices) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const double dt = grid.dt();
  ControlProtocol probe = protocol;
  probe.grid = grid;
  probe.u0 = u0;
  probe.u_target = u_target;

  auto total_cost = [&]() {
    const Trajectory traj = propagate(model, probe);
    return evaluate_cost(model, probe, traj, config.alpha, config.kappa).total_J;
  };

  std::vector<double> out;
  out.reserve(indices.size());
  for (int idx : indices) {
    if (idx < 0 || idx >= grid.steps) throw std::invalid_argument("gradient index out of range");
    const std::size_t k = static_cast<std::size_t>(idx);
    const double saved = probe.v[k];
    probe.v[k] = saved + h;
    const double jp = total_cost();
    probe.v[k] = saved - h;
    const double jm = total_cost();
    probe.v[k] = saved;
    out.push_back((jp - jm) / (2.0 * h) / dt);
  }
  return out;
}

}  // namespace qwork
