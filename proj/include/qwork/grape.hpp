#pragma once

#include "qwork/propagation.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qwork {

// Costates of the augmented state: costate_x pairs with x, costate_y with y
// (the auxiliary state), costate_u with the integrated control.
struct AdjointTrajectory {
  std::vector<Vec4> costate_x;   // N+1
  std::vector<Vec4> costate_y;   // N+1
  std::vector<double> costate_u; // N+1
};

struct OptimizerConfig {
  double alpha = 0.0;       // weight between dissipation (0) and fluctuations (1)
  double kappa = 10.0;      // quadratic penalty on the terminal control
  double eta = 0.01;        // gradient-descent step
  long max_iters = 1000000;
  double u_bound = 8.0;     // |u| box, enforced by projection
  double v_bound = 100.0;   // |v| box
  double tol_rel_J = 1e-10; // relative cost change over a 100-iteration window
  int record_every = 100;

  void validate() const;
};

struct OptimizeResult {
  ControlProtocol protocol;  // best-seen iterate
  Trajectory trajectory;     // re-propagated from the returned protocol
  CostBreakdown cost;        // re-evaluated on the returned protocol
  std::vector<std::pair<long, double>> cost_history;  // (iteration, total_J)
  long iterations_run = 0;
  bool converged = false;
  double max_trace_dev = 0.0;    // worst trace drift over every iteration
  double max_y_trace_dev = 0.0;
};

struct ParetoPoint {
  double alpha = 0.0;
  double w_diss = 0.0;
  double beta_variance = 0.0;  // beta * variance
  double total_J = 0.0;
  long iterations = 0;
  bool converged = false;
};

// Exact transpose of the forward Euler scheme. Backward from
// costate_x[N] = costate_y[N] = 0 and costate_u[N] = terminal_adjoint(...):
//   costate_y[k] = costate_y[k+1] + dt [A^T costate_y[k+1] + alpha beta v_k g]
//   costate_x[k] = costate_x[k+1] + dt [A^T costate_x[k+1] + (1-alpha) v_k g
//                                       + v_k J(x_k)^T costate_y[k+1]]
//   costate_u[k] = costate_u[k+1] + dt [costate_x[k+1].dA x_k + costate_y[k+1].dA y_k]
AdjointTrajectory backward_pass(const ModelSpec& model, const ControlProtocol& protocol,
                                const Trajectory& traj, double alpha, double kappa);

// Per-unit-time gradient of the discrete cost:
//   dv_k = (1-alpha) g.x_k + alpha beta g.y_k + costate_u[k+1] + costate_y[k+1].s(x_k)
// so that dt * dv_k equals dJ/dv_k of the discrete cost exactly.
std::vector<double> control_gradient(const ModelSpec& model, const ControlProtocol& protocol,
                                     const Trajectory& traj, const AdjointTrajectory& adj,
                                     double alpha);

// Projected gradient descent from a linear-ramp start:
// propagate -> adjoint -> gradient -> v <- clip(v - eta dv), u re-walked into
// its box. Stops at max_iters or when the relative cost change over a
// 100-iteration window falls below tol_rel_J. Returns the best-seen iterate.
OptimizeResult optimize(const ModelSpec& model, const TimeGrid& grid, double u0,
                        double u_target, const OptimizerConfig& config);

// Independent cold-start optimizations per alpha, merged in input order.
// on_point, if set, receives each finished result (called from worker threads,
// one call per index).
std::vector<ParetoPoint> sweep_alpha(
    const ModelSpec& model, const TimeGrid& grid, double u0, double u_target,
    const OptimizerConfig& base_config, const std::vector<double>& alphas, int workers = 1,
    const std::function<void(std::size_t, const OptimizeResult&)>& on_point = nullptr);

// Non-dominated subset in the (w_diss, beta_variance) plane, input order kept.
std::vector<ParetoPoint> pareto_filter(const std::vector<ParetoPoint>& points);

}  // namespace qwork
