#pragma once

#include "qwork/model.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace qwork {

struct TimeGrid {
  double horizon = 1.0;  // total duration T
  int steps = 1000;      // N uniform Euler steps

  double dt() const { return horizon / steps; }
  void validate() const;
};

// Piecewise-constant control rate v_k on [t_k, t_{k+1}); the control itself
// is recovered by the exact recurrence u_{k+1} = u_k + dt v_k.
struct ControlProtocol {
  TimeGrid grid;
  double u0 = 0.0;
  double u_target = 0.0;
  std::vector<double> v;  // size N

  std::vector<double> controls() const;  // u_0..u_N
  double terminal_u() const;
  void validate() const;
};

// Forward Euler record of the augmented state (u, x, y). x carries the
// density matrix, y the auxiliary operator that localizes the work variance
// in time; y starts at zero and stays traceless.
struct Trajectory {
  std::vector<double> u;  // N+1
  std::vector<Vec4> x;    // N+1
  std::vector<Vec4> y;    // N+1

  double max_trace_dev = 0.0;    // max_k |x1 + x2 - 1|
  double max_y_trace_dev = 0.0;  // max_k |y1 + y2|
};

struct CostBreakdown {
  double mean_work = 0.0;
  double delta_F = 0.0;
  double w_diss = 0.0;    // mean_work - delta_F
  double variance = 0.0;  // work variance from the auxiliary state
  double penalty = 0.0;   // (kappa/2)(u_N - u_target)^2
  double total_J = 0.0;   // (1-alpha) w_diss + (alpha beta/2) variance + penalty
};

struct DivergenceError : std::runtime_error {
  int step;
  explicit DivergenceError(int step_, const std::string& what)
      : std::runtime_error(what), step(step_) {}
};

// vec(S_rho(sigma_z)) for x with unit trace
Vec4 s_vector(const Vec4& x);

// Jacobian of s_vector
Mat4 s_jacobian(const Vec4& x);

// Per-step generator tables A(u_k) (and optionally dA/du(u_k)) for one
// protocol; shared by the forward pass, the adjoint pass and the oracles.
struct GeneratorTable {
  std::vector<Mat4> a;
  std::vector<Mat4> da;  // empty unless requested
};

GeneratorTable build_generator_table(const ModelSpec& model, std::span<const double> u,
                                     int steps, bool with_derivative);

// Allocation-free core used by optimize(); out arrays must be presized to N+1.
void propagate_into(const GeneratorTable& table, std::span<const double> v, double dt,
                    const Vec4& x0, double u0, Trajectory& out);

// Forward Euler from the Gibbs state of u0 with y(0) = 0:
//   x_{k+1} = x_k + dt A(u_k) x_k
//   y_{k+1} = y_k + dt [A(u_k) y_k + v_k s(x_k)]
// Throws DivergenceError if the state leaves the finite range.
Trajectory propagate(const ModelSpec& model, const ControlProtocol& protocol);

// Left-endpoint sums matching the forward scheme:
//   <W>  = sum_k dt v_k g.x_k,  sigma^2 = 2 sum_k dt v_k g.y_k,
// with g = [-1, 1, 0, 0]; delta_F is taken at the achieved terminal control.
CostBreakdown evaluate_cost(const ModelSpec& model, const ControlProtocol& protocol,
                            const Trajectory& traj, double alpha, double kappa);

}  // namespace qwork
