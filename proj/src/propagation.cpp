#include "qwork/propagation.hpp"

#include <cmath>

namespace qwork {

void TimeGrid::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("time grid horizon must be positive and finite");
  }
  if (steps < 1) throw std::invalid_argument("time grid needs at least one step");
}

std::vector<double> ControlProtocol::controls() const {
  std::vector<double> u(v.size() + 1);
  const double dt = grid.dt();
  u[0] = u0;
  for (std::size_t k = 0; k < v.size(); ++k) u[k + 1] = u[k] + dt * v[k];
  return u;
}

double ControlProtocol::terminal_u() const {
  const double dt = grid.dt();
  double u = u0;
  for (double vk : v) u += dt * vk;
  return u;
}

void ControlProtocol::validate() const {
  grid.validate();
  if (static_cast<int>(v.size()) != grid.steps) {
    throw std::invalid_argument("control protocol has " + std::to_string(v.size()) +
                                " rates but the grid has " + std::to_string(grid.steps) +
                                " steps");
  }
  if (!std::isfinite(u0) || !std::isfinite(u_target)) {
    throw std::invalid_argument("non-finite protocol boundary value");
  }
  for (double vk : v) {
    if (!std::isfinite(vk)) throw std::invalid_argument("non-finite control rate");
  }
}

Vec4 s_vector(const Vec4& x) {
  Vec4 s;
  const double cross = 2.0 * x[0] * x[1];
  const double pop = x[0] - x[1];
  s[0] = -cross;
  s[1] = cross;
  s[2] = pop * x[2];
  s[3] = pop * x[3];
  return s;
}

Mat4 s_jacobian(const Vec4& x) {
  Mat4 j;
  j(0, 0) = -2.0 * x[1]; j(0, 1) = -2.0 * x[0];
  j(1, 0) = 2.0 * x[1];  j(1, 1) = 2.0 * x[0];
  j(2, 0) = x[2]; j(2, 1) = -x[2]; j(2, 2) = x[0] - x[1];
  j(3, 0) = x[3]; j(3, 1) = -x[3]; j(3, 3) = x[0] - x[1];
  return j;
}

GeneratorTable build_generator_table(const ModelSpec& model, std::span<const double> u,
                                     int steps, bool with_derivative) {
  GeneratorTable table;
  table.a.resize(static_cast<std::size_t>(steps));
  if (with_derivative) table.da.resize(static_cast<std::size_t>(steps));
  for (int k = 0; k < steps; ++k) {
    generator_pair(model, u[static_cast<std::size_t>(k)], table.a[static_cast<std::size_t>(k)],
                   with_derivative ? &table.da[static_cast<std::size_t>(k)] : nullptr);
  }
  return table;
}

void propagate_into(const GeneratorTable& table, std::span<const double> v, double dt,
                    const Vec4& x0, double u0, Trajectory& out) {
  const std::size_t n = v.size();
  out.u[0] = u0;
  out.x[0] = x0;
  out.y[0] = Vec4{};
  out.max_trace_dev = std::fabs(x0[0] + x0[1] - 1.0);
  out.max_y_trace_dev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Mat4& a = table.a[k];
    const Vec4& xk = out.x[k];
    const Vec4& yk = out.y[k];
    const Vec4 ax = a * xk;
    const Vec4 ay = a * yk;
    const Vec4 sk = s_vector(xk);
    Vec4 xn, yn;
    const double vk = v[k];
    for (int i = 0; i < 4; ++i) {
      xn[i] = xk[i] + dt * ax[i];
      yn[i] = yk[i] + dt * (ay[i] + vk * sk[i]);
    }
    out.x[k + 1] = xn;
    out.y[k + 1] = yn;
    out.u[k + 1] = out.u[k] + dt * vk;

    const double tr = xn[0] + xn[1];
    const double ytr = yn[0] + yn[1];
    if (!std::isfinite(tr + ytr + xn[2] + xn[3] + yn[2] + yn[3])) {
      throw DivergenceError(static_cast<int>(k),
                            "forward propagation diverged at step " + std::to_string(k));
    }
    out.max_trace_dev = std::max(out.max_trace_dev, std::fabs(tr - 1.0));
    out.max_y_trace_dev = std::max(out.max_y_trace_dev, std::fabs(ytr));
  }
}

Trajectory propagate(const ModelSpec& model, const ControlProtocol& protocol) {
  model.validate();
  protocol.validate();
  const int n = protocol.grid.steps;
  const auto u = protocol.controls();
  const auto table = build_generator_table(model, u, n, false);
  Trajectory traj;
  traj.u.resize(static_cast<std::size_t>(n) + 1);
  traj.x.resize(static_cast<std::size_t>(n) + 1);
  traj.y.resize(static_cast<std::size_t>(n) + 1);
  propagate_into(table, protocol.v, protocol.grid.dt(), gibbs_vector(model, protocol.u0),
                 protocol.u0, traj);
  return traj;
}

CostBreakdown evaluate_cost(const ModelSpec& model, const ControlProtocol& protocol,
                            const Trajectory& traj, double alpha, double kappa) {
  model.validate();
  protocol.validate();
  const std::size_t n = protocol.v.size();
  if (traj.u.size() != n + 1 || traj.x.size() != n + 1 || traj.y.size() != n + 1) {
    throw std::invalid_argument("trajectory length does not match the protocol grid");
  }
  const double dt = protocol.grid.dt();
  CostBreakdown out;
  double work = 0.0;
  double var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double gx = traj.x[k][1] - traj.x[k][0];
    const double gy = traj.y[k][1] - traj.y[k][0];
    work += dt * protocol.v[k] * gx;
    var += 2.0 * dt * protocol.v[k] * gy;
  }
  const double u_final = traj.u[n];
  out.mean_work = work;
  out.variance = var;
  out.delta_F = free_energy(model, u_final) - free_energy(model, protocol.u0);
  out.w_diss = out.mean_work - out.delta_F;
  const double miss = u_final - protocol.u_target;
  out.penalty = 0.5 * kappa * miss * miss;
  out.total_J = (1.0 - alpha) * out.w_diss + 0.5 * alpha * model.beta * out.variance + out.penalty;
  return out;
}

}  // namespace qwork
