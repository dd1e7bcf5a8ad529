#include "qwork/grape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qwork {

namespace {

constexpr Vec4 kG{{-1.0, 1.0, 0.0, 0.0}};  // vectorized sigma_z

// Shared adjoint sweep. Fills grad (size N) when non-null; fills adj arrays
// (size N+1) when non-null.
void backward_sweep(const GeneratorTable& table, std::span<const double> v,
                    const Trajectory& traj, double dt, double alpha, double beta,
                    double p_terminal, AdjointTrajectory* adj, std::vector<double>* grad) {
  const int n = static_cast<int>(v.size());
  Vec4 pi{};   // costate of x
  Vec4 la{};   // costate of y
  double p = p_terminal;
  if (adj) {
    adj->costate_x[static_cast<std::size_t>(n)] = pi;
    adj->costate_y[static_cast<std::size_t>(n)] = la;
    adj->costate_u[static_cast<std::size_t>(n)] = p;
  }
  for (int k = n - 1; k >= 0; --k) {
    const std::size_t ks = static_cast<std::size_t>(k);
    const Mat4& a = table.a[ks];
    const Mat4& da = table.da[ks];
    const Vec4& xk = traj.x[ks];
    const Vec4& yk = traj.y[ks];
    const double vk = v[ks];
    const Vec4 sk = s_vector(xk);

    if (grad) {
      (*grad)[ks] = (1.0 - alpha) * (xk[1] - xk[0]) + alpha * beta * (yk[1] - yk[0]) + p +
                    dot(la, sk);
    }

    // costate_u picks up the generator sensitivity of both linear states
    p += dt * (bilinear(pi, da, xk) + bilinear(la, da, yk));

    // J(x_k)^T costate_y[k+1]
    Vec4 jt;
    jt[0] = -2.0 * xk[1] * la[0] + 2.0 * xk[1] * la[1] + xk[2] * la[2] + xk[3] * la[3];
    jt[1] = -2.0 * xk[0] * la[0] + 2.0 * xk[0] * la[1] - xk[2] * la[2] - xk[3] * la[3];
    jt[2] = (xk[0] - xk[1]) * la[2];
    jt[3] = (xk[0] - xk[1]) * la[3];

    const Vec4 at_pi = transpose_apply(a, pi);
    const Vec4 at_la = transpose_apply(a, la);
    for (int i = 0; i < 4; ++i) {
      pi[i] += dt * (at_pi[i] + (1.0 - alpha) * vk * kG[i] + vk * jt[i]);
      la[i] += dt * (at_la[i] + alpha * beta * vk * kG[i]);
    }

    if (!all_finite(pi) || !all_finite(la) || !std::isfinite(p)) {
      throw DivergenceError(k, "adjoint propagation diverged at step " + std::to_string(k));
    }
    if (adj) {
      adj->costate_x[ks] = pi;
      adj->costate_y[ks] = la;
      adj->costate_u[ks] = p;
    }
  }
}

CostBreakdown cost_from_sums(const ModelSpec& model, std::span<const double> v, double dt,
                             const Trajectory& traj, double u0, double u_target, double alpha,
                             double kappa) {
  CostBreakdown out;
  const std::size_t n = v.size();
  double work = 0.0, var = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    work += dt * v[k] * (traj.x[k][1] - traj.x[k][0]);
    var += 2.0 * dt * v[k] * (traj.y[k][1] - traj.y[k][0]);
  }
  out.mean_work = work;
  out.variance = var;
  out.delta_F = free_energy(model, traj.u[n]) - free_energy(model, u0);
  out.w_diss = work - out.delta_F;
  const double miss = traj.u[n] - u_target;
  out.penalty = 0.5 * kappa * miss * miss;
  out.total_J = (1.0 - alpha) * out.w_diss + 0.5 * alpha * model.beta * var + out.penalty;
  return out;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (kappa < 0.0) throw std::invalid_argument("kappa must be nonnegative");
  if (!(u_bound > 0.0) || !(v_bound > 0.0)) throw std::invalid_argument("bounds must be positive");
  if (!(tol_rel_J >= 0.0)) throw std::invalid_argument("tol_rel_J must be nonnegative");
  if (record_every < 1) throw std::invalid_argument("record_every must be at least 1");
}

AdjointTrajectory backward_pass(const ModelSpec& model, const ControlProtocol& protocol,
                                const Trajectory& traj, double alpha, double kappa) {
  model.validate();
  protocol.validate();
  const int n = protocol.grid.steps;
  if (traj.u.size() != static_cast<std::size_t>(n) + 1) {
    throw std::invalid_argument("trajectory length does not match the protocol grid");
  }
  const auto table = build_generator_table(model, traj.u, n, true);
  AdjointTrajectory adj;
  adj.costate_x.resize(static_cast<std::size_t>(n) + 1);
  adj.costate_y.resize(static_cast<std::size_t>(n) + 1);
  adj.costate_u.resize(static_cast<std::size_t>(n) + 1);
  const double p_t = terminal_adjoint(model, traj.u[static_cast<std::size_t>(n)],
                                      protocol.u_target, alpha, kappa);
  backward_sweep(table, protocol.v, traj, protocol.grid.dt(), alpha, model.beta, p_t, &adj,
                 nullptr);
  return adj;
}

std::vector<double> control_gradient(const ModelSpec& model, const ControlProtocol& protocol,
                                     const Trajectory& traj, const AdjointTrajectory& adj,
                                     double alpha) {
  const std::size_t n = protocol.v.size();
  if (adj.costate_u.size() != n + 1 || traj.x.size() != n + 1) {
    throw std::invalid_argument("adjoint length does not match the protocol grid");
  }
  std::vector<double> grad(n);
  for (std::size_t k = 0; k < n; ++k) {
    grad[k] = (1.0 - alpha) * (traj.x[k][1] - traj.x[k][0]) +
              alpha * model.beta * (traj.y[k][1] - traj.y[k][0]) + adj.costate_u[k + 1] +
              dot(adj.costate_y[k + 1], s_vector(traj.x[k]));
  }
  return grad;
}

OptimizeResult optimize(const ModelSpec& model, const TimeGrid& grid, double u0,
                        double u_target, const OptimizerConfig& config) {
  model.validate();
  grid.validate();
  config.validate();
  const int n = grid.steps;
  const std::size_t ns = static_cast<std::size_t>(n);
  const double dt = grid.dt();
  const double beta = model.beta;

  std::vector<double> v(ns, (u_target - u0) / grid.horizon);
  std::vector<double> best_v = v;
  std::vector<double> grad(ns);
  const Vec4 x0 = gibbs_vector(model, u0);

  Trajectory traj;
  traj.u.resize(ns + 1);
  traj.x.resize(ns + 1);
  traj.y.resize(ns + 1);

  GeneratorTable table;
  table.a.resize(ns);
  table.da.resize(ns);

  OptimizeResult result;
  double best_j = std::numeric_limits<double>::infinity();
  double window_j = std::numeric_limits<double>::infinity();
  long it = 0;

  try {
    for (it = 0; it < config.max_iters; ++it) {
      // rebuild u and the per-step generators for the current iterate
      double u = u0;
      for (std::size_t k = 0; k < ns; ++k) {
        generator_pair(model, u, table.a[k], &table.da[k]);
        traj.u[k] = u;  // scratch; propagate_into overwrites consistently
        u += dt * v[k];
      }
      propagate_into(table, v, dt, x0, u0, traj);
      result.max_trace_dev = std::max(result.max_trace_dev, traj.max_trace_dev);
      result.max_y_trace_dev = std::max(result.max_y_trace_dev, traj.max_y_trace_dev);

      const CostBreakdown cost =
          cost_from_sums(model, v, dt, traj, u0, u_target, config.alpha, config.kappa);
      if (cost.total_J < best_j) {
        best_j = cost.total_J;
        best_v = v;
      }
      if (it % config.record_every == 0) {
        result.cost_history.emplace_back(it, cost.total_J);
      }
      if (it % 100 == 0) {
        if (std::isfinite(window_j) &&
            std::fabs(cost.total_J - window_j) <=
                config.tol_rel_J * std::max(std::fabs(window_j), 1e-12)) {
          result.converged = true;
          break;
        }
        window_j = cost.total_J;
      }

      const double p_t =
          terminal_adjoint(model, traj.u[ns], u_target, config.alpha, config.kappa);
      backward_sweep(table, v, traj, dt, config.alpha, beta, p_t, nullptr, &grad);

      for (std::size_t k = 0; k < ns; ++k) {
        v[k] = std::clamp(v[k] - config.eta * grad[k], -config.v_bound, config.v_bound);
      }
      // walk u through its box, shrinking any step that would leave it
      double uw = u0;
      for (std::size_t k = 0; k < ns; ++k) {
        double un = uw + dt * v[k];
        if (un > config.u_bound) {
          v[k] = (config.u_bound - uw) / dt;
          un = config.u_bound;
        } else if (un < -config.u_bound) {
          v[k] = (-config.u_bound - uw) / dt;
          un = -config.u_bound;
        }
        uw = un;
      }
    }
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.step, std::string(e.what()) + " (iteration " + std::to_string(it) +
                                      ")");
  }

  result.iterations_run = std::min(it, config.max_iters);

  // return the best-seen protocol, re-evaluated
  result.protocol.grid = grid;
  result.protocol.u0 = u0;
  result.protocol.u_target = u_target;
  result.protocol.v = std::move(best_v);
  result.trajectory = propagate(model, result.protocol);
  result.cost =
      evaluate_cost(model, result.protocol, result.trajectory, config.alpha, config.kappa);
  if (result.cost_history.empty() ||
      result.cost_history.back().first != result.iterations_run) {
    result.cost_history.emplace_back(result.iterations_run, result.cost.total_J);
  }
  return result;
}

std::vector<ParetoPoint> sweep_alpha(
    const ModelSpec& model, const TimeGrid& grid, double u0, double u_target,
    const OptimizerConfig& base_config, const std::vector<double>& alphas, int workers,
    const std::function<void(std::size_t, const OptimizeResult&)>& on_point) {
  for (double a : alphas) {
    if (a < 0.0 || a > 1.0) throw std::invalid_argument("sweep alpha outside [0, 1]");
  }
  std::vector<ParetoPoint> points(alphas.size());
  std::atomic<std::size_t> next{0};

  auto run_point = [&](std::size_t i) {
    ParetoPoint& pt = points[i];
    pt.alpha = alphas[i];
    try {
      OptimizerConfig cfg = base_config;
      cfg.alpha = alphas[i];
      const OptimizeResult res = optimize(model, grid, u0, u_target, cfg);
      pt.w_diss = res.cost.w_diss;
      pt.beta_variance = model.beta * res.cost.variance;
      pt.total_J = res.cost.total_J;
      pt.iterations = res.iterations_run;
      pt.converged = res.converged;
      if (on_point) on_point(i, res);
    } catch (const DivergenceError&) {
      pt.w_diss = std::numeric_limits<double>::quiet_NaN();
      pt.beta_variance = std::numeric_limits<double>::quiet_NaN();
      pt.total_J = std::numeric_limits<double>::quiet_NaN();
      pt.converged = false;
    }
  };

  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(alphas.size())));
  if (nw == 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) run_point(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < alphas.size(); i = next.fetch_add(1)) {
          run_point(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return points;
}

std::vector<ParetoPoint> pareto_filter(const std::vector<ParetoPoint>& points) {
  std::vector<ParetoPoint> kept;
  for (const auto& p : points) {
    if (!std::isfinite(p.w_diss) || !std::isfinite(p.beta_variance)) continue;
    bool dominated = false;
    for (const auto& q : points) {
      if (!std::isfinite(q.w_diss) || !std::isfinite(q.beta_variance)) continue;
      if (q.w_diss <= p.w_diss && q.beta_variance <= p.beta_variance &&
          (q.w_diss < p.w_diss || q.beta_variance < p.beta_variance)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(p);
  }
  return kept;
}

}  // namespace qwork
