#include "qwork/commands.hpp"

#include "qwork/deterministic.hpp"
#include "qwork/io.hpp"
#include "qwork/rapid_drive.hpp"
#include "qwork/validation.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <thread>

#include <json.hpp>

namespace qwork {

namespace {

using nlohmann::ordered_json;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_run_inputs(const RunConfig& cfg, bool need_out) {
  require(cfg.has_model, "config must set model");
  require(cfg.has_u0, "config must set u0");
  require(cfg.has_u_target, "config must set u_target");
  require(cfg.has_horizon, "config must set T");
  if (need_out) require(!cfg.output_dir.empty(), "an output directory is required (--out)");
  cfg.model.validate();
  cfg.grid.validate();
  cfg.optimizer.validate();
}

void write_point_outputs(const std::filesystem::path& dir, const OptimizeResult& res,
                         double alpha) {
  std::filesystem::create_directories(dir);
  write_protocol_csv(dir / "protocol.csv", res.protocol);
  write_trajectory_csv(dir / "trajectory.csv", res.protocol.grid, res.trajectory);
  write_cost_history_csv(dir / "cost_history.csv", res.cost_history);
  write_summary_json(dir / "summary.json", res.cost, res.iterations_run, res.converged, alpha);
}

std::string point_dir_name(const char* prefix, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%.3f", prefix, value);
  return buf;
}

struct CheckTable {
  ordered_json checks = ordered_json::object();
  bool all_pass = true;

  void add(const std::string& name, double value, double threshold) {
    const bool pass = std::isfinite(value) && value <= threshold;
    checks[name] = {{"value", value}, {"threshold", threshold}, {"pass", pass}};
    all_pass = all_pass && pass;
  }
};

}  // namespace

int cmd_optimize(const RunConfig& cfg) {
  require_run_inputs(cfg, true);
  const OptimizeResult res =
      optimize(cfg.model, cfg.grid, cfg.u0, cfg.u_target, cfg.optimizer);
  write_point_outputs(cfg.output_dir, res, cfg.optimizer.alpha);
  std::cout << "optimize: J=" << format_double(res.cost.total_J)
            << " w_diss=" << format_double(res.cost.w_diss)
            << " variance=" << format_double(res.cost.variance)
            << " iterations=" << res.iterations_run
            << " converged=" << (res.converged ? 1 : 0) << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  require_run_inputs(cfg, true);
  const bool with_alphas = !cfg.alphas.empty();
  const bool with_betas = !cfg.betas.empty();
  require(with_alphas || with_betas, "sweep needs a non-empty alphas or betas list");
  require(!(with_alphas && with_betas), "sweep takes alphas or betas, not both");
  std::filesystem::create_directories(cfg.output_dir);

  std::vector<ParetoPoint> points;
  if (with_alphas) {
    points = sweep_alpha(cfg.model, cfg.grid, cfg.u0, cfg.u_target, cfg.optimizer, cfg.alphas,
                         cfg.workers, [&](std::size_t i, const OptimizeResult& res) {
                           write_point_outputs(
                               cfg.output_dir / point_dir_name("alpha", cfg.alphas[i]), res,
                               cfg.alphas[i]);
                         });
    write_front_csv(cfg.output_dir / "front.csv", points, cfg.alphas, "alpha");
  } else {
    points.resize(cfg.betas.size());
    std::atomic<std::size_t> next{0};
    auto run_point = [&](std::size_t i) {
      ParetoPoint& pt = points[i];
      pt.alpha = cfg.optimizer.alpha;
      try {
        ModelSpec model = cfg.model;
        model.beta = cfg.betas[i];
        const OptimizeResult res = optimize(model, cfg.grid, cfg.u0, cfg.u_target, cfg.optimizer);
        pt.w_diss = res.cost.w_diss;
        pt.beta_variance = model.beta * res.cost.variance;
        pt.total_J = res.cost.total_J;
        pt.iterations = res.iterations_run;
        pt.converged = res.converged;
        write_point_outputs(cfg.output_dir / point_dir_name("beta", cfg.betas[i]), res,
                            cfg.optimizer.alpha);
      } catch (const DivergenceError&) {
        pt.w_diss = pt.beta_variance = pt.total_J = std::numeric_limits<double>::quiet_NaN();
        pt.converged = false;
      }
    };
    const int nw = std::max(1, std::min<int>(cfg.workers, static_cast<int>(cfg.betas.size())));
    if (nw == 1) {
      for (std::size_t i = 0; i < cfg.betas.size(); ++i) run_point(i);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < cfg.betas.size(); i = next.fetch_add(1)) {
            run_point(i);
          }
        });
      }
      for (auto& t : pool) t.join();
    }
    write_front_csv(cfg.output_dir / "beta_front.csv", points, cfg.betas, "beta");
  }

  int converged = 0;
  for (const auto& p : points) converged += p.converged ? 1 : 0;
  std::cout << "sweep: " << points.size() << " points, " << converged << " converged\n";
  return converged >= 1 ? kExitOk : kExitNoConvergedPoint;
}

int cmd_rapid_drive(const RunConfig& cfg) {
  require(cfg.has_model, "config must set model");
  require(cfg.has_u_target, "config must set u_target");
  require(cfg.has_horizon, "config must set T");
  require(!cfg.output_dir.empty(), "an output directory is required (--out)");
  cfg.model.validate();
  cfg.grid.validate();
  const double u0 = cfg.has_u0 ? cfg.u0 : 0.0;

  const RapidDriveSolution sol =
      optimal_jumps(cfg.model, cfg.u_target, cfg.model.beta, cfg.grid.horizon);
  const double plateau = cfg.plateau.value_or(sol.zeta);
  const bool closed_form = cfg.model.kind == ModelKind::SpinBoson && cfg.model.delta == 0.0;

  // the protocol whose short-horizon cost is compared against exact propagation
  ControlProtocol protocol;
  if (cfg.protocol_csv) {
    protocol = read_protocol_csv(*cfg.protocol_csv, cfg.u_target);
  } else {
    protocol.grid = cfg.grid;
    protocol.u0 = u0;
    protocol.u_target = cfg.u_target;
    protocol.v.assign(static_cast<std::size_t>(cfg.grid.steps), 0.0);
    const double dt = cfg.grid.dt();
    protocol.v.front() = (plateau - u0) / dt;
    protocol.v.back() += (cfg.u_target - plateau) / dt;
  }

  const auto u_path = protocol.controls();
  const auto [w_rapid, var_rapid] =
      rapid_cost(cfg.model, protocol.grid, u_path, protocol.u0, cfg.u_target);
  const Trajectory traj = propagate(cfg.model, protocol);
  const CostBreakdown exact = evaluate_cost(cfg.model, protocol, traj, 0.0, 0.0);

  const double zeta_res =
      dissipation_stationarity_residual(cfg.model, cfg.u_target, cfg.model.beta, sol.zeta);
  const double lambda_res =
      fluctuation_stationarity_residual(cfg.model, cfg.u_target, cfg.model.beta, sol.lambda_jump);
  // a jump level sometimes quoted at 0.6 u_T fails the stationarity condition;
  // report it next to the solution so downstream tooling sees the discrepancy
  const double alt = 0.6 * cfg.u_target;
  const double alt_res =
      dissipation_stationarity_residual(cfg.model, cfg.u_target, cfg.model.beta, alt);

  ordered_json j;
  j["zeta"] = sol.zeta;
  j["lambda_jump"] = sol.lambda_jump;
  j["w_diss_at_zeta"] = sol.w_diss_at;
  j["variance_at_lambda"] = sol.variance_at;
  j["zeta_stationarity_residual"] = zeta_res;
  j["lambda_stationarity_residual"] = lambda_res;
  j["alt_zeta_candidate"] = alt;
  j["alt_zeta_candidate_residual"] = alt_res;
  j["alt_zeta_candidate_is_stationary"] = std::fabs(alt_res) < 1e-8;
  j["plateau_used"] = plateau;
  j["closed_form_model"] = closed_form;
  j["extrapolated"] = !closed_form;
  write_text_file(cfg.output_dir / "rapid_drive.json", j.dump(2) + "\n");

  std::string csv = "quantity,rapid_drive,propagated\n";
  csv += "w_diss," + format_double(w_rapid) + ',' + format_double(exact.w_diss) + '\n';
  csv += "variance," + format_double(var_rapid) + ',' + format_double(exact.variance) + '\n';
  write_text_file(cfg.output_dir / "comparison.csv", csv);

  std::cout << "rapid-drive: zeta=" << format_double(sol.zeta)
            << " lambda=" << format_double(sol.lambda_jump)
            << " w_diss(plateau)=" << format_double(w_rapid)
            << " variance(plateau)=" << format_double(var_rapid)
            << (closed_form ? "" : " [extrapolated]") << '\n';
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg) {
  CheckTable table;

  const ModelSpec sb0 = spin_boson(0.0, 1.0);
  const ModelSpec sb1 = spin_boson(1.0, 1.0);
  const ModelSpec dot = quantum_dot(1.0, 1.0);
  const std::vector<ModelSpec> models = {sb0, sb1, dot};

  // generator structure across the control box
  double trace_max = 0.0, stationarity_max = 0.0, deriv_max = 0.0;
  for (const auto& model : models) {
    for (int i = 0; i <= 64; ++i) {
      const double u = -8.0 + 16.0 * i / 64.0;
      const Mat4 a = generator(model, u);
      for (int c = 0; c < 4; ++c) {
        trace_max = std::max(trace_max, std::fabs(a(0, c) + a(1, c)));
      }
      stationarity_max = std::max(stationarity_max, max_abs(a * gibbs_vector(model, u)));
      if (std::fabs(u) > 1e-3 || model.delta != 0.0) {
        const double h = 1e-5;
        const Mat4 fd = (1.0 / (2.0 * h)) * (generator(model, u + h) - generator(model, u - h));
        const Mat4 da = generator_derivative(model, u);
        const double scale = std::max(max_abs(fd), 1.0);
        deriv_max = std::max(deriv_max, max_abs(da - fd) / scale);
      }
    }
  }
  table.add("generator_trace_annihilation_max", trace_max, 1e-14);
  table.add("gibbs_stationarity_max", stationarity_max, 1e-12);
  table.add("generator_derivative_fd_max_rel", deriv_max, 1e-6);

  // adjoint gradient against central differences of the discrete cost
  double grad_max = 0.0;
  {
    const TimeGrid grid{1.0, 100};
    std::uint64_t seed = 11;
    for (const auto& model : {sb1, dot}) {
      const double u0 = model.kind == ModelKind::QuantumDot ? 2.0 : 0.0;
      const double u_target = model.kind == ModelKind::QuantumDot ? -2.0 : 1.0;
      for (double alpha : {0.0, 0.5, 1.0}) {
        const ControlProtocol protocol =
            noisy_ramp_protocol(grid, u0, u_target, 2.0, seed++);
        const Trajectory traj = propagate(model, protocol);
        const AdjointTrajectory adj = backward_pass(model, protocol, traj, alpha, 10.0);
        const auto grad = control_gradient(model, protocol, traj, adj, alpha);
        OptimizerConfig oc;
        oc.alpha = alpha;
        SplitMix64 pick(seed * 977);
        std::vector<int> indices;
        for (int i = 0; i < 20; ++i) {
          indices.push_back(static_cast<int>(pick.next() % static_cast<std::uint64_t>(grid.steps)));
        }
        const auto fd =
            finite_difference_gradient(model, grid, u0, u_target, oc, protocol, 1e-6, indices);
        for (std::size_t i = 0; i < indices.size(); ++i) {
          const double rel = std::fabs(grad[static_cast<std::size_t>(indices[i])] - fd[i]) /
                             (std::fabs(fd[i]) + 1e-12);
          grad_max = std::max(grad_max, rel);
        }
      }
    }
  }
  table.add("gradient_fd_max_rel", grad_max, cfg.fd_tol);

  // auxiliary-state variance against the unrolled double sum
  double var_max = 0.0, trace_dev_max = 0.0, y_trace_dev_max = 0.0;
  {
    const TimeGrid grid{1.0, 200};
    std::uint64_t seed = 101;
    for (const auto& model : models) {
      const double u0 = model.kind == ModelKind::QuantumDot ? 2.0 : 0.0;
      const double u_target = model.kind == ModelKind::QuantumDot ? -2.0 : 1.0;
      const ControlProtocol protocol = noisy_ramp_protocol(grid, u0, u_target, 3.0, seed++);
      const Trajectory traj = propagate(model, protocol);
      const CostBreakdown cost = evaluate_cost(model, protocol, traj, 0.5, 10.0);
      const double oracle = variance_double_sum(model, protocol, traj);
      var_max = std::max(var_max, std::fabs(cost.variance - oracle) /
                                      std::max(std::fabs(oracle), 1e-300));
      trace_dev_max = std::max(trace_dev_max, traj.max_trace_dev);
      y_trace_dev_max = std::max(y_trace_dev_max, traj.max_y_trace_dev);
    }
  }
  table.add("variance_identity_max_rel", var_max, cfg.variance_tol);
  table.add("trace_conservation_max", trace_dev_max, cfg.trace_tol);
  table.add("y_trace_max", y_trace_dev_max, cfg.trace_tol);

  // rapid-drive closed forms and jump conditions
  double rgb_max = 0.0;
  {
    const Vec4 pi0 = gibbs_vector(sb0, 0.0);
    for (int i = 0; i <= 40; ++i) {
      const double u = 0.1 + (2.0 - 0.1) * i / 40.0;
      const RgbCoefficients c = rgb_coefficients(sb0, u, pi0);
      const double r_exact = -u * u * u;
      const double b_exact = -2.0 * u * u * u / std::tanh(u);
      rgb_max = std::max(rgb_max, std::fabs(c.r - r_exact));
      rgb_max = std::max(rgb_max, std::fabs(c.g));
      rgb_max = std::max(rgb_max, std::fabs(c.b - b_exact));
    }
  }
  table.add("rgb_closed_form_max_abs", rgb_max, 1e-10);

  const RapidDriveSolution sol = optimal_jumps(sb0, 1.0, 1.0, 1.0);
  table.add("zeta_stationarity_residual",
            std::fabs(dissipation_stationarity_residual(sb0, 1.0, 1.0, sol.zeta)), 1e-8);
  table.add("lambda_stationarity_residual",
            std::fabs(fluctuation_stationarity_residual(sb0, 1.0, 1.0, sol.lambda_jump)), 1e-8);

  const double alt_res = dissipation_stationarity_residual(sb0, 1.0, 1.0, 0.6);

  ordered_json report;
  report["checks"] = table.checks;
  report["zeta_flag"] = {
      {"zeta", sol.zeta},
      {"alt_zeta_candidate", 0.6},
      {"alt_zeta_candidate_residual", alt_res},
      {"alt_zeta_candidate_is_stationary", std::fabs(alt_res) < 1e-8},
  };
  report["all_pass"] = table.all_pass;

  const std::string text = report.dump(2) + "\n";
  if (!cfg.output_dir.empty()) {
    write_text_file(cfg.output_dir / "validation_report.json", text);
  }
  std::cout << text;
  return table.all_pass ? kExitOk : kExitValidationFailed;
}

}  // namespace qwork
