#include "qwork/commands.hpp"
#include "qwork/config.hpp"
#include "qwork/deterministic.hpp"
#include "qwork/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <doctest.h>

using namespace qwork;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qwork_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig spin_boson_config(const std::filesystem::path& out) {
  RunConfig cfg = parse_config_text(
      "model = spin_boson\ndelta = 0\nbeta = 1\nT = 1\nu0 = 0\nu_target = 1\n"
      "alpha = 0\nkappa = 10\neta = 0.01\nmax_iters = 400\n");
  cfg.output_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing fills defaults and rejects unknown keys") {
  const RunConfig cfg = parse_config_text(
      "# comment\nmodel = spin_boson\nbeta = 1\nT = 2\nu0 = 0\nu_target = 1\n");
  CHECK(cfg.model.kind == ModelKind::SpinBoson);
  CHECK(cfg.grid.steps == 2000);  // 1000 per unit time
  CHECK(cfg.grid.horizon == 2.0);
  CHECK(cfg.optimizer.eta == doctest::Approx(0.005).epsilon(1e-15));  // 0.01 / T
  CHECK(cfg.optimizer.kappa == 10.0);
  CHECK(cfg.optimizer.max_iters == 1000000);

  try {
    parse_config_text("model = spin_boson\nfoo = 1\n");
    FAIL("unknown key accepted");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("model = lattice\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("beta = fast\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("just a line\n"), std::invalid_argument);
}

TEST_CASE("value lists support ranges and comma lists") {
  const auto ramp = parse_value_list("0:0.05:1");
  REQUIRE(ramp.size() == 21);
  CHECK(ramp.front() == 0.0);
  CHECK(ramp.back() == doctest::Approx(1.0).epsilon(1e-12));
  const auto list = parse_value_list("0.5, 1, 2, 3");
  REQUIRE(list.size() == 4);
  CHECK(list[2] == 2.0);
  CHECK(parse_value_list("").empty());
  CHECK_THROWS_AS(parse_value_list("0:0:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_value_list("1:0.1:0"), std::invalid_argument);
}

TEST_CASE("doubles round-trip through the 17-digit format") {
  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const double v = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.next() % 64) - 32);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("protocol CSV round trip preserves the cost to full precision") {
  const ModelSpec m = spin_boson(0.0, 1.0);
  const ControlProtocol protocol = noisy_ramp_protocol(TimeGrid{1.0, 300}, 0.0, 1.0, 2.0, 11);
  const Trajectory traj = propagate(m, protocol);
  const CostBreakdown cost = evaluate_cost(m, protocol, traj, 0.3, 10.0);

  const auto dir = fresh_dir("roundtrip");
  write_protocol_csv(dir / "protocol.csv", protocol);
  const ControlProtocol back = read_protocol_csv(dir / "protocol.csv", protocol.u_target);
  REQUIRE(back.v.size() == protocol.v.size());
  CHECK(back.grid.steps == protocol.grid.steps);
  CHECK(back.u0 == protocol.u0);

  const Trajectory traj2 = propagate(m, back);
  const CostBreakdown cost2 = evaluate_cost(m, back, traj2, 0.3, 10.0);
  CHECK(std::fabs(cost2.total_J - cost.total_J) <=
        1e-10 * std::max(1.0, std::fabs(cost.total_J)));
  CHECK(cost2.w_diss == doctest::Approx(cost.w_diss).epsilon(1e-10));
  CHECK(cost2.variance == doctest::Approx(cost.variance).epsilon(1e-10));
}

TEST_CASE("trajectory CSV carries the exact column set") {
  const ModelSpec m = quantum_dot(1.0, 1.0);
  const ControlProtocol protocol = noisy_ramp_protocol(TimeGrid{1.0, 50}, 2.0, -2.0, 1.0, 9);
  const Trajectory traj = propagate(m, protocol);
  const auto dir = fresh_dir("trajcsv");
  write_trajectory_csv(dir / "trajectory.csv", protocol.grid, traj);
  const std::string text = slurp(dir / "trajectory.csv");
  CHECK(text.rfind("t,u,x1,x2,x3,x4,y1,y2,y3,y4\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : text) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 52);  // header + N + 1 grid points
}

TEST_CASE("cmd_optimize writes the full artifact set") {
  const auto dir = fresh_dir("cmd_optimize");
  const RunConfig cfg = spin_boson_config(dir);
  CHECK(cmd_optimize(cfg) == kExitOk);
  for (const char* name : {"protocol.csv", "trajectory.csv", "summary.json", "cost_history.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  const std::string summary = slurp(dir / "summary.json");
  for (const char* field :
       {"mean_work", "delta_F", "w_diss", "variance", "penalty", "total_J", "iterations",
        "converged"}) {
    CHECK(summary.find(field) != std::string::npos);
  }
}

TEST_CASE("cmd_optimize is byte-deterministic") {
  const auto dir1 = fresh_dir("det1");
  const auto dir2 = fresh_dir("det2");
  CHECK(cmd_optimize(spin_boson_config(dir1)) == kExitOk);
  CHECK(cmd_optimize(spin_boson_config(dir2)) == kExitOk);
  for (const char* name : {"protocol.csv", "trajectory.csv", "cost_history.csv", "summary.json"}) {
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }
}

TEST_CASE("cmd_optimize requires its inputs") {
  RunConfig cfg = parse_config_text("model = spin_boson\nbeta = 1\nT = 1\n");
  cfg.output_dir = fresh_dir("missing_inputs");
  CHECK_THROWS_AS(cmd_optimize(cfg), std::invalid_argument);
}

TEST_CASE("cmd_sweep writes per-point directories and the front file") {
  const auto dir = fresh_dir("cmd_sweep");
  RunConfig cfg = spin_boson_config(dir);
  cfg.optimizer.max_iters = 30000;
  cfg.optimizer.tol_rel_J = 1e-5;
  cfg.alphas = {0.0, 0.5, 1.0};
  CHECK(cmd_sweep(cfg) == kExitOk);
  for (const char* sub : {"alpha_0.000", "alpha_0.500", "alpha_1.000"}) {
    CHECK(std::filesystem::exists(dir / sub / "protocol.csv"));
    CHECK(std::filesystem::exists(dir / sub / "summary.json"));
  }
  const std::string front = slurp(dir / "front.csv");
  CHECK(front.rfind("alpha,w_diss,beta_variance,total_J,iterations,converged\n", 0) == 0);
  std::size_t rows = 0;
  for (char c : front) rows += c == '\n' ? 1 : 0;
  CHECK(rows == 4);
}

TEST_CASE("cmd_sweep needs a sweep axis") {
  const auto dir = fresh_dir("cmd_sweep_empty");
  RunConfig cfg = spin_boson_config(dir);
  CHECK_THROWS_AS(cmd_sweep(cfg), std::invalid_argument);
  cfg.alphas = {0.5};
  cfg.betas = {1.0};
  CHECK_THROWS_AS(cmd_sweep(cfg), std::invalid_argument);
}

TEST_CASE("cmd_sweep over beta writes the beta front") {
  const auto dir = fresh_dir("cmd_sweep_beta");
  RunConfig cfg = parse_config_text(
      "model = quantum_dot\ngamma = 1\nbeta = 1\nT = 1\nN = 200\nu0 = 2\nu_target = -2\n"
      "alpha = 1\nmax_iters = 30000\ntol_rel_J = 1e-5\neta = 0.01\n");
  cfg.output_dir = dir;
  cfg.betas = {0.5, 1.0};
  CHECK(cmd_sweep(cfg) == kExitOk);
  CHECK(std::filesystem::exists(dir / "beta_0.500" / "protocol.csv"));
  CHECK(std::filesystem::exists(dir / "beta_1.000" / "protocol.csv"));
  const std::string front = slurp(dir / "beta_front.csv");
  CHECK(front.rfind("beta,w_diss,beta_variance,total_J,iterations,converged\n", 0) == 0);
}

TEST_CASE("cmd_rapid_drive emits the jump solution and comparison") {
  const auto dir = fresh_dir("cmd_rapid");
  RunConfig cfg = parse_config_text(
      "model = spin_boson\ndelta = 0\nbeta = 1\nT = 1\nN = 1000\nu0 = 0\nu_target = 1\n");
  cfg.output_dir = dir;
  CHECK(cmd_rapid_drive(cfg) == kExitOk);
  const std::string json = slurp(dir / "rapid_drive.json");
  CHECK(json.find("\"zeta\": 0.75") != std::string::npos);
  CHECK(json.find("lambda_jump") != std::string::npos);
  CHECK(json.find("\"alt_zeta_candidate_is_stationary\": false") != std::string::npos);
  const std::string cmp = slurp(dir / "comparison.csv");
  CHECK(cmp.rfind("quantity,rapid_drive,propagated\n", 0) == 0);
}

TEST_CASE("cmd_validate passes on defaults and honors threshold overrides") {
  const auto dir = fresh_dir("cmd_validate");
  RunConfig cfg;
  cfg.output_dir = dir;
  CHECK(cmd_validate(cfg) == kExitOk);
  const std::string report = slurp(dir / "validation_report.json");
  CHECK(report.find("gradient_fd_max_rel") != std::string::npos);
  CHECK(report.find("variance_identity_max_rel") != std::string::npos);
  CHECK(report.find("\"all_pass\": true") != std::string::npos);
  CHECK(report.find("alt_zeta_candidate") != std::string::npos);

  RunConfig strict;
  strict.variance_tol = 0.0;  // unachievable on purpose
  CHECK(cmd_validate(strict) == kExitValidationFailed);
}
