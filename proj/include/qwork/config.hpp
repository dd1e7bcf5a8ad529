#pragma once

#include "qwork/grape.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qwork {

// Flat key=value run description. Unknown keys are rejected. Sweep lists
// accept either comma-separated values or start:step:end ranges.
struct RunConfig {
  ModelSpec model;
  TimeGrid grid;
  double u0 = 0.0;
  double u_target = 0.0;
  OptimizerConfig optimizer;
  std::vector<double> alphas;
  std::vector<double> betas;
  std::filesystem::path output_dir;
  int workers = 1;

  // validation thresholds
  double fd_tol = 1e-6;
  double variance_tol = 1e-12;
  double trace_tol = 1e-10;

  // rapid-drive extras
  std::optional<double> plateau;
  std::optional<std::filesystem::path> protocol_csv;

  bool has_model = false;
  bool has_u0 = false;
  bool has_u_target = false;
  bool has_horizon = false;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

std::vector<double> parse_value_list(const std::string& text);

}  // namespace qwork
