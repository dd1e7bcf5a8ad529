#include "qwork/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qwork {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' has a non-numeric value '" + value +
                                "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' has a non-integer value '" + value +
                                "'");
  }
}

}  // namespace

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  const auto c1 = t.find(':');
  if (c1 != std::string::npos) {
    const auto c2 = t.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::invalid_argument("range value '" + t + "' must be start:step:end");
    }
    const double start = parse_double("range", trim(t.substr(0, c1)));
    const double step = parse_double("range", trim(t.substr(c1 + 1, c2 - c1 - 1)));
    const double end = parse_double("range", trim(t.substr(c2 + 1)));
    if (step == 0.0 || (end - start) * step < 0.0) {
      throw std::invalid_argument("range '" + t + "' never reaches its end");
    }
    const long count = std::lround(std::floor((end - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string v = trim(item);
    if (!v.empty()) out.push_back(parse_double("list", v));
  }
  return out;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  bool has_steps = false;
  bool has_eta = false;

  std::stringstream stream(text);
  std::string line;
  int lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not key=value: '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "model") {
      if (value == "spin_boson") {
        cfg.model.kind = ModelKind::SpinBoson;
      } else if (value == "quantum_dot") {
        cfg.model.kind = ModelKind::QuantumDot;
        cfg.model.delta = 0.0;
      } else {
        throw std::invalid_argument("unknown model '" + value +
                                    "' (expected spin_boson or quantum_dot)");
      }
      cfg.has_model = true;
    } else if (key == "delta") {
      cfg.model.delta = parse_double(key, value);
    } else if (key == "k") {
      cfg.model.k = parse_double(key, value);
    } else if (key == "gamma") {
      cfg.model.gamma_tunnel = parse_double(key, value);
    } else if (key == "beta") {
      cfg.model.beta = parse_double(key, value);
    } else if (key == "T") {
      cfg.grid.horizon = parse_double(key, value);
      cfg.has_horizon = true;
    } else if (key == "N") {
      cfg.grid.steps = static_cast<int>(parse_long(key, value));
      has_steps = true;
    } else if (key == "u0") {
      cfg.u0 = parse_double(key, value);
      cfg.has_u0 = true;
    } else if (key == "u_target") {
      cfg.u_target = parse_double(key, value);
      cfg.has_u_target = true;
    } else if (key == "alpha") {
      cfg.optimizer.alpha = parse_double(key, value);
    } else if (key == "kappa") {
      cfg.optimizer.kappa = parse_double(key, value);
    } else if (key == "eta") {
      cfg.optimizer.eta = parse_double(key, value);
      has_eta = true;
    } else if (key == "max_iters") {
      cfg.optimizer.max_iters = parse_long(key, value);
    } else if (key == "tol_rel_J") {
      cfg.optimizer.tol_rel_J = parse_double(key, value);
    } else if (key == "record_every") {
      cfg.optimizer.record_every = static_cast<int>(parse_long(key, value));
    } else if (key == "u_bound") {
      cfg.optimizer.u_bound = parse_double(key, value);
    } else if (key == "v_bound") {
      cfg.optimizer.v_bound = parse_double(key, value);
    } else if (key == "alphas") {
      cfg.alphas = parse_value_list(value);
    } else if (key == "betas") {
      cfg.betas = parse_value_list(value);
    } else if (key == "out_dir") {
      cfg.output_dir = value;
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_long(key, value));
    } else if (key == "fd_tol") {
      cfg.fd_tol = parse_double(key, value);
    } else if (key == "variance_tol") {
      cfg.variance_tol = parse_double(key, value);
    } else if (key == "trace_tol") {
      cfg.trace_tol = parse_double(key, value);
    } else if (key == "plateau") {
      cfg.plateau = parse_double(key, value);
    } else if (key == "protocol_csv") {
      cfg.protocol_csv = std::filesystem::path(value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }

  if (!has_steps) {
    cfg.grid.steps = std::max(1, static_cast<int>(std::lround(1000.0 * cfg.grid.horizon)));
  }
  if (!has_eta) {
    cfg.optimizer.eta = 0.01 / cfg.grid.horizon;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path.string() + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace qwork
