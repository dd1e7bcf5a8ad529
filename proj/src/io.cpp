#include "qwork/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qwork {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // fixed newlines on every platform
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_protocol_csv(const std::filesystem::path& path, const ControlProtocol& protocol) {
  auto out = open_out(path);
  out << "t,u,v\n";
  const double dt = protocol.grid.dt();
  const auto u = protocol.controls();
  const std::size_t n = protocol.v.size();
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double v = k < n ? protocol.v[k] : protocol.v[n - 1];
    out << format_double(t) << ',' << format_double(u[k]) << ',' << format_double(v) << '\n';
  }
}

ControlProtocol read_protocol_csv(const std::filesystem::path& path, double u_target) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"t", "u", "v"}) {
    throw std::runtime_error("'" + path.string() + "' is not a protocol CSV (want header t,u,v)");
  }
  std::vector<double> t, u, v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw std::runtime_error("malformed protocol row: '" + line + "'");
    t.push_back(std::stod(cells[0]));
    u.push_back(std::stod(cells[1]));
    v.push_back(std::stod(cells[2]));
  }
  if (t.size() < 2) throw std::runtime_error("protocol CSV needs at least two rows");
  ControlProtocol protocol;
  protocol.grid.steps = static_cast<int>(t.size()) - 1;
  protocol.grid.horizon = t.back();
  protocol.u0 = u.front();
  protocol.u_target = u_target;
  v.pop_back();  // final row repeats the last rate
  protocol.v = std::move(v);
  protocol.validate();
  return protocol;
}

void write_trajectory_csv(const std::filesystem::path& path, const TimeGrid& grid,
                          const Trajectory& traj) {
  auto out = open_out(path);
  out << "t,u,x1,x2,x3,x4,y1,y2,y3,y4\n";
  const double dt = grid.dt();
  for (std::size_t k = 0; k < traj.u.size(); ++k) {
    out << format_double(static_cast<double>(k) * dt) << ',' << format_double(traj.u[k]);
    for (int i = 0; i < 4; ++i) out << ',' << format_double(traj.x[k][i]);
    for (int i = 0; i < 4; ++i) out << ',' << format_double(traj.y[k][i]);
    out << '\n';
  }
}

void write_cost_history_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<long, double>>& history) {
  auto out = open_out(path);
  out << "iteration,total_J\n";
  for (const auto& [it, j] : history) {
    out << it << ',' << format_double(j) << '\n';
  }
}

void write_front_csv(const std::filesystem::path& path, const std::vector<ParetoPoint>& points,
                     const std::vector<double>& labels, const std::string& label_header) {
  if (labels.size() != points.size()) {
    throw std::invalid_argument("front labels and points differ in length");
  }
  auto out = open_out(path);
  out << label_header << ",w_diss,beta_variance,total_J,iterations,converged\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ParetoPoint& p = points[i];
    out << format_double(labels[i]) << ',' << format_double(p.w_diss) << ','
        << format_double(p.beta_variance) << ',' << format_double(p.total_J) << ','
        << p.iterations << ',' << (p.converged ? 1 : 0) << '\n';
  }
}

void write_summary_json(const std::filesystem::path& path, const CostBreakdown& cost,
                        long iterations, bool converged, double alpha) {
  nlohmann::ordered_json j;
  j["alpha"] = alpha;
  j["mean_work"] = cost.mean_work;
  j["delta_F"] = cost.delta_F;
  j["w_diss"] = cost.w_diss;
  j["variance"] = cost.variance;
  j["penalty"] = cost.penalty;
  j["total_J"] = cost.total_J;
  j["iterations"] = iterations;
  j["converged"] = converged;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

}  // namespace qwork
