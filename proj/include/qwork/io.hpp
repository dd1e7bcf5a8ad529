#pragma once

#include "qwork/grape.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qwork {

// Shortest exact representation: 17 significant digits round-trip any double.
std::string format_double(double v);

// protocol.csv: header t,u,v; one row per grid point. The rate column of the
// final row repeats v_{N-1} (v is piecewise constant on N intervals).
void write_protocol_csv(const std::filesystem::path& path, const ControlProtocol& protocol);

// Rebuilds a protocol from protocol.csv; the target is not stored in the file.
ControlProtocol read_protocol_csv(const std::filesystem::path& path, double u_target);

// trajectory.csv: header t,u,x1,x2,x3,x4,y1,y2,y3,y4
void write_trajectory_csv(const std::filesystem::path& path, const TimeGrid& grid,
                          const Trajectory& traj);

// cost_history.csv: header iteration,total_J
void write_cost_history_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<long, double>>& history);

// front.csv: header alpha,w_diss,beta_variance,total_J,iterations,converged.
// label_header swaps the first column name for beta sweeps.
void write_front_csv(const std::filesystem::path& path, const std::vector<ParetoPoint>& points,
                     const std::vector<double>& labels, const std::string& label_header);

void write_summary_json(const std::filesystem::path& path, const CostBreakdown& cost,
                        long iterations, bool converged, double alpha);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qwork
