#pragma once

// Plain-text outputs: trajectory, sweep and error-grid CSV files.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lpsrp/equilibria.hpp"
#include "lpsrp/trajectory.hpp"
#include "lpsrp/validation.hpp"

namespace lpsrp {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// `# key: value` header lines followed by t,x,y,z,vx,vy,vz rows.
void write_trajectory_csv(std::ostream& os, const std::vector<Sample<double>>& samples,
                          const std::vector<std::pair<std::string, std::string>>& meta);
std::vector<Sample<double>> read_trajectory_csv(std::istream& is);

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell<double>>& cells);

void write_grid_csv(std::ostream& os, const ErrorGrid& g);
nlohmann::json grid_sidecar(const ErrorGrid& g, const nlohmann::json& meta);

}  // namespace lpsrp
