#include "lpsrp/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace lpsrp {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "' in CSV");
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const std::vector<Sample<double>>& samples,
                          const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << ": " << v << "\n";
  os << "t,x,y,z,vx,vy,vz\n";
  for (const auto& s : samples) {
    os << format_double(s.t);
    for (int c = 0; c < 6; ++c) os << ',' << format_double(s.state(c));
    os << '\n';
  }
}

std::vector<Sample<double>> read_trajectory_csv(std::istream& is) {
  std::vector<Sample<double>> out;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,x,y,z,vx,vy,vz") throw FormatError("unexpected trajectory CSV header");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(parse_double(cell));
    if (v.size() != 7) throw FormatError("trajectory row must have 7 columns");
    Sample<double> s;
    s.t = v[0];
    for (int c = 0; c < 6; ++c) s.state(c) = v[1 + c];
    out.push_back(s);
  }
  if (!header) throw FormatError("trajectory CSV has no header");
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell<double>>& cells) {
  os << "alpha_deg,gamma_deg,Hx,Hy,Hz,residual,converged\n";
  for (const auto& c : cells) {
    os << format_double(c.alpha_deg) << ',' << format_double(c.gamma_deg) << ',' << format_double(c.position.x())
       << ',' << format_double(c.position.y()) << ',' << format_double(c.position.z()) << ','
       << format_double(c.residual) << ',' << (c.converged ? 1 : 0) << '\n';
  }
}

void write_grid_csv(std::ostream& os, const ErrorGrid& g) {
  os << "alpha3,alpha4,log10err\n";
  for (int i = 0; i < g.n3(); ++i)
    for (int j = 0; j < g.n4(); ++j)
      os << format_double(g.axis3[i]) << ',' << format_double(g.axis4[j]) << ',' << format_double(g.at(i, j))
         << '\n';
}

nlohmann::json grid_sidecar(const ErrorGrid& g, const nlohmann::json& meta) {
  nlohmann::json failed = nlohmann::json::array();
  int exact = 0;
  for (int i = 0; i < g.n3(); ++i)
    for (int j = 0; j < g.n4(); ++j) {
      const auto st = g.status_at(i, j);
      if (st == CellStatus::Failed)
        failed.push_back({{"i3", i}, {"i4", j}, {"message", g.message[std::size_t(i) * g.n4() + j]}});
      if (st == CellStatus::ExactZero) ++exact;
    }
  return {{"n3", g.n3()},
          {"n4", g.n4()},
          {"alpha3_range", {g.axis3.front(), g.axis3.back()}},
          {"alpha4_range", {g.axis4.front(), g.axis4.back()}},
          {"t_eval", g.t_eval},
          {"failed_cells", failed},
          {"exact_zero_cells", exact},
          {"failed_sentinel", "inf"},
          {"metadata", meta}};
}

}  // namespace lpsrp
