#pragma once

// Run configuration shared by the CLI subcommands. One JSON document; the
// defaults reproduce the Sun-Earth L2 sail setup with a seventh-order series.

#include <array>
#include <optional>
#include <string>

#include "json.hpp"

namespace lpsrp {

struct AngleRange {
  double start = 0, stop = 0;
  int count = 1;
};

struct OrbitBlock {
  std::array<double, 4> amplitudes{0, 0, 0.05, 0};
  std::array<double, 2> phases_deg{0, 0};
  std::array<double, 2> t_span{0, 6.283185307179586};
  int samples = 500;
  std::string frame = "barycentric";  // or "aep"
};

struct ManifoldBlock {
  double alpha3 = 0.05, alpha4 = 0.05;
  double epsilon = 1e-4;
  double duration = 6.283185307179586;
  int samples = 400;
  bool integrate = false;
  std::string frame = "barycentric";
};

struct StudyBlock {
  int n3 = 100, n4 = 100;
  double min3 = 0, max3 = 0.2;
  double min4 = 0, max4 = 0.2;
  double t_eval = 1.5707963267948966;
  int jobs = 1;
  std::string mode = "deviation";  // or "direct"
};

struct SweepBlock {
  AngleRange alpha_deg{-90, 90, 19};
  AngleRange gamma_deg{0, 180, 7};
};

struct OutputBlock {
  std::string coeffs = "series.json";
  std::string out;  // empty: standard output where that makes sense
};

struct RunConfig {
  double mu = 3.0026053634189284e-6;
  double beta = 0.002;
  double alpha_deg = 80;
  double gamma_deg = 0;
  int lagrange_index = 2;
  int order = 7;
  bool hyperbolic = true;
  OrbitBlock orbit;
  ManifoldBlock manifold;
  StudyBlock study;
  SweepBlock sweep;
  OutputBlock output;

  /// Range and consistency checks; throws InvalidArgument.
  void validate() const;
};

/// Parses and validates; unknown keys and wrong types are errors.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

/// Command-line overrides of top-level scalars.
struct ConfigOverrides {
  std::optional<double> mu, beta, alpha_deg, gamma_deg;
  std::optional<int> order, lagrange_index, jobs;
  std::optional<std::string> coeffs, out;
};

void apply_overrides(RunConfig& c, const ConfigOverrides& o);

}  // namespace lpsrp
