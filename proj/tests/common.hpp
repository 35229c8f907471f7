#pragma once

#include <array>
#include <random>

#include "lpsrp/equilibria.hpp"

namespace lpsrp::testing {

inline constexpr double mu_se = 3.0026053634189284e-6;
inline constexpr double beta_se = 0.002;

struct Case {
  const char* name;
  double alpha_deg, gamma_deg;
  std::array<double, 3> h2;
};

// Reference attitudes and their H2 positions.
inline const std::array<Case, 3> reference_cases{{
    {"(80,0)", 80, 0, {1.0100319725242741, 0.0, 1.4769123813475747e-5}},
    {"(0,40)", 0, 40, {1.009817129039308, 0.0, 0.0}},
    {"(80,40)", 80, 40, {1.0100319689420738, -1.2720500232390416e-5, 1.1313805251204233e-5}},
}};

inline SystemParams<double> params(double alpha_deg, double gamma_deg, double beta = beta_se) {
  return SystemParams<double>::from_degrees(mu_se, beta, alpha_deg, gamma_deg);
}

inline Aep<double> aep(double alpha_deg, double gamma_deg, double beta = beta_se) {
  return find_aep(params(alpha_deg, gamma_deg, beta), 2);
}

inline double rel_err(double a, double b) {
  const double s = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / s;
}

}  // namespace lpsrp::testing
