#include "common.hpp"
#include "doctest.h"
#include "lpsrp/integrator.hpp"
#include "lpsrp/lindstedt.hpp"

using namespace lpsrp;
using namespace lpsrp::testing;

namespace {

using V2 = Eigen::Vector2d;

auto oscillator = [](double, const V2& y) { return V2(y(1), -y(0)); };

State<double> lyapunov_like_start() {
  BuildOptions<double> opt;
  opt.hyperbolic = false;
  static const auto s = build(aep(0, 0, 0.0), 5, opt);
  return State<double>::from_stacked(barycentric_state(s, EvalPoint<double>{{0, 0, 0.05, 0}, 0, 0, 0}));
}

}  // namespace

TEST_CASE("harmonic oscillator") {
  IntegratorConfig<double> cfg;
  cfg.abs_tol = cfg.rel_tol = 1e-12;
  const auto p = propagate<V2>(oscillator, V2(1, 0), 0.0, 10.0, cfg);
  CHECK(std::abs(p.y_final(0) - std::cos(10.0)) < 1e-10);
  CHECK(std::abs(p.y_final(1) + std::sin(10.0)) < 1e-10);
  CHECK(p.t_final == 10.0);
  CHECK(p.stats.accepted > 0);
}

TEST_CASE("dense output") {
  IntegratorConfig<double> cfg;
  cfg.abs_tol = cfg.rel_tol = 1e-12;
  cfg.dense = true;
  const auto p = propagate<V2>(oscillator, V2(1, 0), 0.0, 6.0, cfg);
  REQUIRE_FALSE(p.segments.empty());
  for (double t : {0.123, 1.7, 3.3333, 5.99}) CHECK(std::abs(p(t)(0) - std::cos(t)) < 1e-9);
}

TEST_CASE("equilibrium persists") {
  for (const auto& c : reference_cases) {
    const auto h = aep(c.alpha_deg, c.gamma_deg);
    const auto p = propagate(State<double>{h.position, Vec3<double>::Zero()}, h.params, 0.0, pi<double>(), {});
    CHECK((p.y_final.head<3>() - h.position).norm() <= 1e-10);
  }
}

TEST_CASE("Jacobi value conserved with the sail off") {
  const auto params0 = params(0, 0, 0.0);
  const auto s0 = lyapunov_like_start();
  const auto p = propagate(s0, params0, 0.0, pi<double>(), {});
  const double c0 = jacobi_constant(s0, params0).value;
  const double c1 = jacobi_constant(State<double>::from_stacked(p.y_final), params0).value;
  CHECK(std::abs(c1 - c0) <= 1e-10);
}

TEST_CASE("forward then backward returns to the start") {
  const auto pr = params(80, 40);
  const auto h = aep(80, 40);
  State<double> s0{h.position + Vec3<double>(1e-4, -2e-4, 1e-4), Vec3<double>(1e-4, 0, -1e-4)};
  const auto fwd = propagate(s0, pr, 0.0, pi<double>(), {});
  const auto back = propagate(State<double>::from_stacked(fwd.y_final), pr, pi<double>(), 0.0, {});
  CHECK((back.y_final - s0.stacked()).norm() <= 1e-9);
}

TEST_CASE("tighter tolerance does not hurt") {
  const auto pr = params(0, 0, 0.0);
  const auto s0 = lyapunov_like_start();
  IntegratorConfig<double> ref_cfg;
  const auto ref = propagate(s0, pr, 0.0, pi<double>(), ref_cfg);
  double prev = 1e300;
  for (double tol : {1e-8, 5e-9, 2.5e-9, 1.25e-9}) {
    IntegratorConfig<double> cfg;
    cfg.abs_tol = cfg.rel_tol = tol;
    const double err = (propagate(s0, pr, 0.0, pi<double>(), cfg).y_final - ref.y_final).norm();
    CHECK(err <= 2 * prev);
    prev = err;
  }
}

TEST_CASE("configuration and failures") {
  const auto pr = params(80, 0);
  State<double> s0{aep(80, 0).position, Vec3<double>(0, 0.01, 0)};
  IntegratorConfig<double> bad;
  bad.abs_tol = 0;
  CHECK_THROWS_AS(propagate(s0, pr, 0.0, 1.0, bad), InvalidArgument);
  IntegratorConfig<double> loose;
  loose.rel_tol = 1e-20;
  const auto p = propagate(s0, pr, 0.0, 0.1, loose);
  CHECK(p.stats.tolerance_clamped);
  IntegratorConfig<double> few;
  few.max_steps = 3;
  CHECK_THROWS_AS(propagate(s0, pr, 0.0, 10.0, few), MaxStepsExceeded);
  // straight fall into the smaller primary
  State<double> fall{Vec3<double>(1 - mu_se + 1e-7, 0, 0), Vec3<double>::Zero()};
  CHECK_THROWS_AS(propagate(fall, params(0, 0, 0.0), 0.0, 1.0, {}), Error);
}

TEST_CASE("deterministic") {
  const auto pr = params(80, 40);
  State<double> s0{aep(80, 40).position + Vec3<double>(1e-4, 0, 0), Vec3<double>::Zero()};
  const auto a = propagate(s0, pr, 0.0, 2.0, {}), b = propagate(s0, pr, 0.0, 2.0, {});
  CHECK(a.y_final == b.y_final);
  CHECK(a.stats.accepted == b.stats.accepted);
}
