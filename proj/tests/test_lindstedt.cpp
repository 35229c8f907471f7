#include "common.hpp"
#include "doctest.h"
#include "lpsrp/integrator.hpp"
#include "lpsrp/lindstedt.hpp"
#include "lpsrp/quad.hpp"

using namespace lpsrp;
using namespace lpsrp::testing;

namespace {

// Worst acceleration residual of the evaluated series in the full field,
// barycentric units, over a few sample times.
template <class Scalar> Scalar eom_residual(const SeriesSolution<Scalar>& s, const Scalar& eps) {
  std::array<TrigSeries<Scalar>, 3> acc;
  for (int a = 0; a < 3; ++a) acc[a] = ddt(s.vel[a], s.freq);
  const Scalar G = s.gamma_norm();
  Scalar worst = 0;
  for (double t : {0.0, 0.7, 1.9}) {
    const EvalPoint<Scalar> x{{Scalar(0), Scalar(0), eps, eps}, Scalar(0.3), Scalar(1.1), Scalar(t)};
    const Vec6<Scalar> st = barycentric_state(s, x);
    Vec3<Scalar> A;
    for (int a = 0; a < 3; ++a) A(a) = evaluate(acc[a], s.freq, x);
    const Vec6<Scalar> f = eom_rhs(st, s.params());
    const Scalar r = (Vec3<Scalar>(f.template tail<3>()) - G * A).norm();
    if (r > worst) worst = r;
  }
  return worst;
}

template <class Scalar> double slope(const SeriesSolution<Scalar>& s) {
  using std::log10;
  const Scalar lo = eom_residual(s, Scalar(1e-3)), hi = eom_residual(s, Scalar(1e-2));
  return to_double(log10(hi) - log10(lo));
}

}  // namespace

TEST_CASE("initialization") {
  const auto lin = build_linear_model(aep(80, 40));
  const auto s = initialize(lin, 4);
  const auto& k = lin.k;
  CHECK(s.pos[0].get({1, 0, 0, 0, 0, 0}).c == 1.0);
  CHECK(s.pos[1].get({1, 0, 0, 0, 0, 0}).c == k[1]);
  CHECK(s.pos[2].get({1, 0, 0, 0, 0, 0}).c == k[3]);
  CHECK(s.pos[0].get({0, 0, 0, 0, 0, 0}).c == k[15]);
  CHECK(s.pos[1].get({0, 0, 0, 0, 0, 0}).c == k[16]);
  CHECK(s.pos[2].get({0, 0, 0, 0, 0, 0}).c == k[17]);
  std::size_t stored = 0;
  for (int a = 0; a < 3; ++a) stored += s.pos[a].size();
  CHECK(stored <= 21);
  CHECK(s.freq.omega.terms().size() == 1);
  CHECK(s.freq.nu.terms().size() == 1);
  CHECK(s.freq.lambda.terms().size() == 1);
  CHECK(s.freq.omega.zeroth() == lin.omega_0);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.1, 0.1), t(-1, 1);
  for (int n = 0; n < 10; ++n) {
    const EvalPoint<double> x{{u(rng), u(rng), u(rng), u(rng)}, 10 * u(rng), 10 * u(rng), t(rng)};
    const Vec3<double> ref = linear_solution(lin, x.t, x.amp, x.phi1, x.phi2);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(evaluate(s.pos[a], s.freq, x) - ref(a)) < 1e-13);
  }
}

TEST_CASE("M matrix") {
  const auto lin = build_linear_model(aep(80, 40));
  const Mat3<double>& W = lin.omega_star;
  SUBCASE("static block") {
    const Mat6<double> M = assemble_M<double>({0, 0, 2, 0, 0, 0}, W, lin.lambda_r, lin.omega_0, lin.nu_0);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        CHECK(M(2 * r, 2 * c) == -W(r, c));
        CHECK(M(2 * r + 1, 2 * c + 1) == -W(r, c));
        CHECK(M(2 * r, 2 * c + 1) == 0.0);
      }
  }
  SUBCASE("Coriolis pattern only") {
    const Mat6<double> M = assemble_M<double>({0, 0, 1, 1, 1, 1}, Mat3<double>::Zero(), 0.0, 2.0, 1.5);
    const double Psi = 3.5;
    CHECK(M(0, 3) == -2 * Psi);
    CHECK(M(1, 2) == 2 * Psi);
    CHECK(M(2, 1) == 2 * Psi);
    CHECK(M(3, 0) == -2 * Psi);
    CHECK(M.block<2, 2>(4, 0).norm() == 0.0);
  }
  SUBCASE("substitution into the linear operator") {
    const TermIndex t{2, 1, 1, 1, 1, -1};
    const double zeta = lin.lambda_r, Psi = lin.omega_0 - lin.nu_0;
    const Mat6<double> M = assemble_M(t, W, lin.lambda_r, lin.omega_0, lin.nu_0);
    Vec6<double> X;
    X << 0.3, -0.2, 0.7, 0.1, -0.4, 0.9;
    const Vec6<double> R = M * X;
    const Mat3<double> J2 = 2 * coriolis_matrix<double>();
    for (double tt : {0.0, 0.3, 1.1}) {
      const double e = std::exp(zeta * tt), c = std::cos(Psi * tt), s = std::sin(Psi * tt);
      Vec3<double> pos, vel, acc, lhs_m;
      for (int a = 0; a < 3; ++a) {
        const double xc = X(2 * a), xs = X(2 * a + 1);
        pos(a) = e * (xc * c + xs * s);
        vel(a) = e * (xc * (zeta * c - Psi * s) + xs * (zeta * s + Psi * c));
        acc(a) = e * (xc * ((zeta * zeta - Psi * Psi) * c - 2 * zeta * Psi * s) +
                      xs * ((zeta * zeta - Psi * Psi) * s + 2 * zeta * Psi * c));
        lhs_m(a) = e * (R(2 * a) * c + R(2 * a + 1) * s);
      }
      CHECK((acc - J2 * vel - W * pos - lhs_m).norm() < 1e-12 * std::max(1.0, lhs_m.norm()));
    }
  }
  SUBCASE("plain solve inverts") {
    const Mat6<double> M = assemble_M<double>({0, 0, 2, 0, 2, 0}, W, lin.lambda_r, lin.omega_0, lin.nu_0);
    Eigen::VectorXd v(6);
    v << 1, -2, 3, 0.5, -0.25, 4;
    const auto r = detail::min_norm_solve<double>(M, M * v, 1e-12);
    CHECK((r.x - v).norm() < 1e-12 * v.norm());
  }
}

TEST_CASE("known terms") {
  SUBCASE("quadratic cascade of the in-plane family") {
    const auto lin = build_linear_model(aep(0, 0, 0.0));
    const auto s = initialize(lin, 2);
    const auto known = known_terms(s, 2);
    bool seen = false;
    for (const auto& [key, g] : known) {
      const TermIndex t = TermIndex::from_key(key);
      if (t.i || t.j || t.m) continue;
      if ((g.b + g.c).norm() == 0) continue;
      seen = true;
      CHECK(t.k == 2);
      CHECK((t.p == 0 || t.p == 2));
      CHECK(t.q == 0);
    }
    CHECK(seen);
  }
  SUBCASE("zero lower orders give zero") {
    auto s = initialize(build_linear_model(aep(80, 40)), 3);
    for (auto& p : s.pos) p = TrigSeries<double>(3);
    for (const auto& [key, g] : known_terms(s, 2)) {
      CHECK(g.b.norm() == 0.0);
      CHECK(g.c.norm() == 0.0);
    }
  }
  SUBCASE("no self-reference") {
    const auto lin = build_linear_model(aep(80, 0));
    auto s = build(lin, 3);
    // the constant offset is rounding noise, not zero; drop it so that products
    // with it cannot carry the poisoned terms
    for (auto& p : s.pos) p.set(TermIndex{}, 0.0, 0.0);
    auto t = s;
    // poison the order-3 part; order-3 known terms must not notice
    for (auto& p : t.pos) p = p.truncated(2).with_max_order(3) + TrigSeries<double>::monomial(3, {0, 0, 3, 0, 1, 0}, 5.0);
    const auto a = known_terms(s, 3), b = known_terms(t, 3);
    REQUIRE(a.size() == b.size());
    for (const auto& [key, g] : a) CHECK((g.b + g.c - b.at(key).b - b.at(key).c).norm() == 0.0);
  }
}

TEST_CASE("build") {
  const auto lin = build_linear_model(aep(80, 0));
  SUBCASE("order one is the initialization") {
    const auto s = build(lin, 1), i = initialize(lin, 1);
    for (int a = 0; a < 3; ++a) CHECK(s.pos[a] == i.pos[a]);
    CHECK(s.freq.omega == i.freq.omega);
  }
  SUBCASE("higher orders leave lower ones alone, and rebuilds are identical") {
    const auto s3 = build(lin, 3), s4 = build(lin, 4), s4b = build(lin, 4);
    for (int a = 0; a < 3; ++a) {
      CHECK(s4.pos[a].truncated(3).with_max_order(3) == s3.pos[a]);
      CHECK(s4.pos[a] == s4b.pos[a]);
      CHECK(s4.vel[a] == s4b.vel[a]);
    }
  }
  SUBCASE("parity structure") {
    const auto s = build(lin, 5);
    for (int a = 0; a < 3; ++a) CHECK_FALSE(find_structure_violation(s.pos[a]).has_value());
  }
  SUBCASE("in-plane and out-of-plane parity with the sail off") {
    const auto s = build(build_linear_model(aep(0, 0, 0.0)), 5);
    for (int a = 0; a < 3; ++a)
      for (const auto& e : s.pos[a].terms()) {
        if (std::abs(e.second.c) + std::abs(e.second.s) <= 1e-12) continue;
        const TermIndex t = TermIndex::from_key(e.first);
        CAPTURE(a);
        CAPTURE(t.m);
        if (a < 2) CHECK(t.m % 2 == 0);
        else CHECK(t.m % 2 == 1);
      }
  }
}

TEST_CASE("residual of the evaluated series scales with the order") {
  for (const auto& c : reference_cases) {
    CAPTURE(std::string(c.name));
    const auto lin = build_linear_model(aep(c.alpha_deg, c.gamma_deg));
    BuildOptions<double> opt;
    opt.hyperbolic = false;
    for (int N : {2, 3}) {
      CAPTURE(N);
      CHECK(slope(build(lin, N, opt)) >= N);
    }
  }
}

TEST_CASE("residual scaling at orders 5 and 7 in quad precision") {
  for (const auto& c : reference_cases) {
    CAPTURE(std::string(c.name));
    const auto p = SystemParams<Quad>::from_degrees(Quad(mu_se), Quad(beta_se), Quad(c.alpha_deg), Quad(c.gamma_deg));
    BuildOptions<Quad> opt;
    opt.hyperbolic = false;
    const auto full = build(find_aep(p, 2), 7, opt);
    const auto s5 = truncate_solution(full, 5);
    CHECK(slope(s5) >= 5);
    CHECK(slope(full) >= 7);
    CHECK(eom_residual(full, Quad(1e-3)) < eom_residual(s5, Quad(1e-3)));
  }
}

TEST_CASE("order-3 series against integration for the in-plane family") {
  const auto lin = build_linear_model(aep(0, 0, 0.0));
  BuildOptions<double> opt;
  opt.hyperbolic = false;
  const auto s = build(lin, 3, opt);
  auto err = [&](double a3) {
    const EvalPoint<double> x0{{0, 0, a3, 0}, 0, 0, 0};
    IntegratorConfig<double> cfg;
    cfg.abs_tol = cfg.rel_tol = 1e-14;
    const auto prop = propagate<Vec6<double>>([&](double, const Vec6<double>& y) { return eom_rhs(y, s.params()); },
                                              barycentric_state(s, x0), 0.0, pi<double>() / 2, cfg);
    const EvalPoint<double> x1{{0, 0, a3, 0}, 0, 0, pi<double>() / 2};
    return (prop.y_final.head<3>() - barycentric_state(s, x1).head<3>()).norm();
  };
  const double e1 = err(0.02), e2 = err(0.04);
  CHECK(std::log2(e2 / e1) >= 3.5);
}
