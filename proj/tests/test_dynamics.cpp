#include "common.hpp"
#include "doctest.h"
#include "lpsrp/dynamics.hpp"

using namespace lpsrp;
using namespace lpsrp::testing;

TEST_CASE("params reject out-of-domain angles and constants") {
  CHECK_THROWS_AS(params(91, 0), InvalidArgument);
  CHECK_THROWS_AS(params(0, 200), InvalidArgument);
  CHECK_THROWS_AS(params(0, -1), InvalidArgument);
  CHECK_THROWS_AS(SystemParams<double>::make(0.0, 0.1, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(SystemParams<double>::make(0.6, 0.1, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(SystemParams<double>::make(0.01, 1.0, 0, 0), InvalidArgument);
  CHECK_NOTHROW(params(-90, 180));
}

TEST_CASE("sail normal") {
  const Vec3<double> X(1.01, 0.001, 0.0001);
  SUBCASE("alpha = 0 gives the sun line for any clock angle") {
    for (double g : {0.0, 40.0, 123.0, 180.0}) {
      const auto p = params(0, g);
      const Vec3<double> r1(X.x() + p.mu, X.y(), X.z());
      CHECK((sail_normal(X, p) - r1.normalized()).norm() < 1e-15);
    }
  }
  SUBCASE("unit length and both formulations agree") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-90, 90), clk(0, 180), off(-0.01, 0.01);
    for (int n = 0; n < 50; ++n) {
      const auto p = params(ang(rng), clk(rng));
      const Vec3<double> Y = X + Vec3<double>(off(rng), off(rng), off(rng));
      const auto a = sail_normal(Y, p), b = sail_normal_components(Y, p);
      CHECK(std::abs(a.norm() - 1) < 1e-14);
      CHECK((a - b).norm() < 1e-13);
    }
    const auto p = params(80, 40);
    CHECK((sail_normal(X, p) - sail_normal_components(X, p)).norm() < 1e-13);
  }
  SUBCASE("on the axis through the sun") {
    const Vec3<double> axis(-mu_se, 0, 0.3);
    CHECK_THROWS_AS(sail_normal(axis, params(30, 0)), DegenerateGeometry);
    CHECK_NOTHROW(sail_normal(axis, params(0, 0)));
  }
}

TEST_CASE("sail acceleration") {
  const Vec3<double> X(1.0101, -0.0002, 0.0003);
  SUBCASE("edge-on sail exerts nothing") {
    CHECK(srp_accel(X, params(90, 30)).norm() == 0.0);
    CHECK(srp_accel(X, params(-90, 30)).norm() == 0.0);
  }
  SUBCASE("face-on sail pushes radially with beta(1-mu)/r1^2") {
    const auto p = params(0, 0);
    const Vec3<double> r1(X.x() + p.mu, X.y(), X.z());
    const Vec3<double> expect = p.beta * (1 - p.mu) / r1.squaredNorm() * r1.normalized();
    CHECK((srp_accel(X, p) - expect).norm() < 1e-17);
  }
  SUBCASE("component form equals vector form near L2") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> off(-0.005, 0.005), ang(-90, 90), clk(0, 180);
    for (int n = 0; n < 100; ++n) {
      const auto p = n % 2 ? params(80, 40) : params(ang(rng), clk(rng));
      const Vec3<double> Y = X + Vec3<double>(off(rng), off(rng), off(rng));
      CHECK((srp_accel(Y, p) - srp_accel_components(Y, p)).norm() < 1e-13);
    }
  }
}

TEST_CASE("equations of motion") {
  SUBCASE("classical L2 is an equilibrium at beta = 0") {
    const auto p = params(0, 0, 0.0);
    State<double> s{classical_lagrange_point(p.mu, 2), Vec3<double>::Zero()};
    CHECK(eom_rhs(s, p).norm() < 1e-12);
  }
  SUBCASE("reference H2 for (80,0) is an equilibrium") {
    const auto& c = reference_cases[0];
    State<double> s{Vec3<double>(c.h2[0], c.h2[1], c.h2[2]), Vec3<double>::Zero()};
    CHECK(eom_rhs(s, params(80, 0)).norm() < 1e-10);
  }
  SUBCASE("gamma = 0 reflection parity in y") {
    const auto p = params(80, 0);
    const Vec3<double> a(1.0102, 0.0013, 0.0004), b(a.x(), -a.y(), a.z());
    const auto fa = force_field(a, p), fb = force_field(b, p);
    CHECK(fa.x() == doctest::Approx(fb.x()).epsilon(1e-14));
    CHECK(fa.z() == doctest::Approx(fb.z()).epsilon(1e-14));
    CHECK(fa.y() == doctest::Approx(-fb.y()).epsilon(1e-14));
  }
  SUBCASE("beta = 0 or edge-on reduces to the plain field exactly") {
    const Vec6<double> y = (Vec6<double>() << 1.0103, 0.002, -0.001, 0.01, -0.02, 0.003).finished();
    const auto plain = eom_rhs(y, params(0, 0, 0.0));
    CHECK(eom_rhs(y, params(90, 40)) == plain);
    CHECK(eom_rhs(y, params(-90, 120)) == plain);
    CHECK(eom_rhs(y, params(35, 77, 0.0)) == plain);
  }
  SUBCASE("face-on field ignores the clock angle") {
    const Vec6<double> y = (Vec6<double>() << 1.0103, 0.002, -0.001, 0.01, -0.02, 0.003).finished();
    const auto ref = eom_rhs(y, params(0, 0));
    for (double g : {10.0, 40.0, 90.0, 180.0}) CHECK(eom_rhs(y, params(0, g)) == ref);
  }
}

TEST_CASE("potential and Jacobi value") {
  const Vec3<double> X(1.0102, 0.001, 0.0002);
  CHECK(effective_potential(X, params(30, 10, 0.0)) == effective_potential_plain(X, params(30, 10, 0.0)));
  const auto p = params(0, 0, 0.0);
  double prev = -1;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double v = effective_potential_plain(Vec3<double>(1 - p.mu - eps, 0, 0), p);
    CHECK(v > prev);
    prev = v;
  }
  State<double> s{X, Vec3<double>(0, 0.01, 0)};
  CHECK(jacobi_constant(s, p).conserved);
  CHECK_FALSE(jacobi_constant(s, params(30, 10)).conserved);
}

TEST_CASE("analytic force Jacobian matches central differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> off(-0.003, 0.003);
  for (int n = 0; n < 10; ++n) {
    const auto p = n < 5 ? params(80, 40) : params(0, 0);
    const Vec3<double> X = Vec3<double>(1.0101, 0, 0) + Vec3<double>(off(rng), off(rng), off(rng));
    const auto J = force_field_jacobian(X, p);
    const double h = 1e-7;
    double worst = 0;
    for (int c = 0; c < 3; ++c) {
      Vec3<double> e = Vec3<double>::Zero();
      e(c) = h;
      const Vec3<double> col = (force_field(Vec3<double>(X + e), p) - force_field(Vec3<double>(X - e), p)) / (2 * h);
      worst = std::max(worst, (col - J.col(c)).norm() / J.norm());
    }
    CHECK(worst < 1e-6);
  }
}
