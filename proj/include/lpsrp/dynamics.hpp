#pragma once

// Circular restricted three-body problem with a solar-sail radiation
// pressure term, in the barycentric rotating frame. Units are normalized:
// unit primary separation, unit total mass and unit rotation rate. The larger
// primary sits at (-mu, 0, 0), the smaller one at (1 - mu, 0, 0).

#include <cmath>
#include <string>

#include "lpsrp/errors.hpp"
#include "lpsrp/scalar.hpp"

namespace lpsrp {

template <class Scalar> struct SystemParams {
  Scalar mu{};
  Scalar beta{};
  Scalar alpha{};  // cone angle [rad]
  Scalar gamma{};  // clock angle [rad]
  // Cached attitude trigonometry, exact at multiples of pi/2.
  Scalar cos_alpha{1}, sin_alpha{0}, cos_gamma{1}, sin_gamma{0};

  static SystemParams make(Scalar mu, Scalar beta, Scalar alpha_rad, Scalar gamma_rad) {
    SystemParams p;
    p.mu = mu;
    p.beta = beta;
    p.alpha = alpha_rad;
    p.gamma = gamma_rad;
    const auto ca = snapped_cos_sin(alpha_rad);
    const auto cg = snapped_cos_sin(gamma_rad);
    p.cos_alpha = ca.c;
    p.sin_alpha = ca.s;
    p.cos_gamma = cg.c;
    p.sin_gamma = cg.s;
    p.validate();
    return p;
  }

  static SystemParams from_degrees(Scalar mu, Scalar beta, Scalar alpha_deg, Scalar gamma_deg) {
    return make(mu, beta, deg2rad(alpha_deg), deg2rad(gamma_deg));
  }

  void validate() const {
    const Scalar slack = Scalar(16) * epsilon<Scalar>();
    const Scalar half_pi = pi<Scalar>() / 2;
    if (!(mu > Scalar(0) && mu <= Scalar(0.5)))
      throw InvalidArgument("mass ratio mu must lie in (0, 0.5]");
    if (!(beta >= Scalar(0) && beta < Scalar(1)))
      throw InvalidArgument("lightness number beta must lie in [0, 1)");
    if (!(alpha >= -half_pi * (1 + slack) && alpha <= half_pi * (1 + slack)))
      throw InvalidArgument("cone angle alpha must lie in [-90, 90] degrees");
    if (!(gamma >= -slack && gamma <= pi<Scalar>() * (1 + slack)))
      throw InvalidArgument("clock angle gamma must lie in [0, 180] degrees");
  }

  /// f = beta cos^2(alpha) (1 - mu); zero exactly when the sail is edge-on.
  Scalar srp_factor() const { return beta * cos_alpha * cos_alpha * (Scalar(1) - mu); }
};

template <class Scalar> struct State {
  Vec3<Scalar> position = Vec3<Scalar>::Zero();
  Vec3<Scalar> velocity = Vec3<Scalar>::Zero();

  Vec6<Scalar> stacked() const {
    Vec6<Scalar> s;
    s << position, velocity;
    return s;
  }
  static State from_stacked(const Vec6<Scalar>& s) {
    return State{s.template head<3>(), s.template tail<3>()};
  }
};

/// Distances to the primaries and the in-plane distance to the larger one.
template <class Scalar> struct PrimaryDistances {
  Scalar r1, r2, rxy;
};

template <class Scalar>
PrimaryDistances<Scalar> primary_distances(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  using std::sqrt;
  const Scalar dx1 = pos.x() + p.mu;
  const Scalar dx2 = pos.x() - Scalar(1) + p.mu;
  const Scalar yz2 = pos.y() * pos.y() + pos.z() * pos.z();
  PrimaryDistances<Scalar> d;
  d.r1 = sqrt(dx1 * dx1 + yz2);
  d.r2 = sqrt(dx2 * dx2 + yz2);
  d.rxy = sqrt(dx1 * dx1 + pos.y() * pos.y());
  return d;
}

namespace detail {

template <class Scalar>
void check_off_axis(const PrimaryDistances<Scalar>& d, const SystemParams<Scalar>& p) {
  if (!(d.r1 > Scalar(0)))
    throw DegenerateGeometry("position coincides with the larger primary");
  if (p.sin_alpha != Scalar(0) && !(d.rxy > Scalar(0)))
    throw DegenerateGeometry("sail normal undefined on the axis through the larger primary");
}

}  // namespace detail

/// Sail normal built from the Sun-sail line with cross products.
template <class Scalar>
Vec3<Scalar> sail_normal(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  const auto d = primary_distances(pos, p);
  detail::check_off_axis(d, p);
  const Vec3<Scalar> r1_hat = Vec3<Scalar>(pos.x() + p.mu, pos.y(), pos.z()) / d.r1;
  Vec3<Scalar> n = p.cos_alpha * r1_hat;
  if (p.sin_alpha != Scalar(0)) {
    const Vec3<Scalar> z_hat = Vec3<Scalar>::UnitZ();
    const Vec3<Scalar> e1 = r1_hat.cross(z_hat);
    const Vec3<Scalar> e2 = e1.cross(r1_hat);
    n += p.sin_alpha * p.sin_gamma * e1 / e1.norm();
    n += p.sin_alpha * p.cos_gamma * e2 / e2.norm();
  }
  return n;
}

/// Sail normal from the expanded component form used by the force model.
template <class Scalar>
Vec3<Scalar> sail_normal_components(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  const auto d = primary_distances(pos, p);
  detail::check_off_axis(d, p);
  const Scalar X = pos.x() + p.mu, Y = pos.y(), Z = pos.z();
  const Scalar ca = p.cos_alpha, sa = p.sin_alpha, cg = p.cos_gamma, sg = p.sin_gamma;
  Vec3<Scalar> n(ca * X / d.r1, ca * Y / d.r1, ca * Z / d.r1);
  if (sa != Scalar(0)) {
    n.x() += Y * sa * sg / d.rxy - Z * X * cg * sa / (d.r1 * d.rxy);
    n.y() += -X * sa * sg / d.rxy - Y * Z * cg * sa / (d.r1 * d.rxy);
    n.z() += d.rxy * cg * sa / d.r1;
  }
  return n;
}

/// a_SRP = beta (1 - mu) / r1^2 (r1_hat . n)^2 n, evaluated from the vector form.
template <class Scalar>
Vec3<Scalar> srp_accel(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  if (p.beta == Scalar(0) || p.cos_alpha == Scalar(0)) return Vec3<Scalar>::Zero();
  const auto d = primary_distances(pos, p);
  const Vec3<Scalar> n = sail_normal(pos, p);
  const Vec3<Scalar> r1_hat = Vec3<Scalar>(pos.x() + p.mu, pos.y(), pos.z()) / d.r1;
  const Scalar proj = r1_hat.dot(n);
  return p.beta * (Scalar(1) - p.mu) / (d.r1 * d.r1) * proj * proj * n;
}

/// Component form of the sail acceleration (what the vector field uses).
template <class Scalar>
Vec3<Scalar> srp_accel_components(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  const Scalar f = p.srp_factor();
  if (f == Scalar(0)) return Vec3<Scalar>::Zero();
  const auto d = primary_distances(pos, p);
  detail::check_off_axis(d, p);
  const Scalar X = pos.x() + p.mu, Y = pos.y(), Z = pos.z();
  const Scalar ca = p.cos_alpha, sa = p.sin_alpha, cg = p.cos_gamma, sg = p.sin_gamma;
  const Scalar r1 = d.r1, r12 = r1 * r1;
  Vec3<Scalar> a;
  if (sa == Scalar(0)) {
    a << X * ca / r1, Y * ca / r1, Z * ca / r1;
  } else {
    const Scalar rxy = d.rxy;
    a.x() = X * ca / r1 + Y * sa * sg / rxy - Z * X * cg * sa / (r1 * rxy);
    a.y() = Y * ca / r1 - X * sa * sg / rxy - Y * Z * cg * sa / (r1 * rxy);
    a.z() = (Z * ca + (X * X + Y * Y) * cg * sa / rxy) / r1;
  }
  return f / r12 * a;
}

/// Gradient of the effective potential Omega (gravity plus centrifugal).
template <class Scalar>
Vec3<Scalar> potential_gradient(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  const auto d = primary_distances(pos, p);
  if (!(d.r1 > Scalar(0)) || !(d.r2 > Scalar(0)))
    throw DegenerateGeometry("position coincides with a primary");
  const Scalar m1 = (Scalar(1) - p.mu) / (d.r1 * d.r1 * d.r1);
  const Scalar m2 = p.mu / (d.r2 * d.r2 * d.r2);
  const Scalar dx1 = pos.x() + p.mu, dx2 = pos.x() - Scalar(1) + p.mu;
  return Vec3<Scalar>(pos.x() - m1 * dx1 - m2 * dx2,
                      pos.y() - m1 * pos.y() - m2 * pos.y(),
                      -m1 * pos.z() - m2 * pos.z());
}

/// Total force field F = grad(Omega) + a_SRP (the acceleration at rest).
template <class Scalar>
Vec3<Scalar> force_field(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  return potential_gradient(pos, p) + srp_accel_components(pos, p);
}

/// Right-hand side of the first-order system (velocity; acceleration).
template <class Scalar>
Vec6<Scalar> eom_rhs(const State<Scalar>& s, const SystemParams<Scalar>& p) {
  const Vec3<Scalar> F = force_field(s.position, p);
  Vec6<Scalar> out;
  out << s.velocity,
      Scalar(2) * s.velocity.y() + F.x(),
      Scalar(-2) * s.velocity.x() + F.y(),
      F.z();
  return out;
}

template <class Scalar>
Vec6<Scalar> eom_rhs(const Vec6<Scalar>& y, const SystemParams<Scalar>& p) {
  return eom_rhs(State<Scalar>::from_stacked(y), p);
}

template <class Scalar>
Scalar effective_potential_plain(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  const auto d = primary_distances(pos, p);
  if (!(d.r1 > Scalar(0)) || !(d.r2 > Scalar(0)))
    throw DegenerateGeometry("position coincides with a primary");
  return (pos.x() * pos.x() + pos.y() * pos.y()) / 2 + (Scalar(1) - p.mu) / d.r1 + p.mu / d.r2;
}

/// Omega* = Omega + a_SRP . position.
template <class Scalar>
Scalar effective_potential(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  return effective_potential_plain(pos, p) + srp_accel_components(pos, p).dot(pos);
}

template <class Scalar> struct JacobiValue {
  Scalar value;
  bool conserved;  // false whenever a radiation-pressure force acts
};

/// C = 2 Omega - v^2. Only an integral of motion when the sail force vanishes.
template <class Scalar>
JacobiValue<Scalar> jacobi_constant(const State<Scalar>& s, const SystemParams<Scalar>& p) {
  return {Scalar(2) * effective_potential_plain(s.position, p) - s.velocity.squaredNorm(),
          p.srp_factor() == Scalar(0)};
}

/// Jacobian dF/dX of the force field, hand-differentiated.
template <class Scalar>
Mat3<Scalar> force_field_jacobian(const Vec3<Scalar>& pos, const SystemParams<Scalar>& p) {
  const auto d = primary_distances(pos, p);
  if (!(d.r1 > Scalar(0)) || !(d.r2 > Scalar(0)))
    throw DegenerateGeometry("position coincides with a primary");
  const Scalar one = Scalar(1);
  const Mat3<Scalar> I = Mat3<Scalar>::Identity();
  const Vec3<Scalar> P1(pos.x() + p.mu, pos.y(), pos.z());
  const Vec3<Scalar> P2(pos.x() - one + p.mu, pos.y(), pos.z());
  const Scalar r1 = d.r1, r2 = d.r2;
  const Scalar r1_3 = r1 * r1 * r1, r2_3 = r2 * r2 * r2;
  const Scalar r1_5 = r1_3 * r1 * r1, r2_5 = r2_3 * r2 * r2;

  Mat3<Scalar> J = Mat3<Scalar>::Zero();
  J(0, 0) = one;
  J(1, 1) = one;
  J -= (one - p.mu) * (I / r1_3 - Scalar(3) * P1 * P1.transpose() / r1_5);
  J -= p.mu * (I / r2_3 - Scalar(3) * P2 * P2.transpose() / r2_5);

  const Scalar f = p.srp_factor();
  if (f == Scalar(0)) return J;
  detail::check_off_axis(d, p);

  // radial part: P / r^3
  Mat3<Scalar> Js = p.cos_alpha * (I / r1_3 - Scalar(3) * P1 * P1.transpose() / r1_5);
  if (p.sin_alpha != Scalar(0)) {
    const Scalar s = d.rxy;
    const Scalar X = P1.x(), Y = P1.y(), Z = P1.z();
    const Vec3<Scalar> Pxy(X, Y, Scalar(0));
    const Scalar r1_2 = r1 * r1, r1_4 = r1_2 * r1_2, s3 = s * s * s;
    // (Y, -X, 0) / (r^2 s)
    {
      const Vec3<Scalar> q(Y, -X, Scalar(0));
      Mat3<Scalar> dq = Mat3<Scalar>::Zero();
      dq(0, 1) = one;
      dq(1, 0) = -one;
      const Scalar g = one / (r1_2 * s);
      const Vec3<Scalar> dg = -Scalar(2) * P1 / (r1_4 * s) - Pxy / (r1_2 * s3);
      Js += p.sin_alpha * p.sin_gamma * (dq * g + q * dg.transpose());
    }
    // (-XZ, -YZ, s^2) / (r^3 s)
    {
      const Vec3<Scalar> w(-X * Z, -Y * Z, s * s);
      Mat3<Scalar> dw;
      dw << -Z, Scalar(0), -X,
            Scalar(0), -Z, -Y,
            Scalar(2) * X, Scalar(2) * Y, Scalar(0);
      const Scalar g = one / (r1_3 * s);
      const Vec3<Scalar> dg = -Scalar(3) * P1 / (r1_5 * s) - Pxy / (r1_3 * s3);
      Js += p.sin_alpha * p.cos_gamma * (dw * g + w * dg.transpose());
    }
  }
  J += f * Js;
  return J;
}

}  // namespace lpsrp
