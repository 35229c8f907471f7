#pragma once

// Legendre-recurrence expansions of the gravitational and radiation-pressure
// accelerations about an equilibrium point. Coordinates rho = (x, y, z) are
// relative to the equilibrium and scaled by |Gamma|, the distance to the
// smaller primary, so that the smaller primary sits at unit distance.
//
// The same recurrences run over plain scalars (numeric mode) and over
// TrigSeries (series mode).

#include <array>
#include <cmath>
#include <vector>

#include "lpsrp/dynamics.hpp"
#include "lpsrp/equilibria.hpp"
#include "lpsrp/series.hpp"

namespace lpsrp {

template <class Scalar> struct ExpansionConstants {
  Scalar A1{}, A2{}, B{}, C{};
  Scalar D1{}, D2{}, Dxy{};
  Scalar gamma_norm{};
  Scalar f{};  // beta cos^2(alpha) (1 - mu)
  SystemParams<Scalar> params;

  static ExpansionConstants from_aep(const Aep<Scalar>& aep) {
    using std::sqrt;
    ExpansionConstants k;
    const auto& H = aep.position;
    const Scalar mu = aep.params.mu;
    k.params = aep.params;
    k.gamma_norm = aep.gamma_norm();
    if (!(k.gamma_norm > Scalar(0))) throw DegenerateGeometry("equilibrium coincides with the smaller primary");
    k.A1 = -(H.x() + mu) / k.gamma_norm;
    k.A2 = (Scalar(1) - H.x() - mu) / k.gamma_norm;
    k.B = -H.y() / k.gamma_norm;
    k.C = -H.z() / k.gamma_norm;
    k.D1 = sqrt(k.A1 * k.A1 + k.B * k.B + k.C * k.C);
    k.D2 = sqrt(k.A2 * k.A2 + k.B * k.B + k.C * k.C);
    k.Dxy = sqrt(k.A1 * k.A1 + k.B * k.B);
    k.f = aep.params.srp_factor();
    if (!(k.D1 > Scalar(0))) throw DegenerateGeometry("equilibrium coincides with the larger primary");
    return k;
  }

  Scalar gamma3() const { return gamma_norm * gamma_norm * gamma_norm; }
};

// ---------------------------------------------------------------------------
// value-type shims so the recurrences read the same in both modes

namespace detail {

template <class Scalar> Scalar vmul(const Scalar& a, const Scalar& b) { return a * b; }
template <class Scalar>
TrigSeries<Scalar> vmul(const TrigSeries<Scalar>& a, const TrigSeries<Scalar>& b) {
  return mul(a, b);
}
template <class Scalar> Scalar vlin(const Scalar& a, const Scalar& wa, const Scalar& b, const Scalar& wb) {
  return wa * a + wb * b;
}
template <class Scalar>
TrigSeries<Scalar> vlin(const TrigSeries<Scalar>& a, const Scalar& wa, const TrigSeries<Scalar>& b,
                        const Scalar& wb) {
  return add(a, b, wa, wb);
}
template <class Scalar> Scalar vscale(const Scalar& a, const Scalar& w) { return w * a; }
template <class Scalar> TrigSeries<Scalar> vscale(const TrigSeries<Scalar>& a, const Scalar& w) {
  return a.scaled(w);
}
template <class Scalar> Scalar vconst(const Scalar&, const Scalar& c) { return c; }
template <class Scalar> TrigSeries<Scalar> vconst(const TrigSeries<Scalar>& proto, const Scalar& c) {
  return TrigSeries<Scalar>::constant(proto.max_order(), c);
}
template <class Scalar> Scalar vzero(const Scalar&) { return Scalar(0); }
template <class Scalar> TrigSeries<Scalar> vzero(const TrigSeries<Scalar>& proto) {
  return TrigSeries<Scalar>(proto.max_order());
}

}  // namespace detail

/// T_n and dT_n/dq_j for n = 0..nmax about the centre (A, B, C), D^2 = A^2+B^2+C^2.
template <class V, class Scalar> struct LegendreTable {
  std::vector<V> T;
  std::array<std::vector<V>, 3> R;  // R[q][n]; R[q][0] = 0
};

/// Runs both recurrences. `coords` holds (x, y, z) in numeric or series form;
/// with_R = false skips the derivative tables.
template <class V, class Scalar>
LegendreTable<V, Scalar> legendre_table(int nmax, const std::array<V, 3>& coords,
                                        const std::array<Scalar, 3>& centre, const Scalar& D,
                                        bool with_R = true, int n_axes = 3) {
  using detail::vconst;
  using detail::vlin;
  using detail::vmul;
  using detail::vscale;
  using detail::vzero;
  const V& proto = coords[0];
  const Scalar D2 = D * D;
  V S = vzero(proto);
  V rho2 = vzero(proto);
  for (int a = 0; a < n_axes; ++a) {
    S = vlin(S, Scalar(1), coords[a], centre[a]);
    rho2 = vlin(rho2, Scalar(1), vmul(coords[a], coords[a]), Scalar(1));
  }
  LegendreTable<V, Scalar> tab;
  tab.T.reserve(nmax + 1);
  tab.T.push_back(vconst(proto, Scalar(1)));
  if (nmax >= 1) tab.T.push_back(vscale(S, Scalar(1) / D2));
  for (int n = 2; n <= nmax; ++n) {
    const Scalar a = Scalar(2 * n - 1) / Scalar(n) / D2;
    const Scalar b = Scalar(n - 1) / Scalar(n) / D2;
    tab.T.push_back(vlin(vmul(S, tab.T[n - 1]), a, vmul(rho2, tab.T[n - 2]), -b));
  }
  if (!with_R) return tab;
  for (int q = 0; q < n_axes; ++q) {
    auto& R = tab.R[q];
    R.reserve(nmax + 1);
    R.push_back(vzero(proto));
    if (nmax >= 1) R.push_back(vconst(proto, centre[q] / D2));
    for (int n = 2; n <= nmax; ++n) {
      const Scalar a = Scalar(2 * n - 1) / Scalar(n) / D2;
      const Scalar b = Scalar(n - 1) / Scalar(n) / D2;
      // a [Q T_{n-1} + S R_{n-1}] - b [2 q T_{n-2} + rho^2 R_{n-2}]
      V first = vlin(tab.T[n - 1], centre[q], vmul(S, R[n - 1]), Scalar(1));
      V second = vlin(vmul(coords[q], tab.T[n - 2]), Scalar(2), vmul(rho2, R[n - 2]), Scalar(1));
      R.push_back(vlin(first, a, second, -b));
    }
  }
  return tab;
}

namespace detail {
template <class Scalar>
void check_domain(const Vec3<Scalar>& rho, const Scalar& A, const Scalar& B, const Scalar& C, const Scalar& D) {
  (void)A;
  (void)B;
  (void)C;
  if (!(rho.norm() < D))
    throw ConvergenceDomain("Legendre expansion used outside its convergence domain (rho >= D)");
}
}  // namespace detail

/// Numeric T_n at a point.
template <class Scalar>
Scalar legendre_T(int n, const Vec3<Scalar>& rho, const Scalar& A, const Scalar& B, const Scalar& C,
                  const Scalar& D) {
  if (n < 0) throw InvalidArgument("Legendre degree must be non-negative");
  detail::check_domain(rho, A, B, C, D);
  const auto tab = legendre_table<Scalar, Scalar>(n, {rho.x(), rho.y(), rho.z()}, {A, B, C}, D, false);
  return tab.T[n];
}

/// Numeric dT_n/dq_j at a point, axis 0/1/2 for x/y/z.
template <class Scalar>
Scalar legendre_R(int n, int axis, const Vec3<Scalar>& rho, const Scalar& A, const Scalar& B,
                  const Scalar& C, const Scalar& D) {
  if (n < 1) throw InvalidArgument("derivative recurrence starts at degree 1");
  if (axis < 0 || axis > 2) throw InvalidArgument("axis must be 0, 1 or 2");
  detail::check_domain(rho, A, B, C, D);
  const auto tab = legendre_table<Scalar, Scalar>(n, {rho.x(), rho.y(), rho.z()}, {A, B, C}, D, true);
  return tab.R[axis][n];
}

// ---------------------------------------------------------------------------
// Right-hand sides in either mode. All results are *unscaled*: multiply by
// 1/|Gamma|^3 to obtain accelerations of the scaled coordinates.

/// sum_{n=n_min}^{n_max} [(1-mu)/D1 R_n^{q,1} + mu/D2 R_n^{q,2}] for q = x,y,z.
template <class V, class Scalar>
std::array<V, 3> grav_rhs(const std::array<V, 3>& coords, const ExpansionConstants<Scalar>& k, int n_max,
                          int n_min = 3, const LegendreTable<V, Scalar>* table1 = nullptr) {
  const Scalar mu = k.params.mu;
  LegendreTable<V, Scalar> own1;
  if (!table1) {
    own1 = legendre_table<V, Scalar>(n_max, coords, {k.A1, k.B, k.C}, k.D1);
    table1 = &own1;
  }
  const auto t2 = legendre_table<V, Scalar>(n_max, coords, {k.A2, k.B, k.C}, k.D2);
  std::array<V, 3> out{detail::vzero(coords[0]), detail::vzero(coords[0]), detail::vzero(coords[0])};
  const Scalar w1 = (Scalar(1) - mu) / k.D1, w2 = mu / k.D2;
  for (int q = 0; q < 3; ++q)
    for (int n = std::max(n_min, 1); n <= n_max; ++n) {
      out[q] = detail::vlin(out[q], Scalar(1), table1->R[q][n], w1);
      out[q] = detail::vlin(out[q], Scalar(1), t2.R[q][n], w2);
    }
  return out;
}

/// Series form of the sail acceleration with 1/r1 and 1/r_xy replaced by
/// their Legendre sums up to degree n_max (cubes and squares of the full sums).
template <class V, class Scalar>
std::array<V, 3> srp_rhs(const std::array<V, 3>& coords, const ExpansionConstants<Scalar>& k, int n_max,
                         const LegendreTable<V, Scalar>* table1 = nullptr) {
  using detail::vlin;
  using detail::vmul;
  using detail::vscale;
  const V zero = detail::vzero(coords[0]);
  std::array<V, 3> out{zero, zero, zero};
  if (k.f == Scalar(0)) return out;
  if (k.params.sin_alpha != Scalar(0) && !(k.Dxy > Scalar(0)))
    throw DegenerateGeometry("in-plane distance to the larger primary vanishes");
  LegendreTable<V, Scalar> own1;
  if (!table1) {
    own1 = legendre_table<V, Scalar>(n_max, coords, {k.A1, k.B, k.C}, k.D1, false);
    table1 = &own1;
  }
  const Scalar ca = k.params.cos_alpha, sa = k.params.sin_alpha;
  const Scalar cg = k.params.cos_gamma, sg = k.params.sin_gamma;

  V u = zero;  // 1/r1
  for (int n = 0; n <= n_max; ++n) u = vlin(u, Scalar(1), table1->T[n], Scalar(1));
  u = vscale(u, Scalar(1) / k.D1);
  const V u2 = vmul(u, u);
  const V u3 = vmul(u2, u);
  const V X = vlin(coords[0], Scalar(1), detail::vconst(coords[0], k.A1), Scalar(-1));
  const V Y = vlin(coords[1], Scalar(1), detail::vconst(coords[0], k.B), Scalar(-1));
  const V Z = vlin(coords[2], Scalar(1), detail::vconst(coords[0], k.C), Scalar(-1));

  out[0] = vscale(vmul(X, u3), ca);
  out[1] = vscale(vmul(Y, u3), ca);
  out[2] = vscale(vmul(Z, u3), ca);
  if (sa != Scalar(0)) {
    const auto txy = legendre_table<V, Scalar>(n_max, coords, {k.A1, k.B, Scalar(0)}, k.Dxy, false, 2);
    V w = zero;  // 1/r_xy
    for (int n = 0; n <= n_max; ++n) w = vlin(w, Scalar(1), txy.T[n], Scalar(1));
    w = vscale(w, Scalar(1) / k.Dxy);
    const V u2w = vmul(u2, w);
    const V u3w = vmul(u3, w);
    if (sg != Scalar(0)) {
      out[0] = vlin(out[0], Scalar(1), vmul(Y, u2w), sa * sg);
      out[1] = vlin(out[1], Scalar(1), vmul(X, u2w), -sa * sg);
    }
    if (cg != Scalar(0)) {
      out[0] = vlin(out[0], Scalar(1), vmul(vmul(Z, X), u3w), -sa * cg);
      out[1] = vlin(out[1], Scalar(1), vmul(vmul(Z, Y), u3w), -sa * cg);
      const V xy2 = vlin(vmul(X, X), Scalar(1), vmul(Y, Y), Scalar(1));
      out[2] = vlin(out[2], Scalar(1), vmul(xy2, u3w), sa * cg);
    }
  }
  for (auto& o : out) o = vscale(o, k.f);
  return out;
}

/// Series-mode wrappers used by the solver.
template <class Scalar>
std::array<TrigSeries<Scalar>, 3> grav_rhs_series(const TrigSeries<Scalar>& x, const TrigSeries<Scalar>& y,
                                                   const TrigSeries<Scalar>& z,
                                                   const ExpansionConstants<Scalar>& k, int n_min = 3) {
  const int n_max = x.max_order() + 1;
  return grav_rhs<TrigSeries<Scalar>, Scalar>({x, y, z}, k, n_max, n_min);
}

template <class Scalar> struct SrpSeriesParts {
  std::array<TrigSeries<Scalar>, 3> full;
  Vec3<Scalar> order0 = Vec3<Scalar>::Zero();
};

template <class Scalar>
SrpSeriesParts<Scalar> srp_rhs_series(const TrigSeries<Scalar>& x, const TrigSeries<Scalar>& y,
                                      const TrigSeries<Scalar>& z, const ExpansionConstants<Scalar>& k);

/// Constant part of the sail acceleration (value of the series at rho = 0).
template <class Scalar> Vec3<Scalar> srp_order0(const ExpansionConstants<Scalar>& k) {
  if (k.f == Scalar(0)) return Vec3<Scalar>::Zero();
  const Scalar ca = k.params.cos_alpha, sa = k.params.sin_alpha;
  const Scalar cg = k.params.cos_gamma, sg = k.params.sin_gamma;
  const Scalar D1 = k.D1, D12 = D1 * D1;
  Vec3<Scalar> a;
  if (sa == Scalar(0)) {
    a << -k.A1 * ca / D1, -k.B * ca / D1, -k.C * ca / D1;
    a /= D12;
  } else {
    if (!(k.Dxy > Scalar(0))) throw DegenerateGeometry("in-plane distance to the larger primary vanishes");
    a.x() = (-k.A1 * ca / D1 - k.B * sa * sg / k.Dxy - k.A1 * k.C * cg * sa / (D1 * k.Dxy)) / D12;
    a.y() = (-k.B * ca / D1 + k.A1 * sa * sg / k.Dxy - k.B * k.C * cg * sa / (D1 * k.Dxy)) / D12;
    a.z() = (-k.C * ca + (k.A1 * k.A1 + k.B * k.B) * cg * sa / k.Dxy) / (D12 * D1);
  }
  return k.f * a;
}

template <class Scalar>
SrpSeriesParts<Scalar> srp_rhs_series(const TrigSeries<Scalar>& x, const TrigSeries<Scalar>& y,
                                      const TrigSeries<Scalar>& z, const ExpansionConstants<Scalar>& k) {
  SrpSeriesParts<Scalar> out;
  out.full = srp_rhs<TrigSeries<Scalar>, Scalar>({x, y, z}, k, x.max_order());
  out.order0 = srp_order0(k);
  return out;
}

/// Closed-form gradient constants of the equilibrium's sail term, in the
/// barycentric (unscaled) units they are written in. These equal minus the
/// sail acceleration at the equilibrium.
template <class Scalar> Vec3<Scalar> g_gradient(const Aep<Scalar>& aep) {
  using std::sqrt;
  const auto& p = aep.params;
  const auto& H = aep.position;
  if (p.beta == Scalar(0) || p.cos_alpha == Scalar(0)) return Vec3<Scalar>::Zero();
  const Scalar X = H.x() + p.mu, Y = H.y(), Z = H.z();
  const Scalar rxy2 = X * X + Y * Y;
  const Scalar rxy = sqrt(rxy2);
  const Scalar rL = sqrt(rxy2 + Z * Z);
  if (!(rL > Scalar(0))) throw DegenerateGeometry("equilibrium coincides with the larger primary");
  const Scalar ca = p.cos_alpha, sa = p.sin_alpha, cg = p.cos_gamma, sg = p.sin_gamma;
  const Scalar pre = p.beta * (p.mu - Scalar(1)) * ca * ca;
  Vec3<Scalar> g;
  if (sa == Scalar(0)) {
    g << X * ca / rL, Y * ca / rL, Z * ca / rL;
    return pre / (rL * rL) * g;
  }
  if (!(rxy > Scalar(0))) throw DegenerateGeometry("equilibrium on the axis through the larger primary");
  g.x() = (X * ca / rL - Z * X * (rxy / rL) * cg * sa / rxy2 + Y * sa * sg / rxy) / (rL * rL);
  g.y() = (Y * ca / rL - Y * Z * (rxy / rL) * cg * sa / rxy2 - X * sa * sg / rxy) / (rL * rL);
  g.z() = (Z * ca + rxy * cg * sa) / (rL * rL * rL);
  return pre * g;
}

/// The sail term G(rho) = (1-mu) beta cos^2(alpha) (n(r_L) . rho) / r_L^2,
/// with rho in barycentric units; used as a finite-difference oracle.
template <class Scalar> Scalar g_term(const Aep<Scalar>& aep, const Vec3<Scalar>& rho) {
  const auto& p = aep.params;
  const Vec3<Scalar> rL(aep.position.x() + p.mu, aep.position.y(), aep.position.z());
  const Vec3<Scalar> n = sail_normal(aep.position, p);
  return (Scalar(1) - p.mu) * p.beta * p.cos_alpha * p.cos_alpha * n.dot(rho) / rL.squaredNorm();
}

}  // namespace lpsrp
