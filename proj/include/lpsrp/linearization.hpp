#pragma once

// Linear model about an equilibrium: the matrix Omega*, the constant forcing,
// the modal structure of the 6x6 first-order system and the k-coefficients
// of the closed-form linear solution.

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Eigenvalues>

#include "lpsrp/expansions.hpp"

namespace lpsrp {

template <class Scalar> struct LinearModel {
  Aep<Scalar> aep;
  ExpansionConstants<Scalar> consts;
  Mat3<Scalar> omega_star = Mat3<Scalar>::Zero();
  Mat3<Scalar> grav_linear = Mat3<Scalar>::Zero();  // unscaled degree-1 gravity part
  Mat3<Scalar> srp_linear = Mat3<Scalar>::Zero();   // unscaled degree-1 sail part
  Vec3<Scalar> forcing = Vec3<Scalar>::Zero();
  Scalar lambda_r{}, lambda_minus{}, omega_0{}, nu_0{};
  Scalar omega_r{}, nu_r{};  // diagnostics only; treated as zero downstream
  std::array<Scalar, 18> k{};  // k[1]..k[17]
  std::array<std::complex<Scalar>, 6> eigenvalues{};
  Vec3<Scalar> v1 = Vec3<Scalar>::Zero(), v2 = Vec3<Scalar>::Zero();
  Vec3<Scalar> u1 = Vec3<Scalar>::Zero(), w1 = Vec3<Scalar>::Zero();
  Vec3<Scalar> u2 = Vec3<Scalar>::Zero(), w2 = Vec3<Scalar>::Zero();
};

/// Coriolis coupling: rho'' = Omega* rho + 2 J rho'.
template <class Scalar> Mat3<Scalar> coriolis_matrix() {
  Mat3<Scalar> J = Mat3<Scalar>::Zero();
  J(0, 1) = Scalar(1);
  J(1, 0) = Scalar(-1);
  return J;
}

/// Degree-1 parts of the gravity and sail expansions, read off by feeding
/// one formal amplitude per coordinate through the series machinery.
template <class Scalar>
std::pair<Mat3<Scalar>, Mat3<Scalar>> linear_parts(const ExpansionConstants<Scalar>& k) {
  using S = TrigSeries<Scalar>;
  const std::array<S, 3> unit{S::monomial(1, TermIndex{1, 0, 0, 0, 0, 0}, Scalar(1)),
                              S::monomial(1, TermIndex{0, 1, 0, 0, 0, 0}, Scalar(1)),
                              S::monomial(1, TermIndex{0, 0, 1, 0, 0, 0}, Scalar(1))};
  const std::array<TermIndex, 3> probe{TermIndex{1, 0, 0, 0, 0, 0}, TermIndex{0, 1, 0, 0, 0, 0},
                                       TermIndex{0, 0, 1, 0, 0, 0}};
  const auto grav = grav_rhs<S, Scalar>(unit, k, 2, 2);
  const auto srp = srp_rhs<S, Scalar>(unit, k, 1);
  Mat3<Scalar> G, P;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      G(r, c) = grav[r].get(probe[c]).c;
      P(r, c) = srp[r].get(probe[c]).c;
    }
  return {G, P};
}

template <class Scalar> Mat3<Scalar> omega_star_matrix(const ExpansionConstants<Scalar>& k) {
  const auto [G, P] = linear_parts(k);
  Mat3<Scalar> W = (G + P) / k.gamma3();
  W(0, 0) += Scalar(1);
  W(1, 1) += Scalar(1);
  return W;
}

template <class Scalar> Mat3<Scalar> omega_star_matrix(const Aep<Scalar>& aep) {
  return omega_star_matrix(ExpansionConstants<Scalar>::from_aep(aep));
}

/// Constant right-hand side of the translated equations. The closed-form
/// gradient constants are carried into scaled units (factor |Gamma|^2)
/// before they are combined with the constant sail term.
template <class Scalar> Vec3<Scalar> constant_forcing(const Aep<Scalar>& aep) {
  const auto k = ExpansionConstants<Scalar>::from_aep(aep);
  const Scalar g2 = k.gamma_norm * k.gamma_norm;
  return (g2 * g_gradient(aep) + srp_order0(k)) / k.gamma3();
}

/// det(l^2 I - 2 l J - Omega*) for complex l.
template <class Scalar>
std::complex<Scalar> characteristic_value(const Mat3<Scalar>& W, const std::complex<Scalar>& l) {
  using C = std::complex<Scalar>;
  const Mat3<Scalar> J = coriolis_matrix<Scalar>();
  Eigen::Matrix<C, 3, 3> M;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      M(r, c) = (r == c ? l * l : C(0)) - C(Scalar(2)) * l * C(J(r, c)) - C(W(r, c));
  return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
         M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
         M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
}

template <class Scalar> Mat6<Scalar> first_order_matrix(const Mat3<Scalar>& W) {
  Mat6<Scalar> A = Mat6<Scalar>::Zero();
  A.template topRightCorner<3, 3>().setIdentity();
  A.template bottomLeftCorner<3, 3>() = W;
  A.template bottomRightCorner<3, 3>() = Scalar(2) * coriolis_matrix<Scalar>();
  return A;
}

/// Modal decomposition; fills rates, eigenvectors and the diagnostic real
/// parts. Throws StructureViolation on any other root pattern.
template <class Scalar> void eigenstructure(LinearModel<Scalar>& m) {
  using std::abs;
  using C = std::complex<Scalar>;
  Eigen::EigenSolver<Mat6<Scalar>> es(first_order_matrix(m.omega_star));
  if (es.info() != Eigen::Success) throw StructureViolation("eigen-decomposition failed");
  const auto vals = es.eigenvalues();
  const auto vecs = es.eigenvectors();
  Scalar scale = 0;
  for (int n = 0; n < 6; ++n) {
    m.eigenvalues[n] = vals(n);
    scale = std::max(scale, Scalar(abs(vals(n))));
  }
  const Scalar real_tol = Scalar(1e-8) * scale;
  int pos = -1, neg = -1;
  std::vector<int> upper;  // complex roots with positive imaginary part
  int lower = 0;
  for (int n = 0; n < 6; ++n) {
    const Scalar im = vals(n).imag(), re = vals(n).real();
    if (abs(im) <= real_tol) {
      if (re > Scalar(0) && pos < 0) pos = n;
      else if (re < Scalar(0) && neg < 0) neg = n;
      else throw StructureViolation("unexpected real eigenvalue pattern");
    } else if (im > Scalar(0)) {
      upper.push_back(n);
    } else {
      ++lower;
    }
  }
  if (pos < 0 || neg < 0 || upper.size() != 2 || lower != 2)
    throw StructureViolation("linear system is not one real pair plus two complex pairs");

  auto pos_part = [&](int n) {
    Eigen::Matrix<C, 3, 1> v = vecs.col(n).template head<3>();
    return v;
  };
  // in-plane versus out-of-plane content decides which pair is which
  auto planar_fraction = [&](int n) {
    const auto v = pos_part(n);
    const Scalar inplane = std::norm(v(0)) + std::norm(v(1));
    const Scalar total = inplane + std::norm(v(2));
    return inplane / total;
  };
  int iw = upper[0], inu = upper[1];
  const Scalar fa = planar_fraction(iw), fb = planar_fraction(inu);
  if (abs(fa - fb) <= Scalar(1e-12)) {
    if (vals(inu).imag() > vals(iw).imag()) std::swap(iw, inu);
  } else if (fb > fa) {
    std::swap(iw, inu);
  }
  m.lambda_r = vals(pos).real();
  m.lambda_minus = vals(neg).real();
  m.omega_r = vals(iw).real();
  m.omega_0 = vals(iw).imag();
  m.nu_r = vals(inu).real();
  m.nu_0 = vals(inu).imag();
  if (abs(m.omega_r) >= Scalar(1e-3) || abs(m.nu_r) >= Scalar(1e-3))
    throw StructureViolation("real part of an oscillatory pair exceeds 1e-3");

  auto real_vec = [&](int n, Vec3<Scalar>& out) {
    const auto v = pos_part(n);
    // eigenvector of a real eigenvalue is real up to a complex phase
    const int piv = std::norm(v(0)) >= std::norm(v(1)) ? 0 : 1;
    const C phase = v(piv) / C(abs(v(piv)));
    for (int r = 0; r < 3; ++r) out(r) = (v(r) / phase).real();
  };
  real_vec(pos, m.v1);
  real_vec(neg, m.v2);
  const auto a = pos_part(iw);
  const auto b = pos_part(inu);
  for (int r = 0; r < 3; ++r) {
    m.u1(r) = a(r).real();
    m.w1(r) = a(r).imag();
    m.u2(r) = b(r).real();
    m.w2(r) = b(r).imag();
  }
}

/// k-coefficients fixed by unit x-components (hyperbolic and in-plane modes)
/// and a unit z-component (out-of-plane mode).
template <class Scalar> void k_coefficients(LinearModel<Scalar>& m) {
  using std::abs;
  using C = std::complex<Scalar>;
  const Scalar tiny = Scalar(1e3) * epsilon<Scalar>();
  auto& k = m.k;
  k.fill(Scalar(0));
  auto need = [&](const Scalar& v, const char* what) {
    if (abs(v) <= tiny * std::max(Scalar(1), Scalar(m.v1.norm())))
      throw ZeroNormalizationComponent(std::string("zero normalization component: ") + what);
  };
  need(m.v1.x(), "x of the unstable eigenvector");
  need(m.v2.x(), "x of the stable eigenvector");
  k[1] = m.v1.y() / m.v1.x();
  k[3] = m.v1.z() / m.v1.x();
  k[2] = m.v2.y() / m.v2.x();
  k[4] = m.v2.z() / m.v2.x();

  const Eigen::Matrix<C, 3, 1> a(C(m.u1(0), m.w1(0)), C(m.u1(1), m.w1(1)), C(m.u1(2), m.w1(2)));
  const Eigen::Matrix<C, 3, 1> b(C(m.u2(0), m.w2(0)), C(m.u2(1), m.w2(1)), C(m.u2(2), m.w2(2)));
  if (abs(a(0)) <= tiny * Scalar(a.norm())) throw ZeroNormalizationComponent("in-plane mode has no x content");
  if (abs(b(2)) <= tiny * Scalar(b.norm())) throw ZeroNormalizationComponent("out-of-plane mode has no z content");
  const Eigen::Matrix<C, 3, 1> an = a / a(0);
  const Eigen::Matrix<C, 3, 1> bn = b / b(2);
  // Re(v e^{i th}) = Re(v) cos th - Im(v) sin th
  k[14] = -an(0).imag();
  k[7] = an(1).real();
  k[8] = -an(1).imag();
  k[11] = an(2).real();
  k[12] = -an(2).imag();
  k[5] = bn(0).real();
  k[6] = -bn(0).imag();
  k[9] = bn(1).real();
  k[10] = -bn(1).imag();
  k[13] = -bn(2).imag();

  Eigen::FullPivLU<Mat3<Scalar>> lu(m.omega_star);
  if (lu.rank() < 3) throw SingularOmegaStar("Omega* is singular; no static particular solution");
  const Vec3<Scalar> X = lu.solve(Vec3<Scalar>(-m.forcing));
  k[15] = X.x();
  k[16] = X.y();
  k[17] = X.z();
}

template <class Scalar> LinearModel<Scalar> build_linear_model(const Aep<Scalar>& aep) {
  LinearModel<Scalar> m;
  m.aep = aep;
  m.consts = ExpansionConstants<Scalar>::from_aep(aep);
  const auto [G, P] = linear_parts(m.consts);
  m.grav_linear = G;
  m.srp_linear = P;
  m.omega_star = (G + P) / m.consts.gamma3();
  m.omega_star(0, 0) += Scalar(1);
  m.omega_star(1, 1) += Scalar(1);
  m.forcing = constant_forcing(aep);
  eigenstructure(m);
  k_coefficients(m);
  return m;
}

/// Closed-form linear solution with the real parts of the oscillatory pairs
/// set to zero. Returns scaled coordinates relative to the equilibrium.
template <class Scalar>
Vec3<Scalar> linear_solution(const LinearModel<Scalar>& m, const Scalar& t, const std::array<Scalar, 4>& a,
                             const Scalar& phi1, const Scalar& phi2) {
  using std::cos;
  using std::exp;
  using std::sin;
  const auto& k = m.k;
  const Scalar ep = exp(m.lambda_r * t), em = exp(-m.lambda_r * t);
  const Scalar c1 = cos(m.omega_0 * t + phi1), s1 = sin(m.omega_0 * t + phi1);
  const Scalar c2 = cos(m.nu_0 * t + phi2), s2 = sin(m.nu_0 * t + phi2);
  Vec3<Scalar> r;
  r.x() = a[0] * ep + a[1] * em + a[2] * (c1 + k[14] * s1) + a[3] * (k[5] * c2 + k[6] * s2) + k[15];
  r.y() = k[1] * a[0] * ep + k[2] * a[1] * em + a[2] * (k[7] * c1 + k[8] * s1) +
          a[3] * (k[9] * c2 + k[10] * s2) + k[16];
  r.z() = k[3] * a[0] * ep + k[4] * a[1] * em + a[2] * (k[11] * c1 + k[12] * s1) +
          a[3] * (c2 + k[13] * s2) + k[17];
  return r;
}

}  // namespace lpsrp
