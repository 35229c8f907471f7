#pragma once

// Artificial equilibrium points: zeros of grad(Omega) + a_SRP.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lpsrp/dynamics.hpp"

namespace lpsrp {

template <class Scalar> struct Aep {
  Vec3<Scalar> position = Vec3<Scalar>::Zero();
  SystemParams<Scalar> params;
  Scalar residual_norm{};
  int iterations = 0;

  /// Position of the smaller primary relative to the equilibrium.
  Vec3<Scalar> gamma_vec() const {
    return Vec3<Scalar>(Scalar(1) - position.x() - params.mu, -position.y(), -position.z());
  }
  Scalar gamma_norm() const { return gamma_vec().norm(); }
  /// Distance from the larger primary.
  Scalar r_l() const {
    return Vec3<Scalar>(position.x() + params.mu, position.y(), position.z()).norm();
  }
};

template <class Scalar> struct NewtonOptions {
  Scalar tolerance = default_tolerance();
  int max_iterations = 50;
  int polish_steps = 2;

  static Scalar default_tolerance() {
    if constexpr (std::is_same_v<Scalar, double>) return Scalar(1e-12);
    else return Scalar(1e4) * epsilon<Scalar>();
  }
};

namespace detail {

// x - (1-mu)(x+mu)/|x+mu|^3 - mu(x-1+mu)/|x-1+mu|^3 on the x-axis.
template <class Scalar> Scalar collinear_balance(const Scalar& x, const Scalar& mu) {
  using std::abs;
  const Scalar d1 = x + mu, d2 = x - Scalar(1) + mu;
  return x - (Scalar(1) - mu) * d1 / (abs(d1) * d1 * d1) - mu * d2 / (abs(d2) * d2 * d2);
}

}  // namespace detail

/// Classical Lagrange points. Collinear ones are bracketed and bisected down
/// to the last representable bit; the balance function is increasing on
/// each bracket.
template <class Scalar> Vec3<Scalar> classical_lagrange_point(const Scalar& mu, int index) {
  using std::sqrt;
  if (!(mu > Scalar(0) && mu <= Scalar(0.5)))
    throw InvalidArgument("mass ratio mu must lie in (0, 0.5]");
  if (index == 4 || index == 5) {
    const Scalar y = sqrt(Scalar(3)) / 2;
    return Vec3<Scalar>(Scalar(0.5) - mu, index == 4 ? y : -y, Scalar(0));
  }
  Scalar lo, hi;
  const Scalar tiny = Scalar(64) * epsilon<Scalar>();
  switch (index) {
    case 1: lo = -mu + tiny; hi = Scalar(1) - mu - tiny; break;
    case 2: lo = Scalar(1) - mu + tiny; hi = Scalar(2); break;
    case 3: lo = Scalar(-2); hi = -mu - tiny; break;
    default: throw InvalidArgument("Lagrange point index must be 1..5");
  }
  for (int it = 0; it < 400; ++it) {
    const Scalar mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    if (detail::collinear_balance(mid, mu) < Scalar(0)) lo = mid;
    else hi = mid;
  }
  const Scalar flo = detail::collinear_balance(lo, mu), fhi = detail::collinear_balance(hi, mu);
  using std::abs;
  return Vec3<Scalar>(abs(flo) <= abs(fhi) ? lo : hi, Scalar(0), Scalar(0));
}

/// Damped Newton iteration on F(X) = grad(Omega) + a_SRP.
template <class Scalar>
Aep<Scalar> find_aep(const SystemParams<Scalar>& params, const Vec3<Scalar>& guess,
                     const NewtonOptions<Scalar>& opt = {}) {
  using std::isfinite;
  params.validate();
  Vec3<Scalar> x = guess;
  Vec3<Scalar> F = force_field(x, params);
  Scalar res = F.norm();
  int it = 0;
  auto newton_step = [&](const Vec3<Scalar>& at, const Vec3<Scalar>& rhs) {
    const Mat3<Scalar> J = force_field_jacobian(at, params);
    Eigen::FullPivLU<Mat3<Scalar>> lu(J);
    if (lu.rank() < 3) throw SingularJacobian("force-field Jacobian is singular");
    return Vec3<Scalar>(lu.solve(rhs));
  };
  while (res > opt.tolerance) {
    if (it >= opt.max_iterations)
      throw NoConvergence("Newton iteration did not converge within " +
                          std::to_string(opt.max_iterations) + " iterations");
    const Vec3<Scalar> dx = newton_step(x, F);
    Scalar step = 1;
    Vec3<Scalar> xn;
    Vec3<Scalar> Fn;
    Scalar rn = res;
    for (int halving = 0; halving < 40; ++halving) {
      xn = x - step * dx;
      try {
        Fn = force_field(xn, params);
        rn = Fn.norm();
      } catch (const DegenerateGeometry&) {
        rn = std::numeric_limits<Scalar>::infinity();
      }
      if (isfinite(static_cast<double>(rn)) && rn < res) break;
      step /= 2;
    }
    ++it;
    if (!(rn < res)) {
      // no decrease along the Newton direction: accept if already at the noise floor
      break;
    }
    x = xn;
    F = Fn;
    res = rn;
  }
  if (res > opt.tolerance)
    throw NoConvergence("Newton iteration stalled at residual " +
                        std::to_string(static_cast<double>(res)));
  for (int k = 0; k < opt.polish_steps; ++k) {
    const Vec3<Scalar> xn = x - newton_step(x, F);
    const Vec3<Scalar> Fn = force_field(xn, params);
    if (!(Fn.norm() < res)) break;
    x = xn;
    F = Fn;
    res = Fn.norm();
  }
  Aep<Scalar> out;
  out.position = x;
  out.params = params;
  out.residual_norm = res;
  out.iterations = it;
  return out;
}

/// Convenience: seed from the classical Lagrange point with the given index.
template <class Scalar>
Aep<Scalar> find_aep(const SystemParams<Scalar>& params, int lagrange_index = 2) {
  return find_aep(params, classical_lagrange_point(params.mu, lagrange_index));
}

template <class Scalar> struct SweepCell {
  Scalar alpha_deg{}, gamma_deg{};
  Vec3<Scalar> position = Vec3<Scalar>::Constant(std::numeric_limits<Scalar>::quiet_NaN());
  Scalar residual = std::numeric_limits<Scalar>::quiet_NaN();
  bool converged = false;
  std::string message;
};

/// Sweep over an attitude grid. Rows run over gamma, columns over alpha; each
/// cell is seeded from its converged left neighbour (or the row above at the
/// first column), falling back to the classical point.
template <class Scalar>
std::vector<SweepCell<Scalar>> sweep_aep(const Scalar& mu, const Scalar& beta,
                                         const std::vector<Scalar>& alpha_deg,
                                         const std::vector<Scalar>& gamma_deg, int seed_index = 2) {
  auto monotone = [](const std::vector<Scalar>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  if (alpha_deg.empty() || gamma_deg.empty()) throw InvalidArgument("sweep grids must not be empty");
  if (!monotone(alpha_deg) || !monotone(gamma_deg))
    throw InvalidArgument("sweep grids must be strictly increasing");
  const Vec3<Scalar> classical = classical_lagrange_point(mu, seed_index);
  std::vector<SweepCell<Scalar>> out;
  out.reserve(alpha_deg.size() * gamma_deg.size());
  std::optional<Vec3<Scalar>> row_seed;
  for (const Scalar& g : gamma_deg) {
    std::optional<Vec3<Scalar>> left;
    std::optional<Vec3<Scalar>> first_in_row;
    for (const Scalar& a : alpha_deg) {
      SweepCell<Scalar> cell;
      cell.alpha_deg = a;
      cell.gamma_deg = g;
      const auto params = SystemParams<Scalar>::from_degrees(mu, beta, a, g);
      Vec3<Scalar> seed = left ? *left : (row_seed ? *row_seed : classical);
      auto attempt = [&](const Vec3<Scalar>& s) {
        const auto aep = find_aep(params, s);
        cell.position = aep.position;
        cell.residual = aep.residual_norm;
        cell.converged = true;
        cell.message.clear();
      };
      try {
        attempt(seed);
      } catch (const Error& e) {
        cell.message = e.what();
        if (seed != classical) {
          try {
            attempt(classical);
          } catch (const Error& e2) {
            cell.message = e2.what();
          }
        }
      }
      if (cell.converged) {
        left = cell.position;
        if (!first_in_row) first_in_row = cell.position;
      }
      out.push_back(cell);
    }
    if (first_in_row) row_seed = first_in_row;
  }
  return out;
}

}  // namespace lpsrp
