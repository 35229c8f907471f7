#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

#include <Eigen/Dense>

namespace lpsrp {

template <class Scalar> using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <class Scalar> using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <class Scalar> using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <class Scalar> using Mat6 = Eigen::Matrix<Scalar, 6, 6>;

template <class Scalar> inline Scalar pi() {
  using std::acos;
  return acos(Scalar(-1));
}

template <class Scalar> inline Scalar deg2rad(const Scalar& deg) {
  return deg * pi<Scalar>() / Scalar(180);
}

template <class Scalar> inline Scalar rad2deg(const Scalar& rad) {
  return rad * Scalar(180) / pi<Scalar>();
}

template <class Scalar> inline double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

template <class Scalar> inline bool isfinite_scalar(const Scalar& x) {
  return std::isfinite(static_cast<double>(x)) || (x == x && x - x == Scalar(0));
}

template <class Scalar> inline Scalar epsilon() {
  return std::numeric_limits<Scalar>::epsilon();
}

/// Coefficients smaller than this (in absolute value) are dropped from
/// truncated series. 1e-18 at double precision; scaled down for wider types.
template <class Scalar> inline Scalar default_prune_threshold() {
  if constexpr (std::is_same_v<Scalar, double>) {
    return Scalar(1e-18);
  } else if constexpr (std::is_same_v<Scalar, long double>) {
    return Scalar(1e-22L);
  } else {
    return Scalar(1e-40);
  }
}

/// cos and sin of an angle, snapped to exact values at multiples of pi/2 so
/// that edge-on / face-on attitudes reduce exactly.
template <class Scalar> struct CosSin {
  Scalar c;
  Scalar s;
};

template <class Scalar> CosSin<Scalar> snapped_cos_sin(const Scalar& angle) {
  using std::abs;
  using std::cos;
  using std::round;
  using std::sin;
  const Scalar half_pi = pi<Scalar>() / 2;
  const Scalar quarter_turns = angle / half_pi;
  const Scalar nearest = round(quarter_turns);
  if (abs(quarter_turns - nearest) <= Scalar(16) * epsilon<Scalar>()) {
    long q = static_cast<long>(to_double(nearest)) % 4;
    if (q < 0) q += 4;
    switch (q) {
      case 0: return {Scalar(1), Scalar(0)};
      case 1: return {Scalar(0), Scalar(1)};
      case 2: return {Scalar(-1), Scalar(0)};
      default: return {Scalar(0), Scalar(-1)};
    }
  }
  return {cos(angle), sin(angle)};
}

}  // namespace lpsrp
