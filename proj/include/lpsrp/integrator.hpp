#pragma once

// Dormand-Prince 5(4) with Hairer's continuous extension.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "lpsrp/dynamics.hpp"

namespace lpsrp {

template <class Scalar> struct IntegratorConfig {
  Scalar abs_tol = Scalar(1e-14);
  Scalar rel_tol = Scalar(1e-14);
  Scalar max_step = std::numeric_limits<Scalar>::infinity();
  Scalar initial_step = 0;  // 0 picks one automatically
  long max_steps = 2000000;
  bool dense = false;

  /// Lowest relative tolerance accepted; requests below it are raised to it.
  /// The absolute tolerance is left alone so that small deviation states can
  /// be integrated with a matching scale.
  static Scalar tolerance_floor() {
    if constexpr (std::is_same_v<Scalar, double>) return Scalar(1e-14);
    else return Scalar(100) * epsilon<Scalar>();
  }
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
  bool tolerance_clamped = false;
};

namespace dopri {

template <class Scalar> struct Tableau {
  static Scalar r(long a, long b) { return Scalar(a) / Scalar(b); }
  const Scalar c2 = r(1, 5), c3 = r(3, 10), c4 = r(4, 5), c5 = r(8, 9);
  const Scalar a21 = r(1, 5);
  const Scalar a31 = r(3, 40), a32 = r(9, 40);
  const Scalar a41 = r(44, 45), a42 = r(-56, 15), a43 = r(32, 9);
  const Scalar a51 = r(19372, 6561), a52 = r(-25360, 2187), a53 = r(64448, 6561), a54 = r(-212, 729);
  const Scalar a61 = r(9017, 3168), a62 = r(-355, 33), a63 = r(46732, 5247), a64 = r(49, 176),
               a65 = r(-5103, 18656);
  const Scalar a71 = r(35, 384), a73 = r(500, 1113), a74 = r(125, 192), a75 = r(-2187, 6784), a76 = r(11, 84);
  // fifth minus fourth order weights
  const Scalar e1 = r(71, 57600), e3 = r(-71, 16695), e4 = r(71, 1920), e5 = r(-17253, 339200),
               e6 = r(22, 525), e7 = r(-1, 40);
  const Scalar d1 = r(-12715105075L, 11282082432L), d3 = r(87487479700L, 32700410799L),
               d4 = r(-10690763975L, 1880347072L), d5 = r(701980252875L, 199316789632L),
               d6 = r(-1453857185L, 822651844L), d7 = r(69997945L, 29380423L);
};

}  // namespace dopri

/// One accepted step's interpolant.
template <class Vec> struct DenseSegment {
  using Scalar = typename Vec::Scalar;
  Scalar t0{}, h{};
  Vec r1, r2, r3, r4, r5;

  Vec operator()(const Scalar& t) const {
    const Scalar th = (t - t0) / h, th1 = Scalar(1) - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
};

template <class Vec> struct Propagation {
  using Scalar = typename Vec::Scalar;
  Scalar t_final{};
  Vec y_final;
  IntegratorStats stats;
  std::vector<DenseSegment<Vec>> segments;  // filled when dense output is on

  /// Dense evaluation anywhere between the start and t_final.
  Vec operator()(const Scalar& t) const {
    if (segments.empty()) throw InvalidArgument("propagation was run without dense output");
    const bool fwd = segments.front().h > Scalar(0);
    auto it = std::upper_bound(segments.begin(), segments.end(), t, [fwd](const Scalar& v, const auto& s) {
      return fwd ? v < s.t0 : v > s.t0;
    });
    if (it != segments.begin()) --it;
    return (*it)(t);
  }
};

/// Integrates y' = f(t, y) from t0 to t1 (either direction). The last step
/// is clipped to land on t1 exactly.
template <class Vec, class F>
Propagation<Vec> propagate(F&& f, const Vec& y0, const typename Vec::Scalar& t0, const typename Vec::Scalar& t1,
                           const IntegratorConfig<typename Vec::Scalar>& cfg = {}) {
  using Scalar = typename Vec::Scalar;
  using std::abs;
  using std::max;
  using std::min;
  using std::pow;
  using std::sqrt;
  if (!(cfg.abs_tol > Scalar(0)) || !(cfg.rel_tol > Scalar(0)))
    throw InvalidArgument("integrator tolerances must be positive");
  if (!isfinite_scalar(t0) || !isfinite_scalar(t1)) throw InvalidArgument("time span must be finite");
  for (int i = 0; i < y0.size(); ++i)
    if (!isfinite_scalar(y0(i))) throw InvalidArgument("initial state must be finite");
  static const dopri::Tableau<Scalar> T;
  Propagation<Vec> out;
  const Scalar floor = IntegratorConfig<Scalar>::tolerance_floor();
  const Scalar atol = cfg.abs_tol, rtol = max(cfg.rel_tol, floor);
  out.stats.tolerance_clamped = rtol != cfg.rel_tol;
  const int n = int(y0.size());
  auto rhs = [&](const Scalar& t, const Vec& y) {
    ++out.stats.evaluations;
    return Vec(f(t, y));
  };
  auto err_norm = [&](const Vec& e, const Vec& ya, const Vec& yb) {
    Scalar s = 0;
    for (int i = 0; i < n; ++i) {
      const Scalar sc = atol + rtol * max(Scalar(abs(ya(i))), Scalar(abs(yb(i))));
      s += (e(i) / sc) * (e(i) / sc);
    }
    return sqrt(s / Scalar(n));
  };

  Scalar t = t0;
  Vec y = y0;
  out.t_final = t0;
  out.y_final = y0;
  if (t1 == t0) return out;
  const Scalar dir = t1 > t0 ? Scalar(1) : Scalar(-1);
  const Scalar span = abs(t1 - t0);
  const Scalar hmax = min(Scalar(cfg.max_step), span);
  Vec k1 = rhs(t, y);

  Scalar h;
  if (cfg.initial_step > Scalar(0)) {
    h = min(Scalar(cfg.initial_step), hmax);
  } else {
    // Hairer's starting-step heuristic
    Vec sc(n);
    for (int i = 0; i < n; ++i) sc(i) = atol + rtol * abs(y(i));
    const Scalar d0 = sqrt((y.cwiseQuotient(sc)).squaredNorm() / Scalar(n));
    const Scalar d1 = sqrt((k1.cwiseQuotient(sc)).squaredNorm() / Scalar(n));
    Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6) : Scalar(0.01) * d0 / d1;
    h0 = min(h0, hmax);
    const Vec y1 = y + dir * h0 * k1;
    const Vec k2 = rhs(t + dir * h0, y1);
    const Scalar d2 = sqrt(((k2 - k1).cwiseQuotient(sc)).squaredNorm() / Scalar(n)) / h0;
    const Scalar dm = max(d1, d2);
    const Scalar h1 = dm <= Scalar(1e-15) ? max(Scalar(1e-6), h0 * Scalar(1e-3))
                                          : Scalar(pow(Scalar(0.01) / dm, Scalar(1) / Scalar(5)));
    h = min(min(Scalar(100) * h0, h1), hmax);
  }

  const Scalar safety = Scalar(0.9), facmin = Scalar(0.2), facmax = Scalar(10), beta = Scalar(0.04);
  const Scalar expo = Scalar(0.2) - beta * Scalar(0.75);
  Scalar err_old = Scalar(1e-4);
  bool last_rejected = false;
  long steps = 0;
  while (true) {
    const Scalar remaining = abs(t1 - t);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    if (h < Scalar(16) * epsilon<Scalar>() * max(Scalar(abs(t)), Scalar(1)))
      throw StepSizeUnderflow("step size underflow at t = " + std::to_string(to_double(t)));
    if (++steps > cfg.max_steps) throw MaxStepsExceeded("integrator exceeded " + std::to_string(cfg.max_steps) + " steps");
    const Scalar hs = dir * h;
    const Vec k2 = rhs(t + T.c2 * hs, y + hs * (T.a21 * k1));
    const Vec k3 = rhs(t + T.c3 * hs, y + hs * (T.a31 * k1 + T.a32 * k2));
    const Vec k4 = rhs(t + T.c4 * hs, y + hs * (T.a41 * k1 + T.a42 * k2 + T.a43 * k3));
    const Vec k5 = rhs(t + T.c5 * hs, y + hs * (T.a51 * k1 + T.a52 * k2 + T.a53 * k3 + T.a54 * k4));
    const Vec k6 = rhs(t + hs, y + hs * (T.a61 * k1 + T.a62 * k2 + T.a63 * k3 + T.a64 * k4 + T.a65 * k5));
    const Vec yn = y + hs * (T.a71 * k1 + T.a73 * k3 + T.a74 * k4 + T.a75 * k5 + T.a76 * k6);
    const Scalar tn = last ? t1 : t + hs;
    const Vec k7 = rhs(tn, yn);
    const Vec e = hs * (T.e1 * k1 + T.e3 * k3 + T.e4 * k4 + T.e5 * k5 + T.e6 * k6 + T.e7 * k7);
    const Scalar err = err_norm(e, y, yn);
    if (!isfinite_scalar(err)) {
      ++out.stats.rejected;
      h *= facmin;
      last_rejected = true;
      continue;
    }
    if (err <= Scalar(1)) {
      ++out.stats.accepted;
      if (cfg.dense) {
        DenseSegment<Vec> seg;
        seg.t0 = t;
        seg.h = hs;
        seg.r1 = y;
        seg.r2 = yn - y;
        seg.r3 = hs * k1 - seg.r2;
        seg.r4 = seg.r2 - hs * k7 - seg.r3;
        seg.r5 = hs * (T.d1 * k1 + T.d3 * k3 + T.d4 * k4 + T.d5 * k5 + T.d6 * k6 + T.d7 * k7);
        out.segments.push_back(std::move(seg));
      }
      t = tn;
      y = yn;
      k1 = k7;
      if (last) break;
      Scalar fac = err == Scalar(0) ? facmax
                                    : Scalar(safety * pow(err, -expo) * pow(err_old, beta));
      fac = min(facmax, max(facmin, fac));
      if (last_rejected) fac = min(fac, Scalar(1));
      err_old = max(err, Scalar(1e-4));
      h = min(h * fac, hmax);
      last_rejected = false;
    } else {
      ++out.stats.rejected;
      h *= max(facmin, Scalar(safety * pow(err, -Scalar(0.2))));
      last_rejected = true;
    }
  }
  out.t_final = t;
  out.y_final = y;
  return out;
}

/// Full equations of motion from a state.
template <class Scalar>
Propagation<Vec6<Scalar>> propagate(const State<Scalar>& s0, const SystemParams<Scalar>& params, const Scalar& t0,
                                    const Scalar& t1, const IntegratorConfig<Scalar>& cfg = {}) {
  auto f = [&params](const Scalar&, const Vec6<Scalar>& y) { return eom_rhs(y, params); };
  return propagate<Vec6<Scalar>>(f, s0.stacked(), t0, t1, cfg);
}

}  // namespace lpsrp
