#pragma once

// Orbits, manifolds and transit arcs sampled from a series solution.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lpsrp/integrator.hpp"
#include "lpsrp/lindstedt.hpp"

namespace lpsrp {

enum class TrajectoryClass { Unstable, Stable, Transit, NonTransit, Periodic, Equilibrium };

inline const char* to_string(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::Unstable: return "unstable";
    case TrajectoryClass::Stable: return "stable";
    case TrajectoryClass::Transit: return "transit";
    case TrajectoryClass::NonTransit: return "non-transit";
    case TrajectoryClass::Periodic: return "periodic";
    case TrajectoryClass::Equilibrium: return "equilibrium";
  }
  return "?";
}

/// Amplitudes below this magnitude count as zero.
inline constexpr double classification_zero = 1e-15;

template <class Scalar> TrajectoryClass classify(const std::array<Scalar, 4>& a) {
  using std::abs;
  auto nz = [](const Scalar& v) { return abs(to_double(v)) >= classification_zero; };
  const bool n1 = nz(a[0]), n2 = nz(a[1]);
  if (n1 && !n2) return TrajectoryClass::Unstable;
  if (!n1 && n2) return TrajectoryClass::Stable;
  if (n1 && n2) return (a[0] > Scalar(0)) != (a[1] > Scalar(0)) ? TrajectoryClass::Transit : TrajectoryClass::NonTransit;
  if (nz(a[2]) || nz(a[3])) return TrajectoryClass::Periodic;
  return TrajectoryClass::Equilibrium;
}

enum class Frame { Barycentric, AepRelative };

template <class Scalar> struct TrajectoryRequest {
  std::array<Scalar, 4> amplitudes{};
  Scalar phi1{}, phi2{};  // radians
  Scalar t0{}, t1{};
  int samples = 2;
  Frame frame = Frame::Barycentric;

  void validate() const {
    if (samples < 2) throw InvalidArgument("sample count must be at least 2");
    if (!isfinite_scalar(t0) || !isfinite_scalar(t1)) throw InvalidArgument("time span must be finite");
    for (const auto& a : amplitudes)
      if (!isfinite_scalar(a)) throw InvalidArgument("amplitudes must be finite");
  }
  Scalar time(int k) const { return t0 + (t1 - t0) * Scalar(k) / Scalar(samples - 1); }
};

template <class Scalar> struct Sample {
  Scalar t{};
  Vec6<Scalar> state;  // x y z vx vy vz
};

template <class Scalar>
std::vector<Sample<Scalar>> sample(const SeriesSolution<Scalar>& sol, const TrajectoryRequest<Scalar>& req) {
  req.validate();
  if ((req.amplitudes[0] != Scalar(0) || req.amplitudes[1] != Scalar(0)) && !sol.hyperbolic)
    throw InvalidArgument("hyperbolic amplitudes need a solution built with the hyperbolic terms");
  std::vector<Sample<Scalar>> out;
  out.reserve(req.samples);
  for (int k = 0; k < req.samples; ++k) {
    const EvalPoint<Scalar> x{req.amplitudes, req.phi1, req.phi2, req.time(k)};
    out.push_back({x.t, req.frame == Frame::Barycentric ? barycentric_state(sol, x) : scaled_state(sol, x)});
  }
  return out;
}

/// Period of a single-frequency orbit at the given centre amplitudes.
template <class Scalar> Scalar orbit_period(const SeriesSolution<Scalar>& sol, const Scalar& a3, const Scalar& a4) {
  const std::array<Scalar, 4> a{Scalar(0), Scalar(0), a3, a4};
  const bool in_plane = a4 == Scalar(0);
  if (!in_plane && a3 != Scalar(0)) throw InvalidArgument("orbit with both centre amplitudes has no single period");
  const Scalar w = in_plane ? sol.freq.omega.evaluate(a) : sol.freq.nu.evaluate(a);
  return Scalar(2) * pi<Scalar>() / w;
}

enum class ManifoldBranch { Both, Stable, Unstable };

template <class Scalar> struct ManifoldArc {
  std::string label;  // e.g. "unstable+"
  std::array<Scalar, 4> amplitudes{};
  std::vector<Sample<Scalar>> samples;
};

template <class Scalar> struct ManifoldOptions {
  Scalar duration = Scalar(2) * pi<Scalar>();
  int samples = 400;
  Scalar phi1{}, phi2{};
  Frame frame = Frame::Barycentric;
  /// Propagate the full equations from the series state at t = 0 instead of
  /// sampling the series along the arc.
  bool integrate = false;
  IntegratorConfig<Scalar> integrator{};
};

/// Stable arcs (a2 = +-eps) run backward in time, unstable ones (a1 = +-eps)
/// forward.
template <class Scalar>
std::vector<ManifoldArc<Scalar>> manifold_family(const SeriesSolution<Scalar>& sol, const Scalar& a3, const Scalar& a4,
                                                 const Scalar& eps, ManifoldBranch branch = ManifoldBranch::Both,
                                                 const ManifoldOptions<Scalar>& opt = {}) {
  if (!(eps >= Scalar(0))) throw InvalidArgument("manifold offset must be non-negative");
  if (!(opt.duration > Scalar(0))) throw InvalidArgument("manifold duration must be positive");
  if (!sol.hyperbolic && eps != Scalar(0))
    throw InvalidArgument("manifolds need a solution built with the hyperbolic terms");
  struct Spec {
    const char* label;
    Scalar a1, a2, sign;
  };
  std::vector<Spec> specs;
  if (branch != ManifoldBranch::Unstable) {
    specs.push_back({"stable+", Scalar(0), eps, Scalar(-1)});
    specs.push_back({"stable-", Scalar(0), -eps, Scalar(-1)});
  }
  if (branch != ManifoldBranch::Stable) {
    specs.push_back({"unstable+", eps, Scalar(0), Scalar(1)});
    specs.push_back({"unstable-", -eps, Scalar(0), Scalar(1)});
  }
  std::vector<ManifoldArc<Scalar>> out;
  for (const auto& sp : specs) {
    ManifoldArc<Scalar> arc;
    arc.label = sp.label;
    arc.amplitudes = {sp.a1, sp.a2, a3, a4};
    TrajectoryRequest<Scalar> req;
    req.amplitudes = arc.amplitudes;
    req.phi1 = opt.phi1;
    req.phi2 = opt.phi2;
    req.t0 = 0;
    req.t1 = sp.sign * opt.duration;
    req.samples = opt.samples;
    req.frame = opt.frame;
    if (!opt.integrate) {
      arc.samples = sample(sol, req);
    } else {
      req.validate();
      const Vec6<Scalar> y0 = barycentric_state(sol, EvalPoint<Scalar>{arc.amplitudes, opt.phi1, opt.phi2, Scalar(0)});
      auto cfg = opt.integrator;
      cfg.dense = true;
      const auto prop = propagate(State<Scalar>::from_stacked(y0), sol.params(), Scalar(0), req.t1, cfg);
      const Scalar g = sol.gamma_norm();
      for (int k = 0; k < req.samples; ++k) {
        const Scalar t = req.time(k);
        Vec6<Scalar> y = k == req.samples - 1 ? prop.y_final : prop(t);
        if (opt.frame == Frame::AepRelative) {
          y.template head<3>() = (y.template head<3>() - sol.aep().position) / g;
          y.template tail<3>() /= g;
        }
        arc.samples.push_back({t, y});
      }
    }
    out.push_back(std::move(arc));
  }
  return out;
}

}  // namespace lpsrp
