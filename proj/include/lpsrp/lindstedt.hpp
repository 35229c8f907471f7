#pragma once

// Order-by-order Lindstedt-Poincare construction of the coordinate and
// frequency series about an equilibrium.

#include <array>
#include <cmath>
#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "lpsrp/linearization.hpp"

namespace lpsrp {

template <class Scalar> struct BuildOptions {
  /// Include the hyperbolic amplitudes a1, a2. Without them only the centre
  /// part (i = j = 0) is built, which is all that periodic orbits need.
  bool hyperbolic = true;
  Scalar svd_cutoff = Scalar(1e-12);  // relative to the largest singular value
  Scalar cond_warn = Scalar(1e12);
  Scalar residual_tol = Scalar(1e-9);
};

enum class SolveCase { Plain, LambdaPair, Omega, Nu };

inline const char* to_string(SolveCase c) {
  switch (c) {
    case SolveCase::Plain: return "plain";
    case SolveCase::LambdaPair: return "lambda";
    case SolveCase::Omega: return "omega";
    case SolveCase::Nu: return "nu";
  }
  return "?";
}

struct GroupDiagnostic {
  TermIndex index;
  SolveCase solve_case = SolveCase::Plain;
  bool augmented_used = false;
  double condition = 0;
  double residual = 0;
  double frequency = 0;
  int dropped = 0;
};

struct BuildDiagnostics {
  std::vector<GroupDiagnostic> groups;  // empty after a reload
  std::size_t group_count = 0;
  int ill_conditioned = 0;
  double max_residual = 0;
};

template <class Scalar> struct SeriesSolution {
  int order = 1;
  bool hyperbolic = true;
  std::array<TrigSeries<Scalar>, 3> pos, vel;
  Frequencies<Scalar> freq;
  LinearModel<Scalar> linear;
  BuildDiagnostics diagnostics;

  const Aep<Scalar>& aep() const { return linear.aep; }
  const SystemParams<Scalar>& params() const { return linear.aep.params; }
  Scalar gamma_norm() const { return linear.consts.gamma_norm; }
};

/// Order-0 and order-1 content taken from the linear model.
template <class Scalar>
SeriesSolution<Scalar> initialize(const LinearModel<Scalar>& lin, int N, bool hyperbolic = true) {
  if (N < 1) throw InvalidArgument("series order must be at least 1");
  SeriesSolution<Scalar> s;
  s.order = N;
  s.hyperbolic = hyperbolic;
  s.linear = lin;
  const auto& k = lin.k;
  for (auto& c : s.pos) c = TrigSeries<Scalar>(N);
  auto put = [&](int axis, TermIndex t, const Scalar& c, const Scalar& sn) {
    if (c == Scalar(0) && sn == Scalar(0)) return;
    s.pos[axis].set(t, c, sn);
  };
  const TermIndex a1{1, 0, 0, 0, 0, 0}, a2{0, 1, 0, 0, 0, 0}, a3{0, 0, 1, 0, 1, 0}, a4{0, 0, 0, 1, 0, 1};
  const TermIndex zero{};
  if (hyperbolic) {
    put(0, a1, Scalar(1), 0);
    put(0, a2, Scalar(1), 0);
    put(1, a1, k[1], 0);
    put(1, a2, k[2], 0);
    put(2, a1, k[3], 0);
    put(2, a2, k[4], 0);
  }
  put(0, a3, Scalar(1), k[14]);
  put(0, a4, k[5], k[6]);
  put(0, zero, k[15], 0);
  put(1, a3, k[7], k[8]);
  put(1, a4, k[9], k[10]);
  put(1, zero, k[16], 0);
  put(2, a3, k[11], k[12]);
  put(2, a4, Scalar(1), k[13]);
  put(2, zero, k[17], 0);
  s.freq.omega = FrequencySeries<Scalar>(N);
  s.freq.nu = FrequencySeries<Scalar>(N);
  s.freq.lambda = FrequencySeries<Scalar>(N);
  s.freq.omega.set(0, 0, 0, 0, lin.omega_0);
  s.freq.nu.set(0, 0, 0, 0, lin.nu_0);
  s.freq.lambda.set(0, 0, 0, 0, lin.lambda_r);
  for (int a = 0; a < 3; ++a) s.vel[a] = ddt(s.pos[a], s.freq);
  return s;
}

/// The 6x6 operator acting on (x, xbar, y, ybar, z, zbar) of one index group.
template <class Scalar>
Mat6<Scalar> assemble_M(const TermIndex& t, const Mat3<Scalar>& W, const Scalar& lambda0, const Scalar& omega0,
                        const Scalar& nu0) {
  const Scalar Psi = Scalar(t.p) * omega0 + Scalar(t.q) * nu0;
  const Scalar zeta = Scalar(t.i - t.j) * lambda0;
  const Scalar xi = zeta * zeta - Psi * Psi;
  const Scalar zp = Scalar(2) * zeta * Psi;
  Mat6<Scalar> M;
  M << xi - W(0, 0), zp, -Scalar(2) * zeta - W(0, 1), -Scalar(2) * Psi, -W(0, 2), Scalar(0),
      -zp, xi - W(0, 0), Scalar(2) * Psi, -Scalar(2) * zeta - W(0, 1), Scalar(0), -W(0, 2),
      Scalar(2) * zeta - W(1, 0), Scalar(2) * Psi, xi - W(1, 1), zp, -W(1, 2), Scalar(0),
      -Scalar(2) * Psi, Scalar(2) * zeta - W(1, 0), -zp, xi - W(1, 1), Scalar(0), -W(1, 2),
      -W(2, 0), Scalar(0), -W(2, 1), Scalar(0), xi - W(2, 2), zp,
      Scalar(0), -W(2, 0), Scalar(0), -W(2, 1), -zp, xi - W(2, 2);
  return M;
}

/// Columns multiplying an unknown frequency correction.
template <class Scalar> Vec6<Scalar> delta_lambda_plus(const LinearModel<Scalar>& m) {
  const auto& k = m.k;
  const Scalar l = m.lambda_r;
  Vec6<Scalar> d;
  d << Scalar(2) * (l - k[1]), 0, Scalar(2) * (k[1] * l + Scalar(1)), 0, Scalar(2) * k[3] * l, 0;
  return d;
}
template <class Scalar> Vec6<Scalar> delta_lambda_minus(const LinearModel<Scalar>& m) {
  const auto& k = m.k;
  const Scalar l = m.lambda_r;
  Vec6<Scalar> d;
  d << Scalar(2) * (l + k[2]), 0, Scalar(2) * (k[2] * l - Scalar(1)), 0, Scalar(2) * k[4] * l, 0;
  return d;
}
template <class Scalar> Vec6<Scalar> delta_omega(const LinearModel<Scalar>& m) {
  const auto& k = m.k;
  const Scalar w = m.omega_0;
  Vec6<Scalar> d;
  d << -Scalar(2) * (k[8] + w), Scalar(2) * (k[7] - k[14] * w), Scalar(2) * (k[14] - k[7] * w),
      -Scalar(2) * (k[8] * w + Scalar(1)), -Scalar(2) * k[11] * w, -Scalar(2) * k[12] * w;
  return d;
}
template <class Scalar> Vec6<Scalar> delta_nu(const LinearModel<Scalar>& m) {
  const auto& k = m.k;
  const Scalar v = m.nu_0;
  Vec6<Scalar> d;
  d << -Scalar(2) * (k[5] * v + k[10]), -Scalar(2) * (k[6] * v - k[9]), -Scalar(2) * (k[9] * v - k[6]),
      -Scalar(2) * (k[10] * v + k[5]), -Scalar(2) * v, -Scalar(2) * k[13] * v;
  return d;
}

/// Known right-hand side of one index group, split into the part that does
/// not involve squared frequency corrections (b) and the part that does (c).
template <class Scalar> struct KnownGroup {
  Vec6<Scalar> b = Vec6<Scalar>::Zero();
  Vec6<Scalar> c = Vec6<Scalar>::Zero();
};

namespace detail {

/// sum over f_a f_b with a + b = target, both of nonzero order.
template <class Scalar>
Scalar collected_square(const FrequencySeries<Scalar>& f, const std::array<int, 4>& target) {
  Scalar v = 0;
  for (const auto& [ka, va] : f.terms()) {
    const auto a = FrequencySeries<Scalar>::unpack(ka);
    if (a[0] + a[1] + a[2] + a[3] == 0) continue;
    std::array<int, 4> b{target[0] - a[0], target[1] - a[1], target[2] - a[2], target[3] - a[3]};
    if (b[0] < 0 || b[1] < 0 || b[2] < 0 || b[3] < 0 || b[0] + b[1] + b[2] + b[3] == 0) continue;
    v += va * f.get(b[0], b[1], b[2], b[3]);
  }
  return v;
}

template <class Scalar> void put6(Vec6<Scalar>& v, int axis, const Coef<Scalar>& c) {
  v(2 * axis) = c.c;
  v(2 * axis + 1) = c.s;
}

}  // namespace detail

/// Order-n right-hand sides of every index group, given orders < n solved
/// (coordinates) and orders < n-1 solved (frequencies).
template <class Scalar>
std::map<std::uint64_t, KnownGroup<Scalar>> known_terms(const SeriesSolution<Scalar>& sol, int n) {
  using S = TrigSeries<Scalar>;
  const auto& lin = sol.linear;
  const auto& k = lin.consts;
  std::array<S, 3> c;
  for (int a = 0; a < 3; ++a) c[a] = sol.pos[a].with_max_order(n).truncated(n - 1).with_max_order(n);
  Frequencies<Scalar> fr{sol.freq.omega.truncated(n - 2), sol.freq.nu.truncated(n - 2),
                         sol.freq.lambda.truncated(n - 2)};

  // nonlinear right-hand side, degree >= 2 in the coordinates
  const auto tab1 = legendre_table<S, Scalar>(n + 1, c, {k.A1, k.B, k.C}, k.D1, true);
  const auto grav = grav_rhs<S, Scalar>(c, k, n + 1, 3, &tab1);
  const auto srp = srp_rhs<S, Scalar>(c, k, n, &tab1);
  const Vec3<Scalar> srp0 = srp_order0(k);
  const Scalar inv_g3 = Scalar(1) / k.gamma3();
  std::array<S, 3> rhs;
  for (int q = 0; q < 3; ++q) {
    S lin_part(n);
    for (int a = 0; a < 3; ++a) lin_part = add(lin_part, c[a], Scalar(1), lin.srp_linear(q, a));
    S v = add(srp[q], lin_part, Scalar(1), Scalar(-1));
    v = add_constant(v, Scalar(-srp0(q)));
    v = add(v, grav[q]);
    rhs[q] = v.order_part(n).scaled(inv_g3);
  }
  // left-hand side terms already determined
  std::array<S, 3> d1, d2;
  for (int a = 0; a < 3; ++a) {
    d1[a] = ddt(c[a], fr);
    d2[a] = ddt(d1[a], fr);
  }
  std::array<S, 3> lhs{add(d2[0], d1[1], Scalar(1), Scalar(-2)), add(d2[1], d1[0], Scalar(1), Scalar(2)), d2[2]};
  std::array<S, 3> total;
  for (int q = 0; q < 3; ++q) total[q] = sub(rhs[q], lhs[q].order_part(n));

  std::map<std::uint64_t, KnownGroup<Scalar>> out;
  for (int q = 0; q < 3; ++q)
    for (const auto& e : total[q].terms()) {
      auto& g = out[e.first];
      g.b(2 * q) = e.second.c;
      g.b(2 * q + 1) = e.second.s;
    }
  // split off the squared frequency corrections
  const auto& kk = lin.k;
  auto apply_c = [&](const TermIndex& t, const Vec6<Scalar>& cvec) {
    if (cvec.isZero(0)) return;
    auto& g = out[t.key()];
    g.c += cvec;
    g.b -= cvec;
  };
  if (sol.hyperbolic) {
    for (int j = 0; 2 * j + 1 <= n; ++j)
      for (int kk3 = 0; 2 * j + 1 + kk3 <= n; ++kk3) {
        const int m = n - 2 * j - 1 - kk3;
        const Scalar L = detail::collected_square(fr.lambda, {j, j, kk3, m});
        if (L == Scalar(0)) continue;
        Vec6<Scalar> cp, cm;
        cp << -L, 0, -L * kk[1], 0, -L * kk[3], 0;
        cm << -L, 0, -L * kk[2], 0, -L * kk[4], 0;
        apply_c(TermIndex{j + 1, j, kk3, m, 0, 0}, cp);
        apply_c(TermIndex{j, j + 1, kk3, m, 0, 0}, cm);
      }
  }
  for (int i = 0; 2 * i + 1 <= n; ++i) {
    if (!sol.hyperbolic && i > 0) break;
    for (int kk3 = 0; 2 * i + kk3 <= n; ++kk3) {
      const int m = n - 2 * i - kk3;
      if (kk3 >= 1) {
        const Scalar W = detail::collected_square(fr.omega, {i, i, kk3 - 1, m});
        if (W != Scalar(0)) {
          Vec6<Scalar> cv;
          cv << W, W * kk[14], W * kk[7], W * kk[8], W * kk[11], W * kk[12];
          apply_c(TermIndex{i, i, kk3, m, 1, 0}, cv);
        }
      }
      if (m >= 1) {
        const Scalar V = detail::collected_square(fr.nu, {i, i, kk3, m - 1});
        if (V != Scalar(0)) {
          Vec6<Scalar> cv;
          cv << V * kk[5], V * kk[6], V * kk[9], V * kk[10], V, V * kk[13];
          apply_c(TermIndex{i, i, kk3, m, 0, 1}, cv);
        }
      }
    }
  }
  return out;
}

namespace detail {

template <class Scalar> struct LsqResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Scalar residual{};
  Scalar condition{};  // over the retained singular values
  int dropped = 0;     // directions below the cutoff
};

template <class Scalar>
LsqResult<Scalar> min_norm_solve(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b, const Scalar& cutoff) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Scalar smax = sv.size() ? sv(0) : Scalar(0);
  const Scalar thr = cutoff * smax;
  LsqResult<Scalar> out;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(A.cols());
  Scalar smin_kept = smax;
  for (int r = 0; r < sv.size(); ++r) {
    if (!(sv(r) > thr)) {
      ++out.dropped;
      continue;
    }
    x += (svd.matrixU().col(r).dot(b) / sv(r)) * svd.matrixV().col(r);
    smin_kept = sv(r);
  }
  out.x = x;
  out.residual = (A * x - b).norm();
  out.dropped += int(std::min(A.rows(), A.cols()) - sv.size());
  out.condition = smin_kept > Scalar(0) ? smax / smin_kept : Scalar(1);
  return out;
}

}  // namespace detail

/// Solves every index group of order n and stores the results.
template <class Scalar>
void solve_order(SeriesSolution<Scalar>& sol, int n, const BuildOptions<Scalar>& opt = {}) {
  using std::max;
  using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (n < 2 || n > sol.order) throw InvalidArgument("order to solve must lie in 2..N");
  const auto& lin = sol.linear;
  const auto known = known_terms(sol, n);
  const Scalar l0 = lin.lambda_r, w0 = lin.omega_0, v0 = lin.nu_0;
  const Mat3<Scalar>& W = lin.omega_star;

  auto group_b = [&](const TermIndex& t) -> Vec6<Scalar> {
    auto it = known.find(t.key());
    if (it == known.end()) return Vec6<Scalar>::Zero();
    return it->second.b + it->second.c;
  };
  auto store = [&](const TermIndex& t, const Eigen::Ref<const VecX>& X) {
    for (int a = 0; a < 3; ++a) {
      const Coef<Scalar> old = sol.pos[a].get(t);
      if (old.c != Scalar(0) || old.s != Scalar(0))
        throw StructureViolation("order-n solve would overwrite an existing coefficient");
      if (X(2 * a) != Scalar(0) || X(2 * a + 1) != Scalar(0)) sol.pos[a].set(t, X(2 * a), X(2 * a + 1));
    }
  };
  auto record = [&](const TermIndex& t, SolveCase sc, bool aug, const detail::LsqResult<Scalar>& r,
                    const Scalar& bnorm, const Scalar& freq) {
    const Scalar cond = r.condition, res = r.residual;
    GroupDiagnostic g;
    g.dropped = r.dropped;
    g.index = t;
    g.solve_case = sc;
    g.augmented_used = aug;
    g.condition = static_cast<double>(cond);
    g.residual = static_cast<double>(res);
    g.frequency = static_cast<double>(freq);
    sol.diagnostics.groups.push_back(g);
    ++sol.diagnostics.group_count;
    if (cond > opt.cond_warn) ++sol.diagnostics.ill_conditioned;
    sol.diagnostics.max_residual = std::max(sol.diagnostics.max_residual, g.residual);
    if (res > opt.residual_tol * max(Scalar(1), bnorm))
      throw ResidualTooLarge("least-squares residual " + std::to_string(g.residual) + " at order " +
                             std::to_string(n));
  };

  // solve one or two coupled groups with an optional frequency column
  auto solve_groups = [&](const std::vector<TermIndex>& ts, const std::vector<Vec6<Scalar>>& deltas,
                          SolveCase sc, Scalar& freq_out) {
    const int G = int(ts.size());
    MatX Mp = MatX::Zero(6 * G, 6 * G);
    VecX b(6 * G);
    for (int g = 0; g < G; ++g) {
      Mp.block(6 * g, 6 * g, 6, 6) = assemble_M(ts[g], W, l0, w0, v0);
      b.segment(6 * g, 6) = group_b(ts[g]);
    }
    const Scalar bnorm = b.norm();
    const auto plain = detail::min_norm_solve<Scalar>(Mp, b, opt.svd_cutoff);
    freq_out = 0;
    if (deltas.empty()) {
      for (int g = 0; g < G; ++g) store(ts[g], plain.x.segment(6 * g, 6));
      record(ts[0], sc, false, plain, bnorm, 0);
      return;
    }
    MatX Ma(6 * G, 6 * G + 1);
    Ma.leftCols(6 * G) = Mp;
    for (int g = 0; g < G; ++g) Ma.block(6 * g, 6 * G, 6, 1) = deltas[g];
    const auto aug = detail::min_norm_solve<Scalar>(Ma, b, opt.svd_cutoff);
    // the plain solve is kept whenever the extra unknown does not help
    const bool use_aug = aug.residual < plain.residual;
    if (use_aug) {
      for (int g = 0; g < G; ++g) store(ts[g], aug.x.segment(6 * g, 6));
      freq_out = aug.x(6 * G);
      record(ts[0], sc, true, aug, bnorm, freq_out);
    } else {
      for (int g = 0; g < G; ++g) store(ts[g], plain.x.segment(6 * g, 6));
      record(ts[0], sc, false, plain, bnorm, 0);
    }
  };

  std::vector<std::uint64_t> keys;
  keys.reserve(known.size());
  for (const auto& [key, g] : known) keys.push_back(key);
  // every resonant group is visited even when its right-hand side vanishes
  auto ensure = [&](const TermIndex& t) {
    if (!known.count(t.key())) keys.push_back(t.key());
  };
  for (int i = 0; 2 * i <= n; ++i) {
    if (!sol.hyperbolic && i > 0) break;
    for (int kk3 = 0; 2 * i + kk3 <= n; ++kk3) {
      const int m = n - 2 * i - kk3;
      if (kk3 >= 1) ensure(TermIndex{i, i, kk3, m, 1, 0});
      if (m >= 1) ensure(TermIndex{i, i, kk3, m, 0, 1});
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<std::uint64_t> done;
  for (const auto key : keys) {
    if (std::binary_search(done.begin(), done.end(), key)) continue;
    const TermIndex t = TermIndex::from_key(key);
    if (t.order() != n) continue;
    Scalar f = 0;
    if (sol.hyperbolic && t.p == 0 && t.q == 0 && std::abs(t.i - t.j) == 1) {
      const int base = std::min(t.i, t.j);
      const TermIndex tp{base + 1, base, t.k, t.m, 0, 0};
      const TermIndex tm{base, base + 1, t.k, t.m, 0, 0};
      solve_groups({tp, tm}, {delta_lambda_plus(lin), delta_lambda_minus(lin)}, SolveCase::LambdaPair, f);
      if (f != Scalar(0)) sol.freq.lambda.set(base, base, t.k, t.m, f);
      done.push_back(tp.key());
      done.push_back(tm.key());
      std::sort(done.begin(), done.end());
    } else if (t.p == 1 && t.q == 0 && t.i == t.j && t.k >= 1) {
      solve_groups({t}, {delta_omega(lin)}, SolveCase::Omega, f);
      if (f != Scalar(0)) sol.freq.omega.set(t.i, t.i, t.k - 1, t.m, f);
    } else if (t.p == 0 && t.q == 1 && t.i == t.j && t.m >= 1) {
      solve_groups({t}, {delta_nu(lin)}, SolveCase::Nu, f);
      if (f != Scalar(0)) sol.freq.nu.set(t.i, t.i, t.k, t.m - 1, f);
    } else {
      solve_groups({t}, {}, SolveCase::Plain, f);
    }
  }
}

/// Parity rules of a finished solution: p <= k, p = k (mod 2), |q| <= m,
/// q = m (mod 2). Returns the first offending index, if any.
template <class Scalar> std::optional<TermIndex> find_structure_violation(const TrigSeries<Scalar>& s) {
  for (const auto& e : s.terms()) {
    const TermIndex t = TermIndex::from_key(e.first);
    const bool ok = t.p <= t.k && (t.k - t.p) % 2 == 0 && std::abs(t.q) <= t.m && (t.m - std::abs(t.q)) % 2 == 0;
    if (!ok) return t;
  }
  return std::nullopt;
}

template <class Scalar>
SeriesSolution<Scalar> build(const LinearModel<Scalar>& lin, int N, const BuildOptions<Scalar>& opt = {}) {
  auto sol = initialize(lin, N, opt.hyperbolic);
  for (int n = 2; n <= N; ++n) solve_order(sol, n, opt);
  for (int a = 0; a < 3; ++a) {
    if (auto bad = find_structure_violation(sol.pos[a]))
      throw StructureViolation("solution term violates the harmonic parity rules");
    sol.vel[a] = ddt(sol.pos[a], sol.freq);
  }
  return sol;
}

template <class Scalar>
SeriesSolution<Scalar> build(const Aep<Scalar>& aep, int N, const BuildOptions<Scalar>& opt = {}) {
  return build(build_linear_model(aep), N, opt);
}

/// Position and velocity series evaluated at one point, in the scaled
/// equilibrium-centred coordinates.
template <class Scalar> Vec6<Scalar> scaled_state(const SeriesSolution<Scalar>& s, const EvalPoint<Scalar>& x) {
  const SeriesEvaluator<Scalar> ev(s.order, s.freq, x);
  Vec6<Scalar> out;
  for (int a = 0; a < 3; ++a) {
    out(a) = ev(s.pos[a]);
    out(3 + a) = ev(s.vel[a]);
  }
  return out;
}

/// Same point in the barycentric rotating frame.
template <class Scalar>
Vec6<Scalar> barycentric_state(const SeriesSolution<Scalar>& s, const EvalPoint<Scalar>& x) {
  const Vec6<Scalar> r = scaled_state(s, x);
  const Scalar g = s.gamma_norm();
  Vec6<Scalar> out;
  out.template head<3>() = s.aep().position + g * r.template head<3>();
  out.template tail<3>() = g * r.template tail<3>();
  return out;
}

/// Lower-order solution obtained by truncation; identical to a fresh build
/// of that order because an order-n solve never touches lower orders.
template <class Scalar> SeriesSolution<Scalar> truncate_solution(const SeriesSolution<Scalar>& s, int N) {
  SeriesSolution<Scalar> out = s;
  out.order = N;
  out.freq = {s.freq.omega.truncated(N - 1), s.freq.nu.truncated(N - 1), s.freq.lambda.truncated(N - 1)};
  out.freq.omega.set_max_order(N);
  out.freq.nu.set_max_order(N);
  out.freq.lambda.set_max_order(N);
  for (int a = 0; a < 3; ++a) {
    out.pos[a] = s.pos[a].with_max_order(N);
    out.vel[a] = ddt(out.pos[a], out.freq);
  }
  return out;
}

}  // namespace lpsrp
