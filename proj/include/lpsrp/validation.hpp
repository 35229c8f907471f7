#pragma once

// Position error of a series solution against integrated truth, and the
// amplitude-mesh study built from it.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <thread>
#include <vector>

#include "lpsrp/integrator.hpp"
#include "lpsrp/lindstedt.hpp"

namespace lpsrp {

enum class ErrorMode {
  Direct,    // integrate the full state from the series initial condition
  Deviation  // integrate only the departure from the series trajectory
};

template <class Scalar> struct HalfArcOptions {
  ErrorMode mode = ErrorMode::Deviation;
  IntegratorConfig<Scalar> integrator = default_config(ErrorMode::Deviation);
  Scalar phi1{}, phi2{};

  static IntegratorConfig<Scalar> default_config(ErrorMode m) {
    IntegratorConfig<Scalar> c;
    if (m == ErrorMode::Direct) {
      c.rel_tol = c.abs_tol = IntegratorConfig<Scalar>::tolerance_floor();
    } else {
      c.rel_tol = Scalar(1e-12);
      c.abs_tol = Scalar(0);  // scaled to the expected deviation at run time
    }
    return c;
  }
  static HalfArcOptions with_mode(ErrorMode m) {
    HalfArcOptions o;
    o.mode = m;
    o.integrator = default_config(m);
    return o;
  }
};

/// Read-only view of a solution shared by the workers.
template <class Scalar> class ArcReference {
 public:
  explicit ArcReference(const SeriesSolution<Scalar>& sol) : sol_(&sol) {}

  const SeriesSolution<Scalar>& solution() const { return *sol_; }

  /// Barycentric position of the series and its exact first and second time
  /// derivatives. The velocity series is a truncated derivative, so it
  /// differs from `dpos` at order N + 1; `vel` returns it as well.
  void evaluate(const EvalPoint<Scalar>& x, Vec3<Scalar>& pos, Vec3<Scalar>& dpos, Vec3<Scalar>& ddpos,
                Vec3<Scalar>* vel = nullptr) const {
    const SeriesEvaluator<Scalar> ev(sol_->order, sol_->freq, x);
    const Scalar g = sol_->gamma_norm();
    for (int a = 0; a < 3; ++a) {
      const auto j = ev.jet(sol_->pos[a]);
      pos(a) = j[0];
      dpos(a) = j[1];
      ddpos(a) = j[2];
      if (vel) (*vel)(a) = ev(sol_->vel[a]);
    }
    pos = sol_->aep().position + g * pos;
    dpos *= g;
    ddpos *= g;
    if (vel) *vel *= g;
  }

 private:
  const SeriesSolution<Scalar>* sol_;
};

/// |position(t_eval) - series(t_eval)| for the centre orbit with amplitudes
/// a3, a4, starting from the series state (position and velocity series) at
/// t = 0.
template <class Scalar>
Scalar half_arc_error(const ArcReference<Scalar>& ref, const Scalar& a3, const Scalar& a4, const Scalar& t_eval,
                      const HalfArcOptions<Scalar>& opt = {}) {
  using std::abs;
  using std::max;
  const auto& sol = ref.solution();
  const auto& params = sol.params();
  const std::array<Scalar, 4> amp{Scalar(0), Scalar(0), a3, a4};
  auto point = [&](const Scalar& t) { return EvalPoint<Scalar>{amp, opt.phi1, opt.phi2, t}; };
  Vec3<Scalar> p0, dp0, ddp0, v0, p1, dp1, ddp1;
  ref.evaluate(point(Scalar(0)), p0, dp0, ddp0, &v0);
  ref.evaluate(point(t_eval), p1, dp1, ddp1);

  if (opt.mode == ErrorMode::Direct) {
    State<Scalar> s0;
    s0.position = p0;
    s0.velocity = v0;
    const auto prop = propagate(s0, params, Scalar(0), t_eval, opt.integrator);
    return (prop.y_final.template head<3>() - p1).norm();
  }

  // X = Xs + d with Xs the position series; d starts with the velocity
  // defect so that X(0) is the same state the direct mode starts from.
  auto accel = [&](const Vec3<Scalar>& x, const Vec3<Scalar>& v) {
    Vec6<Scalar> y;
    y << x, v;
    return Vec3<Scalar>(eom_rhs(y, params).template tail<3>());
  };
  auto f = [&](const Scalar& t, const Vec6<Scalar>& d) {
    Vec3<Scalar> xs, vs, as;
    ref.evaluate(point(t), xs, vs, as);
    Vec6<Scalar> out;
    out.template head<3>() = d.template tail<3>();
    out.template tail<3>() = accel(xs + d.template head<3>(), vs + d.template tail<3>()) - as;
    return out;
  };
  Vec6<Scalar> d0 = Vec6<Scalar>::Zero();
  d0.template tail<3>() = v0 - dp0;
  auto cfg = opt.integrator;
  if (!(cfg.abs_tol > Scalar(0))) {
    // the deviation grows roughly like dv t + r t^2 / 2 from the initial
    // defects; below that, the rounding noise of the force evaluation sets the floor
    const Scalar r0 = (accel(p0, v0) - ddp0).norm();
    const Scalar dv = Scalar(d0.norm()) * abs(t_eval);
    const Scalar noise = Scalar(100) * epsilon<Scalar>() * max(Scalar(1), Scalar(abs(t_eval)));
    cfg.abs_tol = max(cfg.rel_tol * (r0 * t_eval * t_eval + dv), noise);
  }
  const auto prop = propagate<Vec6<Scalar>>(f, d0, Scalar(0), t_eval, cfg);
  return prop.y_final.template head<3>().norm();
}

template <class Scalar>
Scalar half_arc_error(const SeriesSolution<Scalar>& sol, const Scalar& a3, const Scalar& a4, const Scalar& t_eval,
                      const HalfArcOptions<Scalar>& opt = {}) {
  return half_arc_error(ArcReference<Scalar>(sol), a3, a4, t_eval, opt);
}

// ---------------------------------------------------------------------------

template <class Scalar> struct MeshSpec {
  int n3 = 100, n4 = 100;
  Scalar min3 = 0, max3 = Scalar(0.2);
  Scalar min4 = 0, max4 = Scalar(0.2);
  Scalar t_eval = pi<Scalar>() / 2;
  int jobs = 1;
  HalfArcOptions<Scalar> arc{};

  void validate() const {
    if (n3 < 1 || n4 < 1) throw InvalidArgument("mesh must have at least one point per axis");
    if ((n3 > 1 && !(max3 > min3)) || (n4 > 1 && !(max4 > min4)))
      throw InvalidArgument("mesh axes must be strictly increasing");
    if (!(min3 >= Scalar(0)) || !(min4 >= Scalar(0))) throw InvalidArgument("mesh amplitudes must be non-negative");
    if (!isfinite_scalar(t_eval)) throw InvalidArgument("evaluation time must be finite");
    if (jobs < 1) throw InvalidArgument("jobs must be at least 1");
  }
};

enum class CellStatus { Ok, ExactZero, Failed };

struct ErrorGrid {
  std::vector<double> axis3, axis4;
  std::vector<double> log10err;  // row-major, index i3 * n4 + i4
  std::vector<CellStatus> status;
  std::vector<std::string> message;
  double t_eval = 0;

  int n3() const { return int(axis3.size()); }
  int n4() const { return int(axis4.size()); }
  double at(int i3, int i4) const { return log10err[std::size_t(i3) * axis4.size() + i4]; }
  CellStatus status_at(int i3, int i4) const { return status[std::size_t(i3) * axis4.size() + i4]; }

  ErrorGrid transposed() const {
    ErrorGrid t;
    t.axis3 = axis4;
    t.axis4 = axis3;
    t.t_eval = t_eval;
    t.log10err.resize(log10err.size());
    t.status.resize(status.size());
    t.message.resize(message.size());
    for (int i = 0; i < n3(); ++i)
      for (int j = 0; j < n4(); ++j) {
        const std::size_t src = std::size_t(i) * n4() + j, dst = std::size_t(j) * n3() + i;
        t.log10err[dst] = log10err[src];
        t.status[dst] = status[src];
        t.message[dst] = message[src];
      }
    return t;
  }
};

template <class Scalar> std::vector<Scalar> mesh_axis(int n, const Scalar& lo, const Scalar& hi) {
  std::vector<Scalar> v(n);
  for (int k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * Scalar(k) / Scalar(n - 1);
  return v;
}

/// Evaluates every mesh cell; cells are independent, so any number of
/// workers produces the same grid.
template <class Scalar> ErrorGrid error_study(const SeriesSolution<Scalar>& sol, const MeshSpec<Scalar>& spec) {
  using std::log10;
  spec.validate();
  const ArcReference<Scalar> ref(sol);
  const auto ax3 = mesh_axis(spec.n3, spec.min3, spec.max3);
  const auto ax4 = mesh_axis(spec.n4, spec.min4, spec.max4);
  ErrorGrid g;
  g.t_eval = to_double(spec.t_eval);
  for (const auto& v : ax3) g.axis3.push_back(to_double(v));
  for (const auto& v : ax4) g.axis4.push_back(to_double(v));
  const std::size_t cells = std::size_t(spec.n3) * spec.n4;
  g.log10err.assign(cells, 0.0);
  g.status.assign(cells, CellStatus::Ok);
  g.message.assign(cells, {});
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t c = next++; c < cells; c = next++) {
      const int i3 = int(c / spec.n4), i4 = int(c % spec.n4);
      try {
        const Scalar e = half_arc_error(ref, ax3[i3], ax4[i4], spec.t_eval, spec.arc);
        if (e == Scalar(0)) {
          g.log10err[c] = -std::numeric_limits<double>::infinity();
          g.status[c] = CellStatus::ExactZero;
        } else {
          g.log10err[c] = to_double(Scalar(log10(e)));
        }
      } catch (const Error& ex) {
        g.log10err[c] = std::numeric_limits<double>::infinity();
        g.status[c] = CellStatus::Failed;
        g.message[c] = ex.what();
      }
    }
  };
  const int jobs = std::min<int>(spec.jobs, int(std::max<std::size_t>(cells, 1)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Qualitative checks on a finished grid.

/// Spearman rank correlation, average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
    std::vector<double> r(v.size());
    for (std::size_t s = 0; s < idx.size();) {
      std::size_t e = s;
      while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[s]]) ++e;
      const double avg = 0.5 * double(s + e) + 1.0;
      for (std::size_t k = s; k <= e; ++k) r[idx[k]] = avg;
      s = e + 1;
    }
    return r;
  };
  if (a.size() != b.size() || a.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto ra = ranks(a), rb = ranks(b);
  const double n = double(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t k = 0; k < ra.size(); ++k) {
    sab += (ra[k] - ma) * (rb[k] - mb);
    saa += (ra[k] - ma) * (ra[k] - ma);
    sbb += (rb[k] - mb) * (rb[k] - mb);
  }
  return (saa > 0 && sbb > 0) ? sab / std::sqrt(saa * sbb) : std::numeric_limits<double>::quiet_NaN();
}

struct PatternThresholds {
  double min_spearman = 0.8;
  double valley_depth = 2.0;  // decades below the diagonal at the same max index
  int min_valley_cells = 5;
  double trough_depth = 0.5;  // decades, both walls of a trough
  int min_trough_cells = 5;
  double regrowth = 1.0;  // decades, ray diagnostic
};

struct PatternReport {
  double diagonal_spearman = 0;
  int valley_cells = 0;
  int valley_component = 0;
  int regrowth_cells = 0;
  int ray_regrowth_cells = 0;  // diagnostic only
  bool growth = false, valley = false, renewed_growth = false;
  bool all() const { return growth && valley && renewed_growth; }
};

/// Needs a square mesh with identical axes so the diagonal is a3 = a4.
inline PatternReport check_patterns(const ErrorGrid& g, const PatternThresholds& th = {}) {
  if (g.n3() != g.n4() || g.axis3 != g.axis4) throw InvalidArgument("pattern checks need a square mesh");
  const int n = g.n3();
  auto finite = [&](int i, int j) { return g.status_at(i, j) == CellStatus::Ok && std::isfinite(g.at(i, j)); };
  PatternReport rep;

  std::vector<double> eps, val;
  for (int i = 0; i < n; ++i)
    if (finite(i, i)) {
      eps.push_back(g.axis3[i]);
      val.push_back(g.at(i, i));
    }
  rep.diagonal_spearman = spearman(eps, val);
  rep.growth = rep.diagonal_spearman >= th.min_spearman;

  // valley: off-diagonal interior cells well below the diagonal at max(i, j)
  std::vector<char> in_valley(std::size_t(n) * n, 0);
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      if (i == j || !finite(i, j)) continue;
      const int d = std::max(i, j);
      if (!finite(d, d)) continue;
      if (g.at(i, j) <= g.at(d, d) - th.valley_depth) {
        in_valley[std::size_t(i) * n + j] = 1;
        ++rep.valley_cells;
      }
    }
  std::vector<int> comp(std::size_t(n) * n, -1);
  std::vector<int> best_cells;
  for (int s = 0; s < n * n; ++s) {
    if (!in_valley[s] || comp[s] >= 0) continue;
    std::vector<int> cells;
    std::queue<int> q;
    q.push(s);
    comp[s] = s;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      cells.push_back(c);
      const int ci = c / n, cj = c % n;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int ni = ci + di, nj = cj + dj;
          if (ni < 0 || nj < 0 || ni >= n || nj >= n) continue;
          const int nc = ni * n + nj;
          if (in_valley[nc] && comp[nc] < 0) {
            comp[nc] = s;
            q.push(nc);
          }
        }
    }
    if (cells.size() > best_cells.size()) best_cells = cells;
  }
  rep.valley_component = int(best_cells.size());
  rep.valley = rep.valley_component >= th.min_valley_cells;

  // renewed growth: a trough inside the valley. Along the mesh line that
  // varies the smaller amplitude, the cell is the lowest within +-w cells
  // and the error climbs back by th.trough_depth decades on both sides
  // inside that window.
  const int w = std::max(1, n / 20);
  for (const int c : best_cells) {
    const int i = c / n, j = c % n;
    const double base = g.at(i, j);
    auto cell = [&](int k) { return i > j ? std::pair<int, int>{i, k} : std::pair<int, int>{k, j}; };
    const int pos = i > j ? j : i;
    double lo = -std::numeric_limits<double>::infinity(), hi = lo;
    bool lowest = true;
    for (int k = std::max(1, pos - w); k <= std::min(n - 1, pos + w); ++k) {
      const auto [a, b] = cell(k);
      if (k == pos || !finite(a, b)) continue;
      if (g.at(a, b) < base) lowest = false;
      (k < pos ? lo : hi) = std::max(k < pos ? lo : hi, g.at(a, b));
    }
    if (lowest && lo >= base + th.trough_depth && hi >= base + th.trough_depth) ++rep.regrowth_cells;
    // outward ray from the origin through the cell; diagnostic only
    double peak = -std::numeric_limits<double>::infinity();
    for (double s = 1.25;; s += 0.25) {
      const int ri = int(std::lround(i * s)), rj = int(std::lround(j * s));
      if (ri >= n || rj >= n) break;
      if (finite(ri, rj)) peak = std::max(peak, g.at(ri, rj));
    }
    if (peak >= base + th.regrowth) ++rep.ray_regrowth_cells;
  }
  rep.renewed_growth = rep.regrowth_cells >= th.min_trough_cells;
  return rep;
}

}  // namespace lpsrp
