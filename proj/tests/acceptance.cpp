// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//   acceptance [--mesh N] [--jobs J] [--only 1,2,...]

#include "lpsrp/quad.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "common.hpp"
#include "lpsrp/expansions.hpp"
#include "lpsrp/integrator.hpp"
#include "lpsrp/lindstedt.hpp"
#include "lpsrp/series_io.hpp"
#include "lpsrp/validation.hpp"

using namespace lpsrp;
using namespace lpsrp::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects sub-check failures for one criterion.
struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  std::vector<std::string> failures;
  void need(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      failures.push_back(what);
    }
  }
};

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

Vec3<double> plain_field(const Vec3<double>& r, double mu) {
  const Vec3<double> d1(r.x() + mu, r.y(), r.z()), d2(r.x() - 1 + mu, r.y(), r.z());
  const double r1 = d1.norm(), r2 = d2.norm();
  Vec3<double> f = -(1 - mu) * d1 / (r1 * r1 * r1) - mu * d2 / (r2 * r2 * r2);
  f.x() += r.x();
  f.y() += r.y();
  return f;
}

// 1 -------------------------------------------------------------------------
void aep_reproduction(Verdict& v) {
  const auto t0 = Clock::now();
  double worst = 0;
  for (const auto& c : reference_cases) {
    const auto h = aep(c.alpha_deg, c.gamma_deg);
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(h.position(a) - c.h2[a]));
  }
  const double secs = seconds_since(t0);
  v.detail << "max component error " << sci(worst) << ", " << sci(secs) << " s";
  v.need(worst <= 1e-9, "component error <= 1e-9");
  v.need(secs < 1.0, "runtime < 1 s");
}

// 2 -------------------------------------------------------------------------
void degenerate_angles(Verdict& v) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  double dev_plain = 0;
  bool exact = true, clock_free = true;
  for (int n = 0; n < 200; ++n) {
    const Vec3<double> r(1.01 + u(rng), u(rng), u(rng));
    const auto ref = force_field(r, params(0, 0, 0.0));
    exact = exact && force_field(r, params(90, 33)) == ref && force_field(r, params(-90, 150)) == ref &&
            force_field(r, params(47, 12, 0.0)) == ref;
    // the net force nearly cancels here; rounding is relative to the O(1) terms
    dev_plain = std::max(dev_plain, (ref - plain_field(r, mu_se)).norm());
    const auto face = force_field(r, params(0, 0));
    for (double g : {40.0, 90.0, 180.0}) clock_free = clock_free && force_field(r, params(0, g)) == face;
  }
  const double d = (aep(0, 40).position - aep(0, 0).position).norm();
  v.detail << "alpha=+-90/beta=0 field identical: " << (exact ? "yes" : "no") << ", vs independent CR3BP "
           << sci(dev_plain) << "; alpha=0 gamma-free: " << (clock_free ? "yes" : "no") << "; |H(0,40)-H(0,0)| "
           << sci(d);
  v.need(exact, "reductions bit-identical");
  v.need(dev_plain <= 1e-14, "matches plain CR3BP field");
  v.need(clock_free, "alpha=0 independent of gamma");
  v.need(d <= 1e-12, "AEP(0,40) = AEP(0,0)");
}

// 3 -------------------------------------------------------------------------
void expansion_correctness(Verdict& v) {
  const auto k = ExpansionConstants<double>::from_aep(aep(80, 40));
  const Vec3<double> c(k.A1, k.B, k.C);
  const double D = k.D1;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0, 1);
  auto inside = [&](double radius) {
    Vec3<double> p(g(rng), g(rng), g(rng));
    return Vec3<double>(p.normalized() * radius * std::cbrt(u(rng)));
  };
  int tail_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const Vec3<double> rho = inside(0.8 * D);
    const double r = rho.norm() / D;
    const int N = 12;
    double sum = 0;
    for (int n = 0; n <= N; ++n) sum += legendre_T(n, rho, k.A1, k.B, k.C, D);
    const double tail = std::pow(r, N + 1) / (D * (1 - r));
    tail_ok += std::abs(sum / D - 1.0 / (rho - c).norm()) <= tail * (1 + 1e-12) + 1e-15;
  }
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const Vec3<double> rho = inside(0.5 * D);
    for (int n = 1; n <= 8; ++n)
      for (int q = 0; q < 3; ++q) {
        const double h = 1e-6;
        Vec3<double> e = Vec3<double>::Zero();
        e(q) = h;
        const double fd = (legendre_T(n, Vec3<double>(rho + e), k.A1, k.B, k.C, D) -
                           legendre_T(n, Vec3<double>(rho - e), k.A1, k.B, k.C, D)) /
                          (2 * h);
        const double an = legendre_R(n, q, rho, k.A1, k.B, k.C, D);
        worst = std::max(worst, std::abs(an - fd) / std::max(std::abs(an), 1e-3));
      }
  }
  v.detail << tail_ok << "/100 partial sums within tail bound; R_n vs central differences max rel " << sci(worst)
           << " (n <= 8, floor 1e-3)";
  v.need(tail_ok == 100, "tail bound at every point");
  v.need(worst <= 1e-6, "R_n within 1e-6");
}

// 4 -------------------------------------------------------------------------
void eigenstructure_check(Verdict& v) {
  struct Cfg {
    double a, g, beta;
    bool symmetric;
  };
  const std::vector<Cfg> cfgs{{80, 0, beta_se, true},  {0, 40, beta_se, true},     {80, 40, beta_se, false},
                              {0, 0, 0.0, true},       {30, 180, beta_se, true},   {90, 25, beta_se, true},
                              {-90, 60, beta_se, true}};
  double worst_sym = 0;
  for (const auto& c : cfgs) {
    const auto m = build_linear_model(aep(c.a, c.g, c.beta));
    int real_roots = 0;
    for (const auto& l : m.eigenvalues) real_roots += std::abs(l.imag()) <= 1e-8 * std::abs(l);
    const std::string tag = "(" + sci(c.a) + "," + sci(c.g) + ",beta=" + sci(c.beta) + ")";
    v.need(real_roots == 2 && m.lambda_r > 0, tag + " root pattern");
    const double re = std::max(std::abs(m.omega_r), std::abs(m.nu_r));
    if (c.symmetric) {
      worst_sym = std::max(worst_sym, re);
      v.need(re <= 1e-10, tag + " imaginary pairs");
    } else {
      v.detail << "(80,40) omega_r " << sci(m.omega_r) << " nu_r " << sci(m.nu_r) << "; ";
      v.need(re < 1e-3, tag + " |real parts| < 1e-3");
    }
  }
  v.detail << "symmetric configs max |real part| " << sci(worst_sym);
}

// 5 -------------------------------------------------------------------------
double linear_ode_residual(const LinearModel<double>& m) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> amp(-1, 1), ph(-3, 3), tt(-0.3, 0.3);
  const Mat3<double> J2 = 2 * coriolis_matrix<double>();
  double worst = 0;
  for (int n = 0; n < 20; ++n) {
    const std::array<double, 4> a{amp(rng), amp(rng), amp(rng), amp(rng)};
    const double p1 = ph(rng), p2 = ph(rng), t = tt(rng), h = 1e-3;
    auto r = [&](double s) { return linear_solution(m, s, a, p1, p2); };
    const Vec3<double> vel = (r(t - 2 * h) - 8 * r(t - h) + 8 * r(t + h) - r(t + 2 * h)) / (12 * h);
    const Vec3<double> acc = (-r(t - 2 * h) + 16 * r(t - h) - 30 * r(t) + 16 * r(t + h) - r(t + 2 * h)) / (12 * h * h);
    worst = std::max(worst, (acc - m.omega_star * r(t) - J2 * vel - m.forcing).norm());
  }
  return worst;
}

void linear_model_check(Verdict& v) {
  double worst_jac = 0;
  for (const auto& c : reference_cases) {
    const auto h = aep(c.alpha_deg, c.gamma_deg);
    const auto W = omega_star_matrix(h);
    const double G = h.gamma_norm(), step = 1e-6;
    Mat3<double> fd;
    for (int q = 0; q < 3; ++q) {
      Vec3<double> e = Vec3<double>::Zero();
      e(q) = step;
      fd.col(q) = (force_field(Vec3<double>(h.position + G * e), h.params) -
                   force_field(Vec3<double>(h.position - G * e), h.params)) /
                  (2 * step * G);
    }
    worst_jac = std::max(worst_jac, (fd - W).norm() / W.norm());
  }
  double worst_ode = 0;
  for (const auto& [a, g, b] : std::vector<std::array<double, 3>>{{80, 0, beta_se}, {0, 40, beta_se}, {0, 0, 0.0}})
    worst_ode = std::max(worst_ode, linear_ode_residual(build_linear_model(aep(a, g, b))));
  const double res_8040 = linear_ode_residual(build_linear_model(aep(80, 40)));
  const auto cl = build_linear_model(aep(0, 0, 0.0));
  const bool k_zero = cl.k[15] == 0.0 && cl.k[16] == 0.0 && cl.k[17] == 0.0;
  v.detail << "Omega* vs FD rel " << sci(worst_jac) << "; linear ODE residual " << sci(worst_ode)
           << " (imaginary-pair cases; (80,40) " << sci(res_8040) << " with real parts dropped); beta=0 k15..17 "
           << (k_zero ? "exactly 0" : "nonzero");
  v.need(worst_jac <= 1e-6, "Omega* within 1e-6");
  v.need(worst_ode <= 1e-8, "ODE residual <= 1e-8");
  v.need(k_zero, "beta=0 k15..17 = 0");
}

// 6 -------------------------------------------------------------------------
void residual_order_scaling(Verdict& v) {
  const auto t0 = Clock::now();
  const std::array<Quad, 3> eps{Quad(1e-3), Quad(3e-3), Quad(1e-2)};
  for (const auto& c : reference_cases) {
    const auto p = SystemParams<Quad>::from_degrees(Quad(mu_se), Quad(beta_se), Quad(c.alpha_deg), Quad(c.gamma_deg));
    BuildOptions<Quad> opt;
    opt.hyperbolic = false;
    const auto full = build(build_linear_model(find_aep(p, 2)), 7, opt);
    std::array<std::array<double, 3>, 8> err{};
    v.detail << (&c == &reference_cases[0] ? "" : " ") << c.name << ":";
    for (int N : {3, 5, 7}) {
      const auto sol = truncate_solution(full, N);
      const ArcReference<Quad> ref(sol);
      for (int e = 0; e < 3; ++e)
        err[N][e] = half_arc_error(ref, eps[e], eps[e], pi<Quad>() / 2, HalfArcOptions<Quad>{}).convert_to<double>();
      // least-squares slope of log err against log eps
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (int e = 0; e < 3; ++e) {
        const double x = std::log10(eps[e].convert_to<double>()), y = std::log10(err[N][e]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
      }
      const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
      v.detail << " N=" << N << " slope " << sci(slope);
      v.need(slope >= N - 1, std::string(c.name) + " N=" + std::to_string(N) + " slope >= " + std::to_string(N - 1));
    }
    bool below = true;
    for (int e = 0; e < 3; ++e) below = below && err[7][e] < err[5][e];
    v.detail << " (N7<N5 " << (below ? "yes" : "no") << ");";
    v.need(below, std::string(c.name) + " N=7 below N=5");
  }
  const double secs = seconds_since(t0);
  v.detail << " " << sci(secs) << " s";
  v.need(secs < 300, "runtime < 5 min");
}

// 7 -------------------------------------------------------------------------
void error_patterns(Verdict& v, int mesh, int jobs) {
  BuildOptions<double> opt;
  opt.hyperbolic = false;
  const double budget = mesh <= 10 ? 60 : 1800;
  for (const auto& c : reference_cases) {
    const auto t0 = Clock::now();
    const auto sol = build(aep(c.alpha_deg, c.gamma_deg), 7, opt);
    MeshSpec<double> m;
    m.n3 = m.n4 = mesh;
    m.jobs = jobs;
    const auto g = error_study(sol, m);
    const auto rep = check_patterns(g);
    const double secs = seconds_since(t0);
    v.detail << c.name << ": spearman " << sci(rep.diagonal_spearman) << ", valley " << rep.valley_component
             << ", trough " << rep.regrowth_cells << ", " << sci(secs) << " s; ";
    v.need(rep.growth, std::string(c.name) + " growth");
    v.need(rep.valley, std::string(c.name) + " valley");
    v.need(rep.renewed_growth, std::string(c.name) + " renewed growth");
    v.need(secs <= budget, std::string(c.name) + " runtime");
  }
  v.detail << mesh << "x" << mesh << " mesh, " << jobs << " job(s)";
}

// 8 -------------------------------------------------------------------------
void integrator_gates(Verdict& v) {
  BuildOptions<double> opt;
  opt.hyperbolic = false;
  const auto p0 = params(0, 0, 0.0);
  const auto cl = build(aep(0, 0, 0.0), 5, opt);
  const auto s0 = State<double>::from_stacked(barycentric_state(cl, EvalPoint<double>{{0, 0, 0.05, 0}, 0, 0, 0}));
  const auto arc = propagate(s0, p0, 0.0, pi<double>(), {});
  const double drift =
      std::abs(jacobi_constant(State<double>::from_stacked(arc.y_final), p0).value - jacobi_constant(s0, p0).value);

  double persist = 0;
  for (const auto& c : reference_cases) {
    const auto h = aep(c.alpha_deg, c.gamma_deg);
    const auto pr = propagate(State<double>{h.position, Vec3<double>::Zero()}, h.params, 0.0, pi<double>(), {});
    persist = std::max(persist, (pr.y_final.head<3>() - h.position).norm());
  }

  const auto h = aep(80, 40);
  const State<double> s1{h.position + Vec3<double>(1e-4, -2e-4, 1e-4), Vec3<double>(1e-4, 0, -1e-4)};
  const auto fwd = propagate(s1, h.params, 0.0, pi<double>(), {});
  const auto back = propagate(State<double>::from_stacked(fwd.y_final), h.params, pi<double>(), 0.0, {});
  const double rev = (back.y_final - s1.stacked()).norm();

  v.detail << "Jacobi drift " << sci(drift) << ", AEP persistence " << sci(persist) << ", forward-backward "
           << sci(rev);
  v.need(drift <= 1e-10, "Jacobi drift");
  v.need(persist <= 1e-10, "AEP persistence");
  v.need(rev <= 1e-9, "reversibility");
}

// 9 -------------------------------------------------------------------------
void determinism(Verdict& v) {
  bool identical = true, exact = true;
  int points = 0;
  for (const auto& c : reference_cases) {
    const auto h = aep(c.alpha_deg, c.gamma_deg);
    const auto a = build(h, 5), b = build(aep(c.alpha_deg, c.gamma_deg), 5);
    const std::string ta = dump_document(solution_to_json(a)), tb = dump_document(solution_to_json(b));
    identical = identical && ta == tb;
    const auto back = solution_from_json(nlohmann::json::parse(ta));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> amp(-0.1, 0.1), ang(0, 6.3);
    for (int n = 0; n < 200; ++n, ++points) {
      const EvalPoint<double> x{{0.01 * amp(rng), 0.01 * amp(rng), amp(rng), amp(rng)}, ang(rng), ang(rng), ang(rng)};
      exact = exact && barycentric_state(back, x) == barycentric_state(a, x);
    }
  }
  v.detail << "rebuilds byte-identical: " << (identical ? "yes" : "no") << "; reload bit-exact at " << points
           << " points: " << (exact ? "yes" : "no");
  v.need(identical, "byte-identical rebuild");
  v.need(exact, "bit-exact reload");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int mesh = 100;
  int jobs = int(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<int> only;
  app.add_option("--mesh", mesh, "error-study mesh size per axis")->check(CLI::Range(3, 400));
  app.add_option("--jobs", jobs, "worker threads for the error study")->check(CLI::PositiveNumber);
  app.add_option("--only", only, "criteria to run")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected(only.begin(), only.end());

  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"AEP reproduction", aep_reproduction},
      {"degenerate-angle reductions", degenerate_angles},
      {"expansion correctness", expansion_correctness},
      {"eigenstructure", eigenstructure_check},
      {"linear-model consistency", linear_model_check},
      {"residual-order scaling", residual_order_scaling},
      {"error-study patterns", [&](Verdict& v) { error_patterns(v, mesh, jobs); }},
      {"integrator gates", integrator_gates},
      {"determinism and round-trip", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = int(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      criteria[k].second(v);
    } catch (const std::exception& e) {
      v.need(false, std::string("exception: ") + e.what());
    }
    failed += !v.ok;
    std::cout << (v.ok ? "PASS" : "FAIL") << " " << id << " " << criteria[k].first << ": " << v.detail.str();
    if (!v.ok) {
      std::cout << " | failed:";
      for (std::size_t f = 0; f < v.failures.size(); ++f) std::cout << (f ? "; " : " ") << v.failures[f];
    }
    std::cout << std::endl;
  }
  return failed ? 1 : 0;
}
