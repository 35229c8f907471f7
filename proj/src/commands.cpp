#include "lpsrp/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lpsrp/csv_io.hpp"
#include "lpsrp/equilibria.hpp"
#include "lpsrp/lindstedt.hpp"
#include "lpsrp/series_io.hpp"
#include "lpsrp/trajectory.hpp"
#include "lpsrp/validation.hpp"

namespace lpsrp {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

SystemParams<double> params_of(const RunConfig& c) {
  return SystemParams<double>::from_degrees(c.mu, c.beta, c.alpha_deg, c.gamma_deg);
}

std::vector<double> linspace(const AngleRange& r) {
  std::vector<double> v(r.count);
  for (int k = 0; k < r.count; ++k)
    v[k] = r.count == 1 ? r.start : r.start + (r.stop - r.start) * double(k) / double(r.count - 1);
  return v;
}

Frame frame_of(const std::string& s) { return s == "aep" ? Frame::AepRelative : Frame::Barycentric; }

std::string join(const std::array<double, 4>& a) {
  std::string s;
  for (std::size_t k = 0; k < a.size(); ++k) s += (k ? " " : "") + format_double(a[k]);
  return s;
}

using Meta = std::vector<std::pair<std::string, std::string>>;

Meta solution_meta(const SeriesSolution<double>& sol, const std::string& coeffs) {
  const auto& p = sol.params();
  const auto& H = sol.aep().position;
  return {{"coeffs", coeffs},
          {"mu", format_double(p.mu)},
          {"beta", format_double(p.beta)},
          {"alpha_deg", format_double(rad2deg(p.alpha))},
          {"gamma_deg", format_double(rad2deg(p.gamma))},
          {"aep", format_double(H.x()) + " " + format_double(H.y()) + " " + format_double(H.z())},
          {"order", std::to_string(sol.order)}};
}

// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ostringstream ss;
  write(ss);
  write_text_file(path, ss.str());
}

}  // namespace

void cmd_solve_aep(const RunConfig& cfg, std::ostream& out) {
  const auto aep = find_aep(params_of(cfg), cfg.lagrange_index);
  json doc = {{"mu", cfg.mu},
              {"beta", cfg.beta},
              {"alpha_deg", cfg.alpha_deg},
              {"gamma_deg", cfg.gamma_deg},
              {"lagrange_index", cfg.lagrange_index},
              {"aep", {aep.position.x(), aep.position.y(), aep.position.z()}},
              {"residual", aep.residual_norm},
              {"iterations", aep.iterations}};
  try {
    doc["linear"] = linear_model_to_json(build_linear_model(aep));
  } catch (const Error& e) {
    // the equilibrium is still valid; only its centre-saddle split failed
    doc["linear_error"] = e.what();
  }
  emit(cfg.output.out, out, [&](std::ostream& os) { os << dump_document(doc); });
}

void cmd_sweep_aep(const RunConfig& cfg, std::ostream& out) {
  const auto cells = sweep_aep(cfg.mu, cfg.beta, linspace(cfg.sweep.alpha_deg), linspace(cfg.sweep.gamma_deg),
                               cfg.lagrange_index);
  emit(cfg.output.out, out, [&](std::ostream& os) { write_sweep_csv(os, cells); });
}

void cmd_build_series(const RunConfig& cfg, std::ostream& out) {
  const auto aep = find_aep(params_of(cfg), cfg.lagrange_index);
  BuildOptions<double> opt;
  opt.hyperbolic = cfg.hyperbolic;
  const auto sol = build(aep, cfg.order, opt);
  write_solution(cfg.output.coeffs, sol);
  out << "wrote " << cfg.output.coeffs << " (order " << sol.order << ", " << sol.diagnostics.group_count
      << " groups, max residual " << format_double(sol.diagnostics.max_residual) << ", "
      << sol.diagnostics.ill_conditioned << " ill-conditioned)\n";
}

void cmd_gen_orbit(const RunConfig& cfg, std::ostream& out) {
  const auto sol = read_solution(cfg.output.coeffs);
  TrajectoryRequest<double> req;
  req.amplitudes = cfg.orbit.amplitudes;
  req.phi1 = deg2rad(cfg.orbit.phases_deg[0]);
  req.phi2 = deg2rad(cfg.orbit.phases_deg[1]);
  req.t0 = cfg.orbit.t_span[0];
  req.t1 = cfg.orbit.t_span[1];
  req.samples = cfg.orbit.samples;
  req.frame = frame_of(cfg.orbit.frame);
  const auto samples = sample(sol, req);
  Meta meta = solution_meta(sol, cfg.output.coeffs);
  meta.insert(meta.begin(), {"kind", "orbit"});
  meta.push_back({"class", to_string(classify(req.amplitudes))});
  meta.push_back({"amplitudes", join(req.amplitudes)});
  meta.push_back({"phases_deg", format_double(cfg.orbit.phases_deg[0]) + " " + format_double(cfg.orbit.phases_deg[1])});
  meta.push_back({"frame", cfg.orbit.frame});
  emit(cfg.output.out, out, [&](std::ostream& os) { write_trajectory_csv(os, samples, meta); });
}

void cmd_gen_manifold(const RunConfig& cfg, std::ostream& out) {
  const auto sol = read_solution(cfg.output.coeffs);
  ManifoldOptions<double> opt;
  opt.duration = cfg.manifold.duration;
  opt.samples = cfg.manifold.samples;
  opt.frame = frame_of(cfg.manifold.frame);
  opt.integrate = cfg.manifold.integrate;
  const auto arcs = manifold_family(sol, cfg.manifold.alpha3, cfg.manifold.alpha4, cfg.manifold.epsilon,
                                    ManifoldBranch::Both, opt);
  const fs::path dir = cfg.output.out.empty() ? fs::path("manifold") : fs::path(cfg.output.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create directory '" + dir.string() + "': " + ec.message());
  for (const auto& arc : arcs) {
    std::string name = arc.label;
    const char sign = name.back();
    name.pop_back();
    name += sign == '+' ? "_plus" : "_minus";
    Meta meta = solution_meta(sol, cfg.output.coeffs);
    meta.insert(meta.begin(), {"kind", "manifold"});
    meta.push_back({"branch", arc.label});
    meta.push_back({"class", to_string(classify(arc.amplitudes))});
    meta.push_back({"amplitudes", join(arc.amplitudes)});
    meta.push_back({"epsilon", format_double(cfg.manifold.epsilon)});
    meta.push_back({"propagation", cfg.manifold.integrate ? "integrated" : "series"});
    meta.push_back({"frame", cfg.manifold.frame});
    const fs::path file = dir / ("manifold_" + name + ".csv");
    emit(file.string(), out, [&](std::ostream& os) { write_trajectory_csv(os, arc.samples, meta); });
    out << "wrote " << file.string() << " (" << arc.samples.size() << " samples)\n";
  }
}

void cmd_error_study(const RunConfig& cfg, std::ostream& out) {
  const auto sol = read_solution(cfg.output.coeffs);
  MeshSpec<double> mesh;
  mesh.n3 = cfg.study.n3;
  mesh.n4 = cfg.study.n4;
  mesh.min3 = cfg.study.min3;
  mesh.max3 = cfg.study.max3;
  mesh.min4 = cfg.study.min4;
  mesh.max4 = cfg.study.max4;
  mesh.t_eval = cfg.study.t_eval;
  mesh.jobs = cfg.study.jobs;
  mesh.arc = HalfArcOptions<double>::with_mode(cfg.study.mode == "direct" ? ErrorMode::Direct : ErrorMode::Deviation);
  const ErrorGrid g = error_study(sol, mesh);

  const std::string csv = cfg.output.out.empty() ? "error_grid.csv" : cfg.output.out;
  std::ostringstream ss;
  write_grid_csv(ss, g);
  write_text_file(csv, ss.str());

  json meta = {{"coeffs", cfg.output.coeffs}, {"mode", cfg.study.mode}, {"order", sol.order}};
  for (const auto& [k, v] : solution_meta(sol, cfg.output.coeffs)) meta[k] = v;
  json side = grid_sidecar(g, meta);
  if (g.n3() == g.n4() && g.n3() >= 3) {
    const auto rep = check_patterns(g);
    side["patterns"] = {{"diagonal_spearman", rep.diagonal_spearman},
                        {"valley_cells", rep.valley_cells},
                        {"valley_component", rep.valley_component},
                        {"trough_cells", rep.regrowth_cells},
                        {"ray_regrowth_cells", rep.ray_regrowth_cells},
                        {"growth", rep.growth},
                        {"valley", rep.valley},
                        {"renewed_growth", rep.renewed_growth}};
  }
  write_text_file(sidecar_path(csv), dump_document(side));
  out << "wrote " << csv << " and " << sidecar_path(csv) << " (" << g.n3() << "x" << g.n4() << ", "
      << side["failed_cells"].size() << " failed cells)\n";
}

std::string sidecar_path(const std::string& csv_path) {
  fs::path p(csv_path);
  if (p.extension() == ".csv") return p.replace_extension(".json").string();
  return csv_path + ".json";
}

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return exit_ok;
  } catch (const NoConvergence& e) {
    err << "error: no convergence: " << e.what() << "\n";
    return exit_no_convergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return exit_invalid;
}

}  // namespace lpsrp
