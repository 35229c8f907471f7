#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "lpsrp/commands.hpp"

int main(int argc, char** argv) {
  using namespace lpsrp;
  CLI::App app{"Semi-analytical orbits and manifolds around solar-sail equilibria"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  ConfigOverrides ov;
  app.add_option("--config", config_path, "RunConfig JSON document")->check(CLI::ExistingFile);
  app.add_option("--mu", ov.mu, "mass parameter");
  app.add_option("--beta", ov.beta, "sail lightness number");
  app.add_option("--alpha", ov.alpha_deg, "cone angle [deg]");
  app.add_option("--gamma", ov.gamma_deg, "clock angle [deg]");
  app.add_option("--order", ov.order, "series order N");
  app.add_option("--lagrange-index", ov.lagrange_index, "classical point seeding the Newton solve");
  app.add_option("--jobs", ov.jobs, "worker threads for error-study");
  app.add_option("--coeffs", ov.coeffs, "coefficient file (written by build-series, read by the others)");
  app.add_option("--out", ov.out, "output file or directory");

  using Body = void (*)(const RunConfig&, std::ostream&);
  const std::map<std::string, std::pair<std::string, Body>> commands = {
      {"solve-aep", {"Solve for the artificial equilibrium point", cmd_solve_aep}},
      {"sweep-aep", {"Equilibria over an attitude grid", cmd_sweep_aep}},
      {"build-series", {"Build the Lindstedt-Poincare series", cmd_build_series}},
      {"gen-orbit", {"Sample an orbit from a coefficient file", cmd_gen_orbit}},
      {"gen-manifold", {"Stable and unstable manifold arcs", cmd_gen_manifold}},
      {"error-study", {"Half-arc position error over an amplitude mesh", cmd_error_study}},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : commands) subs[name] = app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  return run_guarded(
      [&] {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        apply_overrides(cfg, ov);
        for (const auto& [name, sub] : subs)
          if (sub->parsed()) commands.at(name).second(cfg, std::cout);
      },
      std::cerr);
}
