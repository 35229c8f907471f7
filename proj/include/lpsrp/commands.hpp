#pragma once

// Subcommand bodies. Each one is a function of the configuration and its input
// files; results go to the configured output paths or to `out`.

#include <functional>
#include <iosfwd>
#include <string>

#include "lpsrp/run_config.hpp"

namespace lpsrp {

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_no_convergence = 2 };

void cmd_solve_aep(const RunConfig& cfg, std::ostream& out);
void cmd_sweep_aep(const RunConfig& cfg, std::ostream& out);
void cmd_build_series(const RunConfig& cfg, std::ostream& out);
void cmd_gen_orbit(const RunConfig& cfg, std::ostream& out);
void cmd_gen_manifold(const RunConfig& cfg, std::ostream& out);
void cmd_error_study(const RunConfig& cfg, std::ostream& out);

/// Runs `body`, reporting failures on `err` and mapping them to an exit code.
int run_guarded(const std::function<void()>& body, std::ostream& err);

/// error-study writes the sidecar next to the CSV: grid.csv -> grid.json.
std::string sidecar_path(const std::string& csv_path);

}  // namespace lpsrp
