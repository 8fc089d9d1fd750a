#pragma once

#include <string>

#include "vhrd/scenario.hpp"

namespace vhrd {

/// Subcommand bodies shared by the CLI and the tests. Each writes its
/// output files under out_dir (created if missing) and throws ConfigError
/// or SolverError on failure; output is deterministic for a given config.
void cmd_r0(const Scenario& s, const std::string& out_dir);
void cmd_equilibria(const Scenario& s, const std::string& out_dir);
void cmd_simulate(const Scenario& s, const std::string& out_dir);
void cmd_sweep(const Scenario& s, const std::string& out_dir);
void cmd_ode(const Scenario& s, const std::string& out_dir);

/// Re-reads equilibria.csv from out_dir and checks the stationary residuals
/// of every column set against the scenario coefficients.
void cmd_verify(const Scenario& s, const std::string& out_dir);

/// Fixed 17-significant-digit formatting used in every CSV cell.
std::string format_g17(double v);

} // namespace vhrd
