#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace iedd::app {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNotConverged = 2 };

// Each command reads a JSON config, writes its outputs under
// output.directory and returns an exit code. Messages go to `err`. On a
// configuration error nothing is written.
int cmd_solve(const std::filesystem::path& config, std::ostream& err);
int cmd_compare(const std::filesystem::path& config, std::ostream& err);
int cmd_logsim(const std::filesystem::path& config, std::ostream& err);

// Shortest round-trip decimal form; identical input gives identical text.
std::string format_number(double v);

// sweep,subdomain,gmres_iters,inner_tol,full_residual; the first row is the
// initial state (sweep 0, no subdomain).
void write_history_csv(const std::vector<SweepRecord>& history, double initial_residual,
                       std::ostream& out);

// receiver_id,x,y,z,component,real,imag,magnitude
void write_receivers_csv(const std::vector<Receiver>& receivers, const std::vector<CVec3>& H,
                         std::ostream& out);

}  // namespace iedd::app
