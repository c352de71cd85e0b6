#pragma once

#include "cli/config.hpp"

#include <nsnpeak/nsn_policy.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nsnpeak::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitInvariant = 2,
  kExitIo = 3,
};

/// Budget grid for sweeps. A log grid with q_min = 0 starts with Q = 0 and
/// continues geometrically from min(1, q_max / 1000).
[[nodiscard]] std::vector<double> budget_grid(double q_min, double q_max,
                                              int n_points, bool log_scale);

struct MischoiceRow {
  double deviation{0.0};       // relative deviation of the level from the optimum
  double level{0.0};
  double budget{0.0};          // NaN when the level leaves [i0, i_h]
  double relative_change{0.0}; // (budget - Q) / Q, NaN when out of range
  bool in_range{true};
};

/// Budget needed when the optimal level for Q is mis-chosen by each deviation.
[[nodiscard]] std::vector<MischoiceRow>
mischoice_rows(const EpidemicParams& params, const InitialCondition& init,
               double q, std::span<const double> deviations);

int cmd_analyze(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_mischoice(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_compare(const RunConfig& cfg, std::ostream& out);

/// Validates `cfg`, dispatches to the named subcommand and maps exceptions to
/// exit codes (messages go to `err`).
int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out,
                std::ostream& err);

} // namespace nsnpeak::cli
