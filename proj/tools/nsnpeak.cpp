// nsnpeak: peak-minimizing epidemic control under an L1 budget.
//
//   nsnpeak analyze  [--q 28]
//   nsnpeak simulate [--policy nsn|zero|morris|constant] [--level L] [--u U] [--duration D]
//   nsnpeak sweep    [--q-min 0] [--q-max 1e6] [--n-points 61] [--scale log|linear]
//   nsnpeak mischoice [--deviations -0.1,-0.05,...]
//   nsnpeak verify   [--trials 1000] [--level L]
//   nsnpeak compare  [--durations 5,10,...] [--duration D]
//
// Common flags: --config PATH --out DIR --format csv,json,svg --seed N
//               --beta --gamma --s0 --i0 --q --step --t-max

#include "cli/commands.hpp"
#include "cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

using nsnpeak::cli::RunConfig;

// Flags are collected as strings and applied after the config file so the
// command line always wins.
struct FlagSet {
  std::map<std::string, std::string> values;

  void add(CLI::App& app, const std::string& flag, const std::string& key,
           const std::string& help) {
    app.add_option(flag, values[key], help);
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peak-minimizing epidemic control (NSN strategy) toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  FlagSet flags;
  app.add_option("--config", config_path, "key = value configuration file");
  flags.add(app, "--out", "out", "output directory");
  flags.add(app, "--format", "format", "comma-separated subset of csv,json,svg");
  flags.add(app, "--seed", "seed", "random seed");
  flags.add(app, "--beta", "beta", "transmission rate");
  flags.add(app, "--gamma", "gamma", "recovery rate");
  flags.add(app, "--s0", "s0", "initial susceptible proportion");
  flags.add(app, "--i0", "i0", "initial infected proportion");
  flags.add(app, "--q", "q", "control budget Q");
  flags.add(app, "--step", "step", "integrator time step");
  flags.add(app, "--t-max", "t_max", "integration horizon cap");
  flags.add(app, "--t-stop", "t_stop", "fixed integration window");
  app.fallthrough();

  auto* analyze = app.add_subcommand("analyze", "thresholds and optimal level");
  auto* simulate = app.add_subcommand("simulate", "simulate one strategy");
  flags.add(*simulate, "--policy", "policy", "nsn, zero, morris or constant");
  flags.add(*simulate, "--level", "level", "NSN level (default: optimal for Q)");
  flags.add(*simulate, "--u", "u", "constant control value");
  flags.add(*simulate, "--duration", "duration", "four-phase intervention duration");

  auto* sweep = app.add_subcommand("sweep", "characteristics as functions of Q");
  flags.add(*sweep, "--q-min", "q_min", "smallest budget");
  flags.add(*sweep, "--q-max", "q_max", "largest budget");
  flags.add(*sweep, "--n-points", "n_points", "grid size");
  flags.add(*sweep, "--scale", "scale", "log or linear");

  auto* mischoice = app.add_subcommand("mischoice", "budget under a mis-chosen level");
  flags.add(*mischoice, "--deviations", "deviations", "comma-separated relative deviations");

  auto* verify = app.add_subcommand("verify", "numerical optimality checks");
  flags.add(*verify, "--trials", "trials", "number of random admissible controls");
  flags.add(*verify, "--level", "level", "NSN level to check (default: optimal for Q)");

  auto* compare = app.add_subcommand("compare", "NSN vs four-phase strategy");
  flags.add(*compare, "--durations", "durations", "comma-separated durations");
  flags.add(*compare, "--duration", "duration", "duration for the time-course plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nsnpeak::cli::kExitValidation;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      nsnpeak::cli::load_config_file(cfg, config_path);
    }
    for (const auto& [key, value] : flags.values) {
      if (!value.empty()) {
        nsnpeak::cli::apply_setting(cfg, key, value);
      }
    }
  } catch (const nsnpeak::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return nsnpeak::cli::kExitValidation;
  } catch (const nsnpeak::cli::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return nsnpeak::cli::kExitIo;
  }

  for (auto* sub : {analyze, simulate, sweep, mischoice, verify, compare}) {
    if (sub->parsed()) {
      return nsnpeak::cli::run_command(sub->get_name(), cfg, std::cout, std::cerr);
    }
  }
  return nsnpeak::cli::kExitValidation;
}
