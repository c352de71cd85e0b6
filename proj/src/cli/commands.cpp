#include "cli/commands.hpp"

#include <nsnpeak/io.hpp>
#include <nsnpeak/svg_plot.hpp>
#include <nsnpeak/verification.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace nsnpeak::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Collects the files of one run and writes the manifest next to them.
class OutputSet {
public:
  OutputSet(const RunConfig& cfg, std::string command)
      : cfg_(cfg), command_(std::move(command)) {
    try {
      fs::create_directories(cfg.out_dir);
    } catch (const fs::filesystem_error& e) {
      throw IoError("cannot create output directory '" + cfg.out_dir.string() +
                    "': " + e.what());
    }
  }

  void write(const std::string& name, const std::string& content) {
    try {
      write_text_file(cfg_.out_dir / name, content);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    files_.push_back(name);
  }

  void write_json(const std::string& name, const json& j) {
    write(name, j.dump(2) + "\n");
  }

  void write_manifest() {
    json manifest = {{"tool", "nsnpeak"},
                     {"version", kToolVersion},
                     {"command", command_},
                     {"seed", cfg_.seed},
                     {"config", config_to_json(cfg_)},
                     {"outputs", files_}};
    write("manifest_" + command_ + ".json", manifest.dump(2) + "\n");
  }

private:
  const RunConfig& cfg_;
  std::string command_;
  std::vector<std::string> files_;
};

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::vector<svg::Marker> event_markers(const Trajectory& traj) {
  std::vector<svg::Marker> markers;
  for (const Event& e : traj.events) {
    switch (e.kind) {
    case EventKind::InterventionStart:
      markers.push_back({e.state.t, "start"});
      break;
    case EventKind::InterventionEnd:
      markers.push_back({e.state.t, "end"});
      break;
    case EventKind::PeakReached:
      markers.push_back({e.state.t, "peak " + fixed(e.state.i, 4)});
      break;
    default:
      break;
    }
  }
  return markers;
}

svg::Series column(const Trajectory& traj, double Sample::*field,
                   std::string label, std::string color) {
  svg::Series s;
  s.label = std::move(label);
  s.color = std::move(color);
  s.x.reserve(traj.samples.size());
  s.y.reserve(traj.samples.size());
  for (const Sample& smp : traj.samples) {
    s.x.push_back(smp.t);
    s.y.push_back(smp.*field);
  }
  return s;
}

std::string trajectory_svg(const Trajectory& traj, const std::string& title) {
  const auto markers = event_markers(traj);
  std::vector<svg::Panel> panels(3);
  panels[0] = {title + ": S(t)", "t", "S", {column(traj, &Sample::s, "", "#2ca02c")}, markers};
  panels[1] = {"I(t)", "t", "I", {column(traj, &Sample::i, "", "#d62728")}, markers};
  panels[2] = {"u(t)", "t", "u", {column(traj, &Sample::u, "", "#1f77b4")}, markers};
  return svg::render(panels);
}

double selected_level(const RunConfig& cfg) {
  if (cfg.level) {
    return *cfg.level;
  }
  return optimal_level_closed_form(cfg.q, cfg.params, cfg.init).level;
}

} // namespace

std::vector<double> budget_grid(double q_min, double q_max, int n_points,
                                bool log_scale) {
  if (!(q_min >= 0.0) || !(q_max > q_min) || n_points < 2) {
    throw ValidationError("budget grid needs 0 <= q_min < q_max and n >= 2");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_points));
  if (!log_scale) {
    for (int k = 0; k < n_points; ++k) {
      grid.push_back(q_min + (q_max - q_min) * k / (n_points - 1));
    }
    grid.back() = q_max;
    return grid;
  }
  double lo = q_min;
  int n_geo = n_points;
  if (q_min == 0.0) {
    grid.push_back(0.0);
    lo = std::min(1.0, q_max / 1000.0);
    --n_geo;
  }
  if (n_geo == 1) {
    grid.push_back(q_max);
    return grid;
  }
  const double ratio = std::log(q_max / lo);
  for (int k = 0; k < n_geo; ++k) {
    grid.push_back(lo * std::exp(ratio * k / (n_geo - 1)));
  }
  grid.back() = q_max;
  return grid;
}

std::vector<MischoiceRow> mischoice_rows(const EpidemicParams& params,
                                         const InitialCondition& init, double q,
                                         std::span<const double> deviations) {
  const DerivedThresholds th = derive_thresholds(params, init);
  const NsnSolution opt = optimal_level_closed_form(q, params, init);
  std::vector<MischoiceRow> rows;
  for (double dev : deviations) {
    MischoiceRow row;
    row.deviation = dev;
    row.level = opt.level * (1.0 + dev);
    row.in_range = row.level >= init.i0 && row.level <= th.i_h;
    if (row.in_range) {
      row.budget = budget_of_level(row.level, params, init);
      if (opt.regime == BudgetRegime::BudgetLimited && !opt.trivial && q > 0.0) {
        // (budget - q) / q simplified; exactly 0 at dev = 0.
        const double a = q * params.beta * params.s_h();
        row.relative_change = -(a + 1.0) * dev / ((1.0 + dev) * a);
      } else {
        row.relative_change = q > 0.0 ? (row.budget - q) / q : kNaN;
      }
    } else {
      row.budget = kNaN;
      row.relative_change = kNaN;
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const DerivedThresholds th = derive_thresholds(cfg.params, cfg.init);
  out << "R0                 = " << fixed(th.r0) << '\n'
      << "S_h                = " << fixed(th.s_h) << '\n'
      << "I_h                = " << fixed(th.i_h) << '\n';
  if (!th.outbreak_possible) {
    out << "Assumption 1 violated: R0 <= 1, no outbreak can occur\n";
  }
  if (!th.nontrivial) {
    out << "trivial case: peak = I0 = " << fixed(cfg.init.i0)
        << " (S0 <= S_h), no control needed\n";
    return kExitOk;
  }
  const NsnSolution sol = optimal_level_closed_form(cfg.q, cfg.params, cfg.init);
  out << "Q_max              = " << fixed(q_max(cfg.params, cfg.init)) << '\n'
      << "u_max bound 1-S_h  = " << fixed(1.0 - th.s_h) << '\n'
      << "Q                  = " << fixed(cfg.q) << '\n'
      << "regime             = "
      << (sol.regime == BudgetRegime::BudgetLimited ? "BudgetLimited" : "BudgetSlack")
      << '\n'
      << "optimal I_bar      = " << fixed(sol.level) << '\n'
      << "S_bar              = " << fixed(sol.s_bar) << '\n'
      << "u_max              = " << fixed(sol.u_max) << '\n'
      << "duration d         = " << fixed(sol.duration) << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  Trajectory traj;
  std::string title;
  if (cfg.policy == "zero") {
    traj = simulate(cfg.params, cfg.init, cfg.q, ZeroControl{}, cfg.integrator);
    title = "no control";
  } else if (cfg.policy == "constant") {
    traj = simulate(cfg.params, cfg.init, cfg.q, ConstantControl{cfg.constant_u},
                    cfg.integrator);
    title = "constant u = " + fixed(cfg.constant_u, 4);
  } else if (cfg.policy == "morris") {
    MorrisResult m = morris_strategy(cfg.params, cfg.init, cfg.duration, cfg.integrator);
    traj = std::move(m.trajectory);
    title = "four-phase, D = " + fixed(cfg.duration, 4);
  } else {
    const double level = selected_level(cfg);
    traj = simulate(cfg.params, cfg.init, cfg.q, NsnFeedback{level}, cfg.integrator);
    title = "NSN, I_bar = " + fixed(level, 4);
  }

  OutputSet files(cfg, "simulate");
  if (cfg.formats.csv) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    files.write("trajectory.csv", csv.str());
  }
  if (cfg.formats.json) {
    files.write_json("trajectory.json", trajectory_to_json(traj));
  }
  files.write_manifest();
  if (cfg.formats.svg) {
    files.write("trajectory.svg", trajectory_svg(traj, title));
  }

  out << "policy        = " << cfg.policy << '\n'
      << "peak I        = " << fixed(traj.peak_i, 8) << " at t = "
      << fixed(traj.peak_time(), 8) << '\n'
      << "budget spent  = " << fixed(traj.budget_spent, 8) << '\n'
      << "max u         = " << fixed(traj.max_control(), 8) << '\n'
      << "switches      = " << traj.control_switches() << '\n'
      << "samples       = " << traj.samples.size() << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto grid = budget_grid(cfg.q_min, cfg.q_max, cfg.n_points, cfg.log_q);
  const auto rows = sweep_over_budget(cfg.params, cfg.init, grid, cfg.integrator);
  const double u_bound = 1.0 - cfg.params.s_h();

  bool ok = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    ok = ok && rows[k].u_max <= u_bound;
    if (k > 0) {
      ok = ok && rows[k].level <= rows[k - 1].level &&
           rows[k].duration >= rows[k - 1].duration;
    }
  }

  OutputSet files(cfg, "sweep");
  if (cfg.formats.csv) {
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    files.write("sweep.csv", csv.str());
  }
  if (cfg.formats.json) {
    files.write_json("sweep.json", {{"rows", sweep_to_json(rows)},
                                    {"monotone_and_bounded", ok}});
  }
  files.write_manifest();
  if (cfg.formats.svg) {
    auto series = [&](double SweepRow::*field, const std::string& color) {
      svg::Series s;
      s.color = color;
      for (const auto& r : rows) {
        s.x.push_back(r.q);
        s.y.push_back(r.*field);
      }
      return s;
    };
    const bool log_x = cfg.log_q;
    std::vector<svg::Panel> panels = {
        {"intervention start t_i", "Q", "t_i", {series(&SweepRow::t_i, "#1f77b4")}, {}, log_x},
        {"duration d", "Q", "d", {series(&SweepRow::duration, "#ff7f0e")}, {}, log_x},
        {"peak I_bar", "Q", "I_bar", {series(&SweepRow::level, "#d62728")}, {}, log_x},
        {"maximal control u_max", "Q", "u_max", {series(&SweepRow::u_max, "#2ca02c")}, {}, log_x},
    };
    files.write("sweep.svg", svg::render(panels));
  }

  out << "Q,t_i,d,I_bar,u_max\n";
  for (const auto& r : rows) {
    out << fixed(r.q) << ',' << fixed(r.t_i) << ',' << fixed(r.duration) << ','
        << fixed(r.level) << ',' << fixed(r.u_max) << '\n';
  }
  if (!ok) {
    out << "sweep invariant violated (I_bar decreasing, d increasing, u_max <= 1 - S_h)\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_mischoice(const RunConfig& cfg, std::ostream& out) {
  const auto rows = mischoice_rows(cfg.params, cfg.init, cfg.q, cfg.deviations);

  OutputSet files(cfg, "mischoice");
  if (cfg.formats.csv) {
    std::ostringstream csv;
    csv << "deviation,I_bar,budget,relative_change,in_range\n";
    for (const auto& r : rows) {
      csv << format_double(r.deviation) << ',' << format_double(r.level) << ','
          << format_double(r.budget) << ',' << format_double(r.relative_change)
          << ',' << (r.in_range ? 1 : 0) << '\n';
    }
    files.write("mischoice.csv", csv.str());
  }
  if (cfg.formats.json) {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"deviation", r.deviation},
                     {"I_bar", r.level},
                     {"budget", r.in_range ? json(r.budget) : json(nullptr)},
                     {"relative_change",
                      std::isfinite(r.relative_change) ? json(r.relative_change)
                                                       : json(nullptr)},
                     {"in_range", r.in_range}});
    }
    files.write_json("mischoice.json", {{"q", cfg.q}, {"rows", arr}});
  }
  files.write_manifest();

  out << "I_bar - I_bar*   L(I_bar) - Q\n";
  for (const auto& r : rows) {
    out << std::showpos << std::setw(8) << fixed(100.0 * r.deviation, 4) << "%"
        << std::noshowpos << "        ";
    if (r.in_range) {
      out << std::showpos << fixed(100.0 * r.relative_change, 4) << "%"
          << std::noshowpos << '\n';
    } else {
      out << "out of range [I0, I_h]\n";
    }
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const double level = selected_level(cfg);
  const Trajectory nsn =
      simulate(cfg.params, cfg.init, cfg.q, NsnFeedback{level}, cfg.integrator);
  const double expected_budget = budget_of_level(level, cfg.params, cfg.init);
  const double line = budget_line_integral(nsn, cfg.params);
  const double spent = nsn.budget_spent;

  const bool admissible = nsn.admissible(1e-6 * std::max(1.0, cfg.q));
  const bool peak_ok = std::fabs(nsn.peak_i - level) <= 1e-6;
  const bool budget_ok =
      std::fabs(spent - expected_budget) <= 1e-3 * std::max(1.0, expected_budget);
  const bool identity_ok = spent > 1e-6
                               ? std::fabs(line + spent) / spent < 1e-3
                               : std::fabs(line + spent) < 1e-4;

  AdversarialOptions opts;
  opts.integrator = cfg.integrator;
  const AdversarialReport report = adversarial_search(
      cfg.params, cfg.init, cfg.q, cfg.trials, cfg.seed, opts);

  const bool passed = admissible && peak_ok && budget_ok && identity_ok && report.passed();

  OutputSet files(cfg, "verify");
  if (cfg.formats.json) {
    json checks = {
        {"level", level},
        {"nsn_peak", nsn.peak_i},
        {"nsn_budget_spent", spent},
        {"budget_of_level", expected_budget},
        {"line_integral", line},
        {"min_remaining_budget", nsn.min_budget()},
        {"admissible", admissible},
        {"peak_matches_level", peak_ok},
        {"budget_matches_closed_form", budget_ok},
        {"line_integral_identity", identity_ok},
    };
    files.write_json("verify.json", {{"nsn", checks},
                                     {"adversarial", report_to_json(report)},
                                     {"passed", passed}});
  }
  if (cfg.formats.csv) {
    std::ostringstream csv;
    write_trials_csv(csv, report);
    files.write("trials.csv", csv.str());
  }
  files.write_manifest();

  out << "NSN level            = " << fixed(level, 8) << '\n'
      << "simulated peak       = " << fixed(nsn.peak_i, 8)
      << (peak_ok ? "  ok" : "  FAIL") << '\n'
      << "budget spent         = " << fixed(spent, 8) << " (closed form "
      << fixed(expected_budget, 8) << ")" << (budget_ok ? "  ok" : "  FAIL") << '\n'
      << "remaining budget min = " << fixed(nsn.min_budget(), 8)
      << (admissible ? "  ok" : "  FAIL: budget overspent") << '\n'
      << "line integral        = " << fixed(line, 8)
      << (identity_ok ? "  ok" : "  FAIL") << '\n'
      << "adversaries          = " << report.trials << ", best peak "
      << fixed(report.best_adversary_peak, 8) << ", margin "
      << fixed(report.margin, 4) << ", violations " << report.violations.size()
      << (report.passed() ? "  ok" : "  FAIL") << '\n';
  return passed ? kExitOk : kExitInvariant;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const Comparison cmp =
      compare_strategies(cfg.params, cfg.init, cfg.durations, cfg.integrator);

  // Time courses of both strategies at the configured duration.
  const double q_match = budget_for_duration(cfg.duration, cfg.params, cfg.init);
  const NsnSolution nsn_sol = optimal_level_closed_form(q_match, cfg.params, cfg.init);
  const Trajectory nsn = simulate(cfg.params, cfg.init, q_match,
                                  NsnFeedback{nsn_sol.level}, cfg.integrator);
  const MorrisResult morris =
      morris_strategy(cfg.params, cfg.init, cfg.duration, cfg.integrator);

  OutputSet files(cfg, "compare");
  if (cfg.formats.csv) {
    std::ostringstream csv;
    write_comparison_csv(csv, cmp);
    files.write("compare.csv", csv.str());
  }
  if (cfg.formats.json) {
    json j = comparison_to_json(cmp);
    j["timeseries"] = {{"duration", cfg.duration},
                       {"nsn_budget", nsn.budget_spent},
                       {"nsn_peak", nsn.peak_i},
                       {"nsn_switches", nsn.control_switches()},
                       {"morris_budget", morris.budget_spent},
                       {"morris_peak", morris.peak},
                       {"morris_switches", morris.trajectory.control_switches()}};
    files.write_json("compare.json", j);
  }
  files.write_manifest();
  if (cfg.formats.svg) {
    auto row_series = [&](double ComparisonRow::*field, std::string label,
                          std::string color, bool dashed) {
      svg::Series s;
      s.label = std::move(label);
      s.color = std::move(color);
      s.dashed = dashed;
      for (const auto& r : cmp.rows) {
        s.x.push_back(r.duration);
        s.y.push_back(r.*field);
      }
      return s;
    };
    std::vector<svg::Panel> perf = {
        {"peak at equal duration", "duration", "peak",
         {row_series(&ComparisonRow::nsn_peak, "NSN", "#1f77b4", false),
          row_series(&ComparisonRow::morris_peak, "four-phase", "#d62728", true)},
         {}},
        {"budget at equal duration", "duration", "budget",
         {row_series(&ComparisonRow::nsn_budget, "NSN", "#1f77b4", false),
          row_series(&ComparisonRow::morris_budget, "four-phase", "#d62728", true)},
         {}},
    };
    files.write("compare.svg", svg::render(perf));

    svg::Series nsn_i = column(nsn, &Sample::i, "NSN", "#1f77b4");
    svg::Series morris_i = column(morris.trajectory, &Sample::i, "four-phase", "#d62728");
    morris_i.dashed = true;
    svg::Series nsn_u = column(nsn, &Sample::u, "NSN", "#1f77b4");
    svg::Series morris_u = column(morris.trajectory, &Sample::u, "four-phase", "#d62728");
    morris_u.dashed = true;
    std::vector<svg::Panel> course = {
        {"I(t) at duration " + fixed(cfg.duration, 4), "t", "I", {nsn_i, morris_i}, {}},
        {"u(t)", "t", "u", {nsn_u, morris_u}, {}},
    };
    files.write("compare_timeseries.svg", svg::render(course));
  }

  out << "d,nsn_peak,morris_peak,nsn_budget,morris_budget\n";
  for (const auto& r : cmp.rows) {
    out << fixed(r.duration) << ',' << fixed(r.nsn_peak) << ','
        << fixed(r.morris_peak) << ',' << fixed(r.nsn_budget) << ','
        << fixed(r.morris_budget) << '\n';
  }
  out << "NSN budget lower on every row: " << (cmp.nsn_budget_lower ? "yes" : "NO")
      << "\npeaks converge with duration:  " << (cmp.peaks_converge ? "yes" : "no")
      << "\nswitches at d = " << fixed(cfg.duration, 4) << ": NSN "
      << nsn.control_switches() << ", four-phase "
      << morris.trajectory.control_switches() << '\n';
  return cmp.nsn_budget_lower ? kExitOk : kExitInvariant;
}

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  try {
    cfg.validate();
    if (name == "analyze") return cmd_analyze(cfg, out);
    if (name == "simulate") return cmd_simulate(cfg, out);
    if (name == "sweep") return cmd_sweep(cfg, out);
    if (name == "mischoice") return cmd_mischoice(cfg, out);
    if (name == "verify") return cmd_verify(cfg, out);
    if (name == "compare") return cmd_compare(cfg, out);
    err << "unknown command '" << name << "'\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const HorizonError& e) {
    err << "integration error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

} // namespace nsnpeak::cli
