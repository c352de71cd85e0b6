#include <nsnpeak/io.hpp>

#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace nsnpeak {

using nlohmann::json;

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), res.ptr};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,S,I,C,u\n";
  for (const Sample& s : traj.samples) {
    os << format_double(s.t) << ',' << format_double(s.s) << ','
       << format_double(s.i) << ',' << format_double(s.c) << ','
       << format_double(s.u) << '\n';
  }
}

json trajectory_to_json(const Trajectory& traj) {
  json samples = json::array();
  for (const Sample& s : traj.samples) {
    samples.push_back({s.t, s.s, s.i, s.c, s.u});
  }
  json events = json::array();
  for (const Event& e : traj.events) {
    events.push_back({{"kind", std::string(to_string(e.kind))},
                      {"t", e.state.t},
                      {"S", e.state.s},
                      {"I", e.state.i},
                      {"C", e.state.c}});
  }
  return {{"columns", {"t", "S", "I", "C", "u"}},
          {"samples", std::move(samples)},
          {"events", std::move(events)},
          {"peak_i", traj.peak_i},
          {"budget_spent", traj.budget_spent}};
}

Trajectory trajectory_from_json(const json& j) {
  Trajectory traj;
  for (const auto& row : j.at("samples")) {
    if (row.size() != 5) {
      throw ValidationError("trajectory sample must have 5 columns");
    }
    traj.samples.push_back({row[0].get<double>(), row[1].get<double>(),
                            row[2].get<double>(), row[3].get<double>(),
                            row[4].get<double>()});
  }
  for (const auto& e : j.at("events")) {
    traj.events.push_back(
        {event_kind_from_string(e.at("kind").get<std::string>()),
         {e.at("t").get<double>(), e.at("S").get<double>(),
          e.at("I").get<double>(), e.at("C").get<double>()}});
  }
  traj.peak_i = j.at("peak_i").get<double>();
  traj.budget_spent = j.at("budget_spent").get<double>();
  return traj;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "Q,t_i,d,I_bar,u_max\n";
  for (const SweepRow& r : rows) {
    os << format_double(r.q) << ',' << format_double(r.t_i) << ','
       << format_double(r.duration) << ',' << format_double(r.level) << ','
       << format_double(r.u_max) << '\n';
  }
}

json sweep_to_json(std::span<const SweepRow> rows) {
  json out = json::array();
  for (const SweepRow& r : rows) {
    out.push_back({{"Q", r.q},
                   {"t_i", r.t_i},
                   {"d", r.duration},
                   {"I_bar", r.level},
                   {"u_max", r.u_max}});
  }
  return out;
}

namespace {

json trial_to_json(const AdversaryTrial& t) {
  return {{"index", t.index},       {"seed", t.seed},
          {"family", to_string(t.family)}, {"pieces", t.pieces},
          {"budget_used", t.budget_used},  {"peak", t.peak}};
}

} // namespace

json report_to_json(const AdversarialReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations) {
    violations.push_back(trial_to_json(v));
  }
  return {{"trials", report.trials},
          {"seed", report.seed},
          {"q_budget", report.q_budget},
          {"tolerance", report.tolerance},
          {"best_adversary_peak", report.best_adversary_peak},
          {"nsn_peak", report.nsn_peak},
          {"margin", report.margin},
          {"max_budget_used", report.max_budget_used},
          {"all_admissible", report.all_admissible},
          {"violations", std::move(violations)},
          {"passed", report.passed()}};
}

void write_trials_csv(std::ostream& os, const AdversarialReport& report) {
  os << "index,seed,family,pieces,budget_used,peak\n";
  for (const auto& t : report.results) {
    os << t.index << ',' << t.seed << ',' << to_string(t.family) << ','
       << t.pieces << ',' << format_double(t.budget_used) << ','
       << format_double(t.peak) << '\n';
  }
}

void write_comparison_csv(std::ostream& os, const Comparison& cmp) {
  os << "d,nsn_peak,morris_peak,nsn_budget,morris_budget\n";
  for (const auto& r : cmp.rows) {
    os << format_double(r.duration) << ',' << format_double(r.nsn_peak) << ','
       << format_double(r.morris_peak) << ',' << format_double(r.nsn_budget)
       << ',' << format_double(r.morris_budget) << '\n';
  }
}

json comparison_to_json(const Comparison& cmp) {
  json rows = json::array();
  for (const auto& r : cmp.rows) {
    rows.push_back({{"d", r.duration},
                    {"nsn_peak", r.nsn_peak},
                    {"morris_peak", r.morris_peak},
                    {"nsn_budget", r.nsn_budget},
                    {"morris_budget", r.morris_budget}});
  }
  return {{"rows", std::move(rows)},
          {"nsn_budget_lower", cmp.nsn_budget_lower},
          {"peaks_converge", cmp.peaks_converge},
          {"budget_gap_increasing", cmp.budget_gap_increasing}};
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  out.close();
  if (!out) {
    throw std::runtime_error("failed writing '" + path.string() + "'");
  }
}

} // namespace nsnpeak
