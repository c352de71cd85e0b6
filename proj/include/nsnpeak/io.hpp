#pragma once

#include <nsnpeak/integrator.hpp>
#include <nsnpeak/nsn_policy.hpp>
#include <nsnpeak/verification.hpp>

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace nsnpeak {

/// Shortest decimal representation that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Columns t,S,I,C,u.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
[[nodiscard]] nlohmann::json trajectory_to_json(const Trajectory& traj);
/// Inverse of trajectory_to_json; bit-exact on every double.
[[nodiscard]] Trajectory trajectory_from_json(const nlohmann::json& j);

/// Columns Q,t_i,d,I_bar,u_max.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);
[[nodiscard]] nlohmann::json sweep_to_json(std::span<const SweepRow> rows);

[[nodiscard]] nlohmann::json report_to_json(const AdversarialReport& report);
/// One row per trial: index,seed,family,pieces,budget_used,peak.
void write_trials_csv(std::ostream& os, const AdversarialReport& report);

/// Columns d,nsn_peak,morris_peak,nsn_budget,morris_budget.
void write_comparison_csv(std::ostream& os, const Comparison& cmp);
[[nodiscard]] nlohmann::json comparison_to_json(const Comparison& cmp);

/// Writes `content` to `path`; throws std::runtime_error naming the path on failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace nsnpeak
