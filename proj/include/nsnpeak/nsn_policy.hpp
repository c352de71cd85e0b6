#pragma once

#include <nsnpeak/core_model.hpp>
#include <nsnpeak/integrator.hpp>

#include <span>
#include <vector>

namespace nsnpeak {

enum class BudgetRegime { BudgetLimited, BudgetSlack };

/// Characteristics of the NSN strategy at a given level.
struct NsnSolution {
  double level{0.0};     // maintained prevalence, also the peak
  double s_bar{0.0};     // S where the singular arc starts
  double u_max{0.0};     // 1 - s_h / s_bar
  double t_i{0.0};       // intervention start
  double duration{0.0};  // length of the singular arc
  double budget{0.0};    // L1 norm of the control
  BudgetRegime regime{BudgetRegime::BudgetLimited};
  /// s0 <= s_h or R0 <= 1: the peak is i0 whatever the control.
  bool trivial{false};
};

/// Control on the singular arc, 1 - s_h / s clamped to [0, 1].
[[nodiscard]] double singular_control(double s, double s_h);

/// Stateless NSN feedback: 1 - s_h/s on the arc (i >= level, s > s_h), 0 otherwise.
[[nodiscard]] double nsn_feedback(double s, double i, double level,
                                  const DerivedThresholds& th);

/// Budget of the NSN strategy at `level`: (i_h - level) / (beta s_h level).
[[nodiscard]] double budget_of_level(double level, const EpidemicParams& params,
                                     const InitialCondition& init);

/// Q beyond which the peak can be held at i0 from the start.
[[nodiscard]] double q_max(const EpidemicParams& params,
                           const InitialCondition& init);

/// Optimal NSN level for budget Q, with s_bar, u_max, t_i and duration filled.
[[nodiscard]] NsnSolution optimal_level(double q, const EpidemicParams& params,
                                        const InitialCondition& init,
                                        const IntegratorConfig& cfg = {});

/// Same as optimal_level without the simulation that gives t_i (left at 0).
[[nodiscard]] NsnSolution optimal_level_closed_form(double q,
                                                    const EpidemicParams& params,
                                                    const InitialCondition& init);

/// Value of S on the uncontrolled trajectory when I reaches `level`: the
/// root in [s_h, s0] of S - s_h ln S = s0 + i0 - s_h ln s0 - level.
[[nodiscard]] double s_at_level(double level, const EpidemicParams& params,
                                const InitialCondition& init);

/// Length of the singular arc, (s_bar - s_h) / (gamma level).
[[nodiscard]] double intervention_duration(double level, double s_bar,
                                           const EpidemicParams& params);

struct LimitingLevel {
  double level{0.0};
  double s_bar{0.0};
  double duration{0.0};
};

/// Optimal level in the limit i0 -> 0 with s0 + i0 = 1, and the matching
/// S value and arc duration.
[[nodiscard]] LimitingLevel limiting_level(double q, const EpidemicParams& params);

/// Q = ((1 - s_h)/level - 1) / (beta s_h). Defined for 0 < level <= 1 - s_h.
/// This is not the inverse of limiting_level, whose numerator is
/// 1 - s_h + s_h ln s_h; see budget_for_limiting_level for that.
[[nodiscard]] double budget_for_peak(double level, const EpidemicParams& params);

/// Exact inverse of limiting_level.
[[nodiscard]] double budget_for_limiting_level(double level,
                                               const EpidemicParams& params);

struct SweepRow {
  double q{0.0};
  double t_i{0.0};
  double duration{0.0};
  double level{0.0};
  double u_max{0.0};
  bool operator==(const SweepRow&) const = default;
};

/// NSN characteristics for every budget of a non-empty, non-negative,
/// increasing grid. Rows are computed independently; `threads` = 0 picks the
/// hardware concurrency.
[[nodiscard]] std::vector<SweepRow>
sweep_over_budget(const EpidemicParams& params, const InitialCondition& init,
                  std::span<const double> q_grid,
                  const IntegratorConfig& cfg = {}, unsigned threads = 0);

} // namespace nsnpeak
