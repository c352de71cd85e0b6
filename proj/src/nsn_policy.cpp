#include <nsnpeak/nsn_policy.hpp>
#include <nsnpeak/parallel.hpp>
#include <nsnpeak/root_finding.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace nsnpeak {

namespace {

constexpr double kLevelSlack = 1e-12;

void require_level(double level, const InitialCondition& init,
                   const DerivedThresholds& th) {
  if (!(level >= init.i0 - kLevelSlack && level <= th.i_h + kLevelSlack)) {
    throw DomainError("level " + std::to_string(level) +
                      " outside [i0, i_h]");
  }
}

// Smallest level the i0 -> 0 limit can reach with Q = 0.
double limiting_peak(double s_h) { return 1.0 - s_h + s_h * std::log(s_h); }

} // namespace

double singular_control(double s, double s_h) {
  return std::clamp(1.0 - s_h / s, 0.0, 1.0);
}

double nsn_feedback(double s, double i, double level,
                    const DerivedThresholds& th) {
  const bool on_arc = i >= level * (1.0 - 1e-12);
  if (!on_arc || !(s > th.s_h)) {
    return 0.0;
  }
  return singular_control(s, th.s_h);
}

double budget_of_level(double level, const EpidemicParams& params,
                       const InitialCondition& init) {
  const DerivedThresholds th = derive_thresholds(params, init);
  require_level(level, init, th);
  if (!th.nontrivial) {
    return 0.0;
  }
  return (th.i_h - level) / (params.beta * th.s_h * level);
}

double q_max(const EpidemicParams& params, const InitialCondition& init) {
  const DerivedThresholds th = derive_thresholds(params, init);
  if (!th.nontrivial) {
    return 0.0;
  }
  return (th.i_h - init.i0) / (params.beta * th.s_h * init.i0);
}

double s_at_level(double level, const EpidemicParams& params,
                  const InitialCondition& init) {
  const DerivedThresholds th = derive_thresholds(params, init);
  require_level(level, init, th);
  if (!th.nontrivial) {
    return init.s0;
  }
  const double s_h = th.s_h;
  const double log_s0 = std::log(init.s0);
  // Written relative to s0 so that phi(s0) = level - i0 without round-off.
  auto phi = [&](double s) {
    return (s - init.s0) - s_h * (std::log(s) - log_s0) + (level - init.i0);
  };
  if (phi(s_h) >= 0.0) {
    return s_h;
  }
  if (phi(init.s0) <= 0.0) {
    return init.s0;
  }
  return bisect(phi, s_h, init.s0, 0.0);
}

double intervention_duration(double level, double s_bar,
                             const EpidemicParams& params) {
  return (s_bar - params.s_h()) / (params.gamma * level);
}

NsnSolution optimal_level_closed_form(double q, const EpidemicParams& params,
                                      const InitialCondition& init) {
  if (!(q >= 0.0) || std::isinf(q)) {
    throw DomainError("budget Q must be finite and >= 0");
  }
  const DerivedThresholds th = derive_thresholds(params, init);

  NsnSolution sol;
  if (!th.nontrivial || !th.outbreak_possible) {
    sol.level = init.i0;
    sol.s_bar = init.s0;
    sol.regime = BudgetRegime::BudgetSlack;
    sol.trivial = true;
    return sol;
  }

  if (q < q_max(params, init)) {
    sol.level = std::max(init.i0, th.i_h / (q * params.beta * th.s_h + 1.0));
    sol.regime = BudgetRegime::BudgetLimited;
  } else {
    sol.level = init.i0;
    sol.regime = BudgetRegime::BudgetSlack;
  }
  sol.s_bar = s_at_level(sol.level, params, init);
  sol.u_max = 1.0 - th.s_h / sol.s_bar;
  sol.duration = intervention_duration(sol.level, sol.s_bar, params);
  sol.budget = budget_of_level(sol.level, params, init);
  return sol;
}

NsnSolution optimal_level(double q, const EpidemicParams& params,
                          const InitialCondition& init,
                          const IntegratorConfig& cfg) {
  NsnSolution sol = optimal_level_closed_form(q, params, init);
  if (!sol.trivial) {
    sol.t_i = time_to_level(params, init, sol.level, cfg);
  }
  return sol;
}

LimitingLevel limiting_level(double q, const EpidemicParams& params) {
  params.validate();
  if (!(q >= 0.0) || std::isinf(q)) {
    throw DomainError("budget Q must be finite and >= 0");
  }
  if (!(params.r0() > 1.0)) {
    throw DomainError("limiting level requires R0 > 1");
  }
  const double s_h = params.s_h();
  LimitingLevel out;
  out.level = limiting_peak(s_h) / (q * params.beta * s_h + 1.0);
  // S + level - s_h ln S = 1, written relative to S = 1.
  auto phi = [&](double s) { return (s - 1.0) - s_h * std::log(s) + out.level; };
  out.s_bar = phi(s_h) >= 0.0 ? s_h : bisect(phi, s_h, 1.0, 0.0);
  out.duration = intervention_duration(out.level, out.s_bar, params);
  return out;
}

double budget_for_peak(double level, const EpidemicParams& params) {
  params.validate();
  const double s_h = params.s_h();
  if (!(level > 0.0) || level > 1.0 - s_h) {
    throw DomainError("budget_for_peak needs 0 < level <= 1 - s_h");
  }
  return ((1.0 - s_h) / level - 1.0) / (params.beta * s_h);
}

double budget_for_limiting_level(double level, const EpidemicParams& params) {
  params.validate();
  const double s_h = params.s_h();
  const double peak = limiting_peak(s_h);
  if (!(level > 0.0) || level > peak) {
    throw DomainError(
        "budget_for_limiting_level needs 0 < level <= 1 - s_h + s_h ln s_h");
  }
  return (peak / level - 1.0) / (params.beta * s_h);
}

std::vector<SweepRow> sweep_over_budget(const EpidemicParams& params,
                                        const InitialCondition& init,
                                        std::span<const double> q_grid,
                                        const IntegratorConfig& cfg,
                                        unsigned threads) {
  if (q_grid.empty()) {
    throw DomainError("sweep grid is empty");
  }
  for (std::size_t k = 0; k < q_grid.size(); ++k) {
    if (!(q_grid[k] >= 0.0) || (k > 0 && !(q_grid[k] > q_grid[k - 1]))) {
      throw DomainError("sweep grid must be non-negative and increasing");
    }
  }
  std::vector<SweepRow> rows(q_grid.size());
  parallel_for(q_grid.size(), threads, [&](std::size_t k) {
    const NsnSolution sol = optimal_level(q_grid[k], params, init, cfg);
    rows[k] = {q_grid[k], sol.t_i, sol.duration, sol.level, sol.u_max};
  });
  return rows;
}

} // namespace nsnpeak
