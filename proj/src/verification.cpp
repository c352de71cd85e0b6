#include <nsnpeak/verification.hpp>
#include <nsnpeak/nsn_policy.hpp>
#include <nsnpeak/parallel.hpp>
#include <nsnpeak/root_finding.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsnpeak {

double budget_line_integral(const Trajectory& traj,
                            const EpidemicParams& params) {
  params.validate();
  const double s_h = params.s_h();
  const double gamma = params.gamma;
  for (const Sample& smp : traj.samples) {
    if (!(smp.i > 0.0) || !(smp.s > 0.0)) {
      throw DomainError("line integral needs S > 0 and I > 0 on every sample");
    }
  }
  auto p = [&](const Sample& x) { return (1.0 - s_h / x.s) / (gamma * x.i); };
  auto q = [&](const Sample& x) { return 1.0 / (gamma * x.i); };

  double total = 0.0;
  for (std::size_t k = 1; k < traj.samples.size(); ++k) {
    const Sample& a = traj.samples[k - 1];
    const Sample& b = traj.samples[k];
    total += 0.5 * (p(a) + p(b)) * (b.s - a.s) + 0.5 * (q(a) + q(b)) * (b.i - a.i);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Random adversaries

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

int SplitMix64::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next() % span);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ (index * 0xd1b54a32d192ed03ULL));
  return mix.next();
}

std::string to_string(AdversaryFamily family) {
  switch (family) {
  case AdversaryFamily::Uniform:
    return "uniform";
  case AdversaryFamily::BangBang:
    return "bang_bang";
  case AdversaryFamily::Sparse:
    return "sparse";
  case AdversaryFamily::NsnLike:
    return "nsn_like";
  }
  return "unknown";
}

PiecewiseConstant rescale_to_budget(PiecewiseConstant control, double q) {
  std::vector<double> lengths(control.values.size());
  double min_positive = std::numeric_limits<double>::infinity();
  double support = 0.0;
  for (std::size_t k = 0; k < control.values.size(); ++k) {
    lengths[k] = control.breakpoints[k + 1] - control.breakpoints[k];
    if (control.values[k] > 0.0) {
      min_positive = std::min(min_positive, control.values[k]);
      support += lengths[k];
    }
  }
  if (!(q > 0.0) || support == 0.0) {
    std::fill(control.values.begin(), control.values.end(), 0.0);
    return control;
  }
  if (support <= q) {
    for (double& v : control.values) {
      v = v > 0.0 ? 1.0 : 0.0;
    }
    return control;
  }
  auto integral = [&](double scale) {
    double total = 0.0;
    for (std::size_t k = 0; k < lengths.size(); ++k) {
      total += lengths[k] * std::min(1.0, scale * control.values[k]);
    }
    return total;
  };
  const Bracket b = bisect_bracket(
      [&](double scale) { return integral(scale) - q; }, 0.0,
      1.0 / min_positive, 0.0);
  const double scale = b.f_lo <= 0.0 ? b.lo : 0.0;
  for (double& v : control.values) {
    v = std::min(1.0, scale * v);
  }
  return control;
}

PiecewiseConstant sample_adversary(AdversaryFamily family, SplitMix64& rng,
                                   double q, const EpidemicParams& params,
                                   const InitialCondition& init,
                                   const AdversaryContext& ctx) {
  const int pieces = rng.uniform_int(1, 20);
  PiecewiseConstant control;

  if (family == AdversaryFamily::NsnLike) {
    // Piecewise approximation of an NSN arc at a level at or above the optimum.
    const double level = std::min(
        ctx.i_h, ctx.nsn_level + rng.uniform(0.0, 0.2) * (ctx.i_h - ctx.nsn_level));
    const double s_bar = s_at_level(level, params, init);
    const double arc = std::max(intervention_duration(level, s_bar, params), 1.0);
    const double onset = time_to_level(params, init, level) *
                         (1.0 + rng.uniform(-0.05, 0.05));
    control.breakpoints.push_back(std::max(0.0, onset));
    for (int k = 1; k <= pieces; ++k) {
      const double a = control.breakpoints.back();
      const double b = std::max(onset, 0.0) + arc * k / pieces *
                                                   rng.uniform(0.9, 1.1);
      control.breakpoints.push_back(std::max(b, a + 1e-3));
      const double mid = 0.5 * (a + control.breakpoints.back()) - onset;
      const double s_mid = std::max(ctx.s_h, s_bar - ctx.gamma * level * mid);
      control.values.push_back(singular_control(s_mid, ctx.s_h));
    }
    return rescale_to_budget(std::move(control), q);
  }

  const double start = rng.uniform(0.0, ctx.horizon);
  const double length = rng.uniform(0.05, 1.5) * ctx.horizon;
  std::vector<double> cuts(static_cast<std::size_t>(pieces - 1));
  for (double& c : cuts) {
    c = start + rng.uniform() * length;
  }
  std::sort(cuts.begin(), cuts.end());
  control.breakpoints.push_back(start);
  for (double c : cuts) {
    if (c > control.breakpoints.back()) {
      control.breakpoints.push_back(c);
    }
  }
  control.breakpoints.push_back(start + length);
  const std::size_t n = control.breakpoints.size() - 1;
  control.values.resize(n);

  switch (family) {
  case AdversaryFamily::BangBang: {
    bool any = false;
    for (double& v : control.values) {
      v = rng.uniform() < 0.5 ? 1.0 : 0.0;
      any = any || v > 0.0;
    }
    if (!any) {
      control.values[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1))] = 1.0;
    }
    break;
  }
  case AdversaryFamily::Sparse: {
    bool any = false;
    for (double& v : control.values) {
      v = rng.uniform() < 0.3 ? 1.0 - rng.uniform() : 0.0;
      any = any || v > 0.0;
    }
    if (!any) {
      control.values[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1))] =
          1.0 - rng.uniform();
    }
    break;
  }
  default:
    for (double& v : control.values) {
      v = rng.uniform();
    }
    break;
  }
  return rescale_to_budget(std::move(control), q);
}

AdversarialReport adversarial_search(const EpidemicParams& params,
                                     const InitialCondition& init, double q,
                                     std::size_t trials, std::uint64_t seed,
                                     const AdversarialOptions& options) {
  if (trials == 0) {
    throw DomainError("adversarial search needs at least one trial");
  }
  const DerivedThresholds th = derive_thresholds(params, init);
  const NsnSolution nsn = optimal_level_closed_form(q, params, init);

  AdversaryContext ctx;
  ctx.horizon = th.nontrivial ? time_to_level(params, init, th.i_h,
                                              options.integrator)
                              : 1.0;
  ctx.nsn_level = nsn.level;
  ctx.i_h = th.i_h;
  ctx.s_h = th.s_h;
  ctx.gamma = params.gamma;

  AdversarialReport report;
  report.trials = trials;
  report.seed = seed;
  report.q_budget = q;
  report.tolerance = options.tolerance;
  report.nsn_peak = nsn.level;
  report.results.resize(trials);

  std::vector<char> admissible(trials, 1);
  const double budget_tol = 1e-9 * std::max(1.0, q);
  parallel_for(trials, options.threads, [&](std::size_t k) {
    AdversaryTrial& trial = report.results[k];
    trial.index = k;
    trial.seed = trial_seed(seed, k);
    trial.family = static_cast<AdversaryFamily>(k % 4);
    SplitMix64 rng(trial.seed);
    const PiecewiseConstant control =
        th.nontrivial ? sample_adversary(trial.family, rng, q, params, init, ctx)
                      : PiecewiseConstant{{0.0, 1.0}, {0.0}};
    trial.pieces = static_cast<int>(control.values.size());
    const Trajectory traj = simulate(params, init, q, control, options.integrator);
    trial.budget_used = traj.budget_spent;
    trial.peak = traj.peak_i;
    admissible[k] = traj.admissible(budget_tol) ? 1 : 0;
  });

  report.best_adversary_peak = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trials; ++k) {
    const AdversaryTrial& trial = report.results[k];
    report.best_adversary_peak = std::min(report.best_adversary_peak, trial.peak);
    report.max_budget_used = std::max(report.max_budget_used, trial.budget_used);
    report.all_admissible = report.all_admissible && admissible[k] != 0;
    if (trial.peak < report.nsn_peak - report.tolerance) {
      report.violations.push_back(trial);
    }
  }
  report.margin = report.best_adversary_peak - report.nsn_peak;
  return report;
}

// ---------------------------------------------------------------------------
// Four-phase comparison strategy

double morris_hold_duration(double level, double duration,
                            const EpidemicParams& params,
                            const InitialCondition& init) {
  const double s_h = params.s_h();
  const double gamma = params.gamma;
  const double s_bar = s_at_level(level, params, init);
  if (s_bar <= s_h) {
    return duration;
  }
  // While holding, S falls at rate gamma * level; during the full break I
  // decays at rate gamma. The post-intervention peak
  //   level e^{-gamma (D - hold)} + S_e - s_h - s_h ln(S_e / s_h)
  // is convex in the hold time, so its minimizer is the root of the slope.
  const double hold_max = std::min(duration, (s_bar - s_h) / (gamma * level));
  auto slope = [&](double hold) {
    const double s_end = std::max(s_h, s_bar - gamma * level * hold);
    return std::exp(-gamma * (duration - hold)) - (1.0 - s_h / s_end);
  };
  if (slope(0.0) >= 0.0) {
    return 0.0;
  }
  if (slope(hold_max) <= 0.0) {
    return hold_max;
  }
  return bisect(slope, 0.0, hold_max, 0.0);
}

namespace {

struct MorrisRun {
  MorrisFourPhase policy;
  Trajectory trajectory;
  double second_peak{0.0};
};

MorrisRun run_morris(double level, double duration,
                     const EpidemicParams& params, const InitialCondition& init,
                     const IntegratorConfig& cfg) {
  MorrisRun run;
  run.policy.level = level;
  run.policy.duration = duration;
  run.policy.hold_duration = morris_hold_duration(level, duration, params, init);
  // After the break the state can sit at S just below s_h with I decaying
  // at a vanishing rate; the peak is already known by then.
  IntegratorConfig run_cfg = cfg;
  run_cfg.stop_when_declining = true;
  run.trajectory = simulate(params, init, duration, run.policy, run_cfg);
  const auto end = run.trajectory.first_event(EventKind::InterventionEnd);
  const double t_end = end ? end->state.t : run.trajectory.samples.back().t;
  for (const Sample& smp : run.trajectory.samples) {
    if (smp.t >= t_end) {
      run.second_peak = std::max(run.second_peak, smp.i);
    }
  }
  return run;
}

} // namespace

MorrisResult morris_strategy(const EpidemicParams& params,
                             const InitialCondition& init, double duration,
                             const IntegratorConfig& cfg) {
  if (!(duration > 0.0) || std::isinf(duration)) {
    throw DomainError("morris duration must be finite and > 0");
  }
  const DerivedThresholds th = derive_thresholds(params, init);

  double level = init.i0;
  bool degenerate = false;
  if (th.nontrivial) {
    constexpr double kLevelTol = 1e-5;
    auto excess = [&](double lvl) {
      return run_morris(lvl, duration, params, init, cfg).second_peak - lvl;
    };
    if (excess(init.i0) > 0.0) {
      if (excess(th.i_h) >= 0.0) {
        level = th.i_h;
      } else {
        // Keep the side where the second peak does not exceed the held level.
        level = bisect_bracket(excess, init.i0, th.i_h, kLevelTol).hi;
      }
    }
    degenerate = level >= th.i_h - kLevelTol;
  } else {
    degenerate = true;
  }

  MorrisRun run = run_morris(level, duration, params, init, cfg);
  MorrisResult out;
  out.policy = run.policy;
  out.peak = run.trajectory.peak_i;
  out.second_peak = run.second_peak;
  out.budget_spent = run.trajectory.budget_spent;
  out.trajectory = std::move(run.trajectory);
  out.degenerate = degenerate;
  return out;
}

double budget_for_duration(double duration, const EpidemicParams& params,
                           const InitialCondition& init) {
  if (!(duration >= 0.0)) {
    throw DomainError("duration must be >= 0");
  }
  const double q_hi = q_max(params, init);
  auto arc = [&](double q) {
    return optimal_level_closed_form(q, params, init).duration;
  };
  if (duration == 0.0 || q_hi == 0.0) {
    return 0.0;
  }
  if (arc(q_hi) <= duration) {
    return q_hi;
  }
  return bisect([&](double q) { return arc(q) - duration; }, 0.0, q_hi, 0.0);
}

Comparison compare_strategies(const EpidemicParams& params,
                              const InitialCondition& init,
                              std::span<const double> durations,
                              const IntegratorConfig& cfg, unsigned threads) {
  for (std::size_t k = 0; k < durations.size(); ++k) {
    if (!(durations[k] > 0.0) || (k > 0 && !(durations[k] > durations[k - 1]))) {
      throw DomainError("durations must be positive and increasing");
    }
  }
  Comparison cmp;
  cmp.rows.resize(durations.size());
  parallel_for(durations.size(), threads, [&](std::size_t k) {
    const double d = durations[k];
    const double q = budget_for_duration(d, params, init);
    const NsnSolution nsn = optimal_level_closed_form(q, params, init);
    const MorrisResult morris = morris_strategy(params, init, d, cfg);
    cmp.rows[k] = {d, nsn.level, morris.peak, nsn.budget, morris.budget_spent};
  });

  for (std::size_t k = 0; k < cmp.rows.size(); ++k) {
    const ComparisonRow& r = cmp.rows[k];
    cmp.nsn_budget_lower = cmp.nsn_budget_lower && r.nsn_budget <= r.morris_budget;
    if (k > 0) {
      const ComparisonRow& p = cmp.rows[k - 1];
      cmp.budget_gap_increasing =
          cmp.budget_gap_increasing &&
          r.morris_budget - r.nsn_budget >= p.morris_budget - p.nsn_budget;
    }
  }
  if (cmp.rows.size() >= 2) {
    const auto gap = [](const ComparisonRow& r) {
      return std::fabs(r.morris_peak - r.nsn_peak);
    };
    cmp.peaks_converge = gap(cmp.rows.back()) <= gap(cmp.rows.front());
  }
  return cmp;
}

} // namespace nsnpeak
