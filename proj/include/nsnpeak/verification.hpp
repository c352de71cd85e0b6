#pragma once

#include <nsnpeak/core_model.hpp>
#include <nsnpeak/integrator.hpp>
#include <nsnpeak/policy.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nsnpeak {

/// Line integral of (1 - s_h/S)/(gamma I) dS + 1/(gamma I) dI along the sampled
/// path, trapezoidal per sample interval. Along any solution of the controlled
/// system this equals C(end) - C(0). Throws DomainError on a sample with I <= 0.
[[nodiscard]] double budget_line_integral(const Trajectory& traj,
                                          const EpidemicParams& params);

/// Deterministic 64-bit generator (SplitMix64) with portable uniform draws.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

private:
  std::uint64_t state_;
};

/// Seed for trial `index` of a search started with `seed`.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index);

enum class AdversaryFamily { Uniform, BangBang, Sparse, NsnLike };

[[nodiscard]] std::string to_string(AdversaryFamily family);

/// Scales u multiplicatively (clipped at 1) so that its integral is as close
/// to q as possible without exceeding it.
[[nodiscard]] PiecewiseConstant rescale_to_budget(PiecewiseConstant control,
                                                  double q);

struct AdversaryContext {
  double horizon{0.0};     // time for the uncontrolled trajectory to reach s_h
  double nsn_level{0.0};   // optimal level for the budget
  double i_h{0.0};
  double s_h{0.0};
  double gamma{0.0};
};

/// Random piecewise-constant control with 1-20 pieces, rescaled to budget q.
[[nodiscard]] PiecewiseConstant sample_adversary(AdversaryFamily family,
                                                 SplitMix64& rng, double q,
                                                 const EpidemicParams& params,
                                                 const InitialCondition& init,
                                                 const AdversaryContext& ctx);

struct AdversaryTrial {
  std::size_t index{0};
  std::uint64_t seed{0};
  AdversaryFamily family{AdversaryFamily::Uniform};
  int pieces{0};
  double budget_used{0.0};
  double peak{0.0};
  bool operator==(const AdversaryTrial&) const = default;
};

struct AdversarialReport {
  std::size_t trials{0};
  std::uint64_t seed{0};
  double q_budget{0.0};
  double tolerance{1e-4};
  double best_adversary_peak{0.0};
  double nsn_peak{0.0};
  double margin{0.0};
  double max_budget_used{0.0};
  bool all_admissible{true};
  std::vector<AdversaryTrial> violations;
  std::vector<AdversaryTrial> results;

  [[nodiscard]] bool passed() const { return violations.empty() && all_admissible; }
};

struct AdversarialOptions {
  double tolerance{1e-4};
  unsigned threads{0};
  IntegratorConfig integrator{};
};

/// Simulates `trials` random admissible controls with budget q and compares
/// their peaks with the optimal NSN level. Deterministic given `seed`,
/// whatever the thread count.
[[nodiscard]] AdversarialReport
adversarial_search(const EpidemicParams& params, const InitialCondition& init,
                   double q, std::size_t trials, std::uint64_t seed,
                   const AdversarialOptions& options = {});

struct MorrisResult {
  MorrisFourPhase policy;
  Trajectory trajectory;
  double peak{0.0};
  double second_peak{0.0};
  double budget_spent{0.0};
  /// No level below i_h balances the second peak.
  bool degenerate{false};
};

/// Hold time minimizing the post-intervention peak for a four-phase policy
/// starting on the uncontrolled trajectory at I = level with total duration D.
[[nodiscard]] double morris_hold_duration(double level, double duration,
                                          const EpidemicParams& params,
                                          const InitialCondition& init);

/// Four-phase comparison strategy of total duration D (hold + full break)
/// whose held level equals the peak that follows the intervention.
[[nodiscard]] MorrisResult morris_strategy(const EpidemicParams& params,
                                           const InitialCondition& init,
                                           double duration,
                                           const IntegratorConfig& cfg = {});

/// Budget whose optimal NSN arc lasts `duration` (inverse of Q -> d).
[[nodiscard]] double budget_for_duration(double duration,
                                         const EpidemicParams& params,
                                         const InitialCondition& init);

struct ComparisonRow {
  double duration{0.0};
  double nsn_peak{0.0};
  double morris_peak{0.0};
  double nsn_budget{0.0};
  double morris_budget{0.0};
  bool operator==(const ComparisonRow&) const = default;
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  bool nsn_budget_lower{true};   // nsn_budget <= morris_budget on every row
  bool peaks_converge{true};     // peak gap at the longest duration <= at the shortest
  bool budget_gap_increasing{true};
};

[[nodiscard]] Comparison compare_strategies(const EpidemicParams& params,
                                            const InitialCondition& init,
                                            std::span<const double> durations,
                                            const IntegratorConfig& cfg = {},
                                            unsigned threads = 0);

} // namespace nsnpeak
