#pragma once

#include <nsnpeak/errors.hpp>

namespace nsnpeak {

/// Slack used when validating proportions at the boundary of the simplex.
inline constexpr double kProportionSlack = 1e-12;

/// Transmission and recovery rates of the disease, per unit time.
struct EpidemicParams {
  double beta{0.21};
  double gamma{0.07};

  /// Throws ValidationError unless both rates are finite and positive.
  void validate() const;

  [[nodiscard]] double r0() const { return beta / gamma; }
  /// Immunity threshold gamma/beta.
  [[nodiscard]] double s_h() const { return gamma / beta; }

  bool operator==(const EpidemicParams&) const = default;
};

struct InitialCondition {
  double s0{1.0 - 1e-6};
  double i0{1e-6};

  /// Throws ValidationError unless s0 > 0, i0 > 0 and s0 + i0 <= 1.
  void validate() const;

  bool operator==(const InitialCondition&) const = default;
};

/// Point of the extended system (S, I, C) at time t. C is the remaining budget.
struct EpidemicState {
  double t{0.0};
  double s{0.0};
  double i{0.0};
  double c{0.0};

  /// Recovered proportion; not integrated, derived from the closed population.
  [[nodiscard]] double r() const { return 1.0 - s - i; }

  bool operator==(const EpidemicState&) const = default;
};

struct DerivedThresholds {
  double r0{0.0};
  double s_h{0.0};
  /// Peak of I under u = 0. Equals i0 in the trivial case s0 <= s_h.
  double i_h{0.0};
  bool outbreak_possible{false}; // r0 > 1
  bool nontrivial{false};        // s0 > s_h
};

/// Time derivative of (S, I, C).
struct StateRate {
  double ds{0.0};
  double di{0.0};
  double dc{0.0};
};

[[nodiscard]] DerivedThresholds derive_thresholds(const EpidemicParams& params,
                                                  const InitialCondition& init);

/// Right-hand side of the controlled system. Throws DomainError if u is not in [0, 1].
[[nodiscard]] StateRate vector_field(const EpidemicState& state, double u,
                                     const EpidemicParams& params);

/// S + I - s_h ln S, constant along trajectories with u = 0.
[[nodiscard]] double conserved_quantity(double s, double i,
                                        const EpidemicParams& params);

} // namespace nsnpeak
