#pragma once

#include <nsnpeak/core_model.hpp>
#include <nsnpeak/policy.hpp>

#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace nsnpeak {

struct IntegratorConfig {
  double step{1e-2};
  double event_tol{1e-9};
  double i_extinction{1e-9};
  double t_max{1e5};
  /// Optional fixed window: integration stops normally at this time.
  std::optional<double> t_stop{};
  /// Also stop once S <= s_h and the policy is off for good: from there on
  /// I only decreases, so the peak and the budget are final.
  bool stop_when_declining{false};

  void validate() const;
};

/// One output row. `u` is the control applied from this sample onwards
/// (right-continuous at switches).
struct Sample {
  double t{0.0};
  double s{0.0};
  double i{0.0};
  double c{0.0};
  double u{0.0};
  bool operator==(const Sample&) const = default;
};

enum class EventKind {
  InterventionStart,
  InterventionEnd,
  PeakReached,
  ReachedSh,
  Extinction
};

[[nodiscard]] std::string_view to_string(EventKind kind);
[[nodiscard]] EventKind event_kind_from_string(std::string_view name);

struct Event {
  EventKind kind{EventKind::PeakReached};
  EpidemicState state{};
  bool operator==(const Event&) const = default;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Event> events; // ordered by time
  double peak_i{0.0};
  double budget_spent{0.0};

  bool operator==(const Trajectory&) const = default;

  [[nodiscard]] std::optional<Event> first_event(EventKind kind) const;
  /// Time of the first sample attaining peak_i.
  [[nodiscard]] double peak_time() const;
  [[nodiscard]] double max_control() const;
  [[nodiscard]] double min_budget() const;
  /// C(t) >= -tol at every sample.
  [[nodiscard]] bool admissible(double tol = 1e-9) const;
  /// Number of control discontinuities: consecutive samples whose u differ by
  /// more than `jump`.
  [[nodiscard]] int control_switches(double jump = 1e-2) const;
  /// Trapezoidal quadrature of u(t). Intervals ending on a jump larger than
  /// `jump` use the left value, since u is right-continuous.
  [[nodiscard]] double control_integral(double jump = 1e-3) const;
};

/// Integration stopped at t_max before extinction. Carries what was computed.
class HorizonError : public std::runtime_error {
public:
  HorizonError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  [[nodiscard]] const Trajectory& partial() const { return partial_; }

private:
  Trajectory partial_;
};

/// Integrates (S, I, C) from (s0, i0, q0) under `policy` with a fixed-step
/// RK4 scheme. Level crossings (policy switches, S = s_h, local maxima of I)
/// are localized by bisection to cfg.event_tol and become samples.
/// Stops once I < i_extinction with S <= s_h, or at cfg.t_stop.
[[nodiscard]] Trajectory simulate(const EpidemicParams& params,
                                  const InitialCondition& init, double q0,
                                  const Policy& policy,
                                  const IntegratorConfig& cfg = {});

/// First time the uncontrolled trajectory reaches I = level.
/// Throws DomainError if level is outside [i0, i_h].
[[nodiscard]] double time_to_level(const EpidemicParams& params,
                                   const InitialCondition& init, double level,
                                   const IntegratorConfig& cfg = {});

} // namespace nsnpeak
