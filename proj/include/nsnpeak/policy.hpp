#pragma once

#include <string>
#include <variant>
#include <vector>

namespace nsnpeak {

/// u = 0 at all times.
struct ZeroControl {
  bool operator==(const ZeroControl&) const = default;
};

/// Null-singular-null feedback: no control until I reaches `level`, then
/// u = 1 - s_h / S (which holds I at `level`) until S reaches s_h, then no control.
struct NsnFeedback {
  double level{0.0};
  bool operator==(const NsnFeedback&) const = default;
};

enum class MorrisStart { LevelCrossing, FixedTime };

/// Four phases: no control, hold I at `level` for `hold_duration`, full
/// break (u = 1) for the remainder of `duration`, no control afterwards.
struct MorrisFourPhase {
  double level{0.0};
  double duration{0.0};
  double hold_duration{0.0};
  MorrisStart start{MorrisStart::LevelCrossing};
  double start_time{0.0}; // only read for MorrisStart::FixedTime
  bool operator==(const MorrisFourPhase&) const = default;
};

struct ConstantControl {
  double u{0.0};
  bool operator==(const ConstantControl&) const = default;
};

/// u = values[k] on [breakpoints[k], breakpoints[k+1]), 0 before the first
/// and after the last breakpoint. Requires values.size() + 1 == breakpoints.size().
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> values;
  bool operator==(const PiecewiseConstant&) const = default;

  /// Integral of u over the whole line.
  [[nodiscard]] double integral() const;
};

using Policy = std::variant<ZeroControl, NsnFeedback, MorrisFourPhase,
                            ConstantControl, PiecewiseConstant>;

[[nodiscard]] std::string policy_name(const Policy& policy);

} // namespace nsnpeak
