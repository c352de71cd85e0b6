#include <nsnpeak/integrator.hpp>
#include <nsnpeak/nsn_policy.hpp>
#include <nsnpeak/root_finding.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

namespace nsnpeak {

// ---------------------------------------------------------------------------
// Policy helpers

double PiecewiseConstant::integral() const {
  double total = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    total += values[k] * (breakpoints[k + 1] - breakpoints[k]);
  }
  return total;
}

std::string policy_name(const Policy& policy) {
  struct Visitor {
    std::string operator()(const ZeroControl&) const { return "zero"; }
    std::string operator()(const NsnFeedback&) const { return "nsn"; }
    std::string operator()(const MorrisFourPhase&) const { return "morris"; }
    std::string operator()(const ConstantControl&) const { return "constant"; }
    std::string operator()(const PiecewiseConstant&) const {
      return "piecewise";
    }
  };
  return std::visit(Visitor{}, policy);
}

// ---------------------------------------------------------------------------
// Config, events, trajectory

void IntegratorConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(step) || !positive(event_tol) || !positive(i_extinction) ||
      !positive(t_max)) {
    throw ValidationError(
        "integrator step, event_tol, i_extinction and t_max must be > 0");
  }
  if (event_tol >= step) {
    throw ValidationError("integrator event_tol must be smaller than step");
  }
  if (t_stop && !(*t_stop > 0.0)) {
    throw ValidationError("integrator t_stop must be > 0");
  }
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
  case EventKind::InterventionStart:
    return "InterventionStart";
  case EventKind::InterventionEnd:
    return "InterventionEnd";
  case EventKind::PeakReached:
    return "PeakReached";
  case EventKind::ReachedSh:
    return "ReachedSh";
  case EventKind::Extinction:
    return "Extinction";
  }
  return "Unknown";
}

EventKind event_kind_from_string(std::string_view name) {
  for (auto kind : {EventKind::InterventionStart, EventKind::InterventionEnd,
                    EventKind::PeakReached, EventKind::ReachedSh,
                    EventKind::Extinction}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw ValidationError("unknown event kind '" + std::string(name) + "'");
}

std::optional<Event> Trajectory::first_event(EventKind kind) const {
  auto it = std::find_if(events.begin(), events.end(),
                         [kind](const Event& e) { return e.kind == kind; });
  if (it == events.end()) {
    return std::nullopt;
  }
  return *it;
}

double Trajectory::peak_time() const {
  for (const auto& smp : samples) {
    if (smp.i == peak_i) {
      return smp.t;
    }
  }
  return samples.empty() ? 0.0 : samples.front().t;
}

double Trajectory::max_control() const {
  double u = 0.0;
  for (const auto& smp : samples) {
    u = std::max(u, smp.u);
  }
  return u;
}

double Trajectory::min_budget() const {
  double c = std::numeric_limits<double>::infinity();
  for (const auto& smp : samples) {
    c = std::min(c, smp.c);
  }
  return c;
}

bool Trajectory::admissible(double tol) const { return min_budget() >= -tol; }

int Trajectory::control_switches(double jump) const {
  int n = 0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (std::fabs(samples[k].u - samples[k - 1].u) > jump) {
      ++n;
    }
  }
  return n;
}

double Trajectory::control_integral(double jump) const {
  double total = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const Sample& a = samples[k - 1];
    const Sample& b = samples[k];
    const double dt = b.t - a.t;
    if (std::fabs(b.u - a.u) > jump) {
      total += a.u * dt;
    } else {
      total += 0.5 * (a.u + b.u) * dt;
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Integration engine

namespace {

using Vec = std::array<double, 3>; // S, I, C

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLevelSlack = 1e-12;

EpidemicState as_state(double t, const Vec& y) { return {t, y[0], y[1], y[2]}; }

void check_control(double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("policy requested control " + std::to_string(u) +
                      " outside [0, 1]");
  }
}

void validate_level(double level, const DerivedThresholds& th,
                    const InitialCondition& init) {
  if (!(level >= init.i0 - kLevelSlack && level <= th.i_h + kLevelSlack)) {
    throw DomainError("level " + std::to_string(level) + " outside [i0, i_h] = [" +
                      std::to_string(init.i0) + ", " + std::to_string(th.i_h) +
                      "]");
  }
}

void validate_policy(const Policy& policy, const DerivedThresholds& th,
                     const InitialCondition& init) {
  if (const auto* p = std::get_if<NsnFeedback>(&policy)) {
    validate_level(p->level, th, init);
  } else if (const auto* m = std::get_if<MorrisFourPhase>(&policy)) {
    validate_level(m->level, th, init);
    if (!(m->duration >= 0.0) || !(m->hold_duration >= 0.0) ||
        m->hold_duration > m->duration) {
      throw DomainError("morris policy needs 0 <= hold_duration <= duration");
    }
    if (m->start == MorrisStart::FixedTime && !(m->start_time >= 0.0)) {
      throw DomainError("morris start_time must be >= 0");
    }
  } else if (const auto* c = std::get_if<ConstantControl>(&policy)) {
    check_control(c->u);
  } else if (const auto* pc = std::get_if<PiecewiseConstant>(&policy)) {
    if (pc->breakpoints.size() != pc->values.size() + 1) {
      throw DomainError("piecewise policy needs one more breakpoint than values");
    }
    for (std::size_t k = 0; k < pc->breakpoints.size(); ++k) {
      if (!(pc->breakpoints[k] >= 0.0) ||
          (k > 0 && !(pc->breakpoints[k] > pc->breakpoints[k - 1]))) {
        throw DomainError("piecewise breakpoints must be >= 0 and increasing");
      }
    }
    for (double u : pc->values) {
      check_control(u);
    }
  }
}

using EventSink = std::function<void(EventKind)>;

/// Mode machine turning a Policy into a control law between switches.
class PolicyRunner {
public:
  enum class Phase { Fixed, Waiting, Holding, Lockdown, Released };

  PolicyRunner(const Policy& policy, double s_h) : policy_(policy), s_h_(s_h) {
    if (const auto* c = std::get_if<ConstantControl>(&policy)) {
      fixed_u_ = c->u;
    } else if (std::holds_alternative<NsnFeedback>(policy_) ||
               std::holds_alternative<MorrisFourPhase>(policy_)) {
      phase_ = Phase::Waiting;
    }
  }

  [[nodiscard]] Phase phase() const { return phase_; }

  /// True when no further switch can turn the control back on.
  [[nodiscard]] bool off_for_good() const {
    return phase_ == Phase::Released ||
           (phase_ == Phase::Fixed && fixed_u_ == 0.0 && next_time_ == kInf);
  }

  [[nodiscard]] double control(const Vec& y) const {
    switch (phase_) {
    case Phase::Fixed:
      return fixed_u_;
    case Phase::Holding:
      return singular_control(y[0], s_h_);
    case Phase::Lockdown:
      return 1.0;
    case Phase::Waiting:
    case Phase::Released:
      return 0.0;
    }
    return 0.0;
  }

  /// State guard of the current phase; a switch happens when it becomes <= 0.
  [[nodiscard]] double guard(const Vec& y) const {
    if (phase_ == Phase::Waiting) {
      if (const auto* p = std::get_if<NsnFeedback>(&policy_)) {
        return std::min(p->level - y[1], y[0] - s_h_);
      }
      const auto& m = std::get<MorrisFourPhase>(policy_);
      if (m.start == MorrisStart::LevelCrossing) {
        return std::min(m.level - y[1], y[0] - s_h_);
      }
    } else if (phase_ == Phase::Holding &&
               std::holds_alternative<NsnFeedback>(policy_)) {
      return y[0] - s_h_;
    }
    return kInf;
  }

  [[nodiscard]] double next_time_event() const { return next_time_; }

  /// Level that the singular arc holds I at, if projection applies.
  [[nodiscard]] std::optional<double> held_level(const Vec& y) const {
    if (phase_ != Phase::Holding || !(y[0] > s_h_)) {
      return std::nullopt;
    }
    return hold_level_;
  }

  void begin(double t0) {
    if (const auto* pc = std::get_if<PiecewiseConstant>(&policy_)) {
      if (!pc->breakpoints.empty()) {
        next_time_ = pc->breakpoints.front();
      }
    } else if (const auto* m = std::get_if<MorrisFourPhase>(&policy_)) {
      if (m->start == MorrisStart::FixedTime) {
        next_time_ = std::max(t0, m->start_time);
      }
    }
  }

  void fire_time_event(double t, Vec& y, const EventSink& emit) {
    if (const auto* pc = std::get_if<PiecewiseConstant>(&policy_)) {
      const double before = fixed_u_;
      fixed_u_ = next_break_ < pc->values.size() ? pc->values[next_break_] : 0.0;
      ++next_break_;
      next_time_ = next_break_ < pc->breakpoints.size()
                       ? pc->breakpoints[next_break_]
                       : kInf;
      if (before == 0.0 && fixed_u_ > 0.0) {
        emit(EventKind::InterventionStart);
      } else if (before > 0.0 && fixed_u_ == 0.0) {
        emit(EventKind::InterventionEnd);
      }
      return;
    }
    const auto& m = std::get<MorrisFourPhase>(policy_);
    switch (phase_) {
    case Phase::Waiting:
      start_morris(t, y, m, emit);
      break;
    case Phase::Holding:
      phase_ = Phase::Lockdown;
      next_time_ = lockdown_end_;
      break;
    case Phase::Lockdown:
      phase_ = Phase::Released;
      next_time_ = kInf;
      emit(EventKind::InterventionEnd);
      break;
    default:
      next_time_ = kInf;
      break;
    }
  }

  void fire_guard(double t, Vec& y, const EventSink& emit) {
    if (const auto* p = std::get_if<NsnFeedback>(&policy_)) {
      if (phase_ == Phase::Waiting) {
        if (y[0] > s_h_) {
          phase_ = Phase::Holding;
          hold_level_ = p->level;
          y[1] = hold_level_;
          emit(EventKind::InterventionStart);
        } else {
          // Level not crossed before the natural peak: nothing to do.
          phase_ = Phase::Released;
        }
      } else {
        phase_ = Phase::Released;
        emit(EventKind::InterventionEnd);
      }
      return;
    }
    start_morris(t, y, std::get<MorrisFourPhase>(policy_), emit);
  }

private:
  void start_morris(double t, Vec& y, const MorrisFourPhase& m,
                    const EventSink& emit) {
    if (m.duration <= 0.0) {
      phase_ = Phase::Released;
      next_time_ = kInf;
      return;
    }
    emit(EventKind::InterventionStart);
    lockdown_end_ = t + m.duration;
    if (m.hold_duration > 0.0) {
      phase_ = Phase::Holding;
      next_time_ = t + m.hold_duration;
      hold_level_ = m.start == MorrisStart::LevelCrossing ? m.level : y[1];
      if (y[0] > s_h_) {
        y[1] = hold_level_;
      }
    } else {
      phase_ = Phase::Lockdown;
      next_time_ = lockdown_end_;
    }
  }

  Policy policy_;
  double s_h_;
  Phase phase_{Phase::Fixed};
  double fixed_u_{0.0};
  double next_time_{kInf};
  std::size_t next_break_{0};
  double lockdown_end_{kInf};
  double hold_level_{0.0};
};

class Engine {
public:
  Engine(const EpidemicParams& params, const InitialCondition& init, double q0,
         const Policy& policy, const IntegratorConfig& cfg)
      : params_(params), cfg_(cfg), s_h_(params.s_h()),
        runner_(policy, params.s_h()), y_{init.s0, init.i0, q0}, q0_(q0) {}

  /// Runs until extinction, t_stop, or `stop` returns true at a settled point.
  /// Returns false if t_max was hit.
  template <class Stop> bool run(Stop&& stop) {
    runner_.begin(t_);
    settle();
    record();
    while (true) {
      if (stop(runner_)) {
        return true;
      }
      if (y_[1] < cfg_.i_extinction && y_[0] <= s_h_) {
        emit(EventKind::Extinction);
        return true;
      }
      if (cfg_.t_stop && t_ >= *cfg_.t_stop) {
        return true;
      }
      if (cfg_.stop_when_declining && y_[0] <= s_h_ && runner_.off_for_good()) {
        return true;
      }
      if (t_ >= cfg_.t_max) {
        return false;
      }
      advance();
      settle();
      record();
    }
  }

  [[nodiscard]] double time() const { return t_; }

  Trajectory finish() && {
    traj_.budget_spent = q0_ - y_[2];
    traj_.peak_i = -kInf;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < traj_.samples.size(); ++k) {
      if (traj_.samples[k].i > traj_.peak_i) {
        traj_.peak_i = traj_.samples[k].i;
        arg = k;
      }
    }
    const Sample& pk = traj_.samples[arg];
    traj_.events.push_back({EventKind::PeakReached, {pk.t, pk.s, pk.i, pk.c}});
    std::stable_sort(traj_.events.begin(), traj_.events.end(),
                     [](const Event& a, const Event& b) {
                       return a.state.t < b.state.t;
                     });
    return std::move(traj_);
  }

private:
  Vec rate(const Vec& y) const {
    const double u = runner_.control(y);
    const StateRate r = vector_field(as_state(0.0, y), u, params_);
    return {r.ds, r.di, r.dc};
  }

  Vec rk4(const Vec& y, double h) const {
    auto axpy = [](const Vec& a, double s, const Vec& b) {
      return Vec{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
    };
    const Vec k1 = rate(y);
    const Vec k2 = rate(axpy(y, 0.5 * h, k1));
    const Vec k3 = rate(axpy(y, 0.5 * h, k2));
    const Vec k4 = rate(axpy(y, h, k3));
    Vec out;
    for (std::size_t j = 0; j < 3; ++j) {
      out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return out;
  }

  double growth(const Vec& y) const { return rate(y)[1]; }

  void advance() {
    double h = cfg_.step;
    bool time_event = false;
    const double limit =
        std::min(cfg_.t_max, cfg_.t_stop.value_or(kInf));
    if (limit - t_ < h) {
      h = limit - t_;
    }
    const double te = runner_.next_time_event();
    if (te - t_ <= h) {
      h = te - t_;
      time_event = true;
    }
    Vec next = rk4(y_, h);

    // State events inside (t, t + h]: the guard is > 0 at the start and <= 0
    // at the end. Keep the earliest one.
    double theta = h;
    auto locate = [&](auto&& g) {
      if (!(g(y_) > 0.0) || g(next) > 0.0) {
        return;
      }
      const Bracket b = bisect_bracket(
          [&](double th) {
            const double v = g(rk4(y_, th));
            return v > 0.0 ? 1.0 : -1.0;
          },
          0.0, h, cfg_.event_tol);
      if (b.hi < theta) {
        theta = b.hi;
      }
    };
    locate([this](const Vec& y) { return runner_.guard(y); });
    if (!sh_reached_) {
      locate([this](const Vec& y) { return y[0] - s_h_; });
    }
    if (!runner_.held_level(y_)) {
      locate([this](const Vec& y) { return growth(y); });
    }

    if (theta < h) {
      next = rk4(y_, theta);
      t_ += theta;
    } else if (time_event) {
      t_ = te;
    } else {
      t_ += h;
    }
    y_ = next;
    if (auto level = runner_.held_level(y_)) {
      y_[1] = *level;
    }
  }

  /// Processes every switch due at the current point.
  void settle() {
    const EventSink sink = [this](EventKind kind) { emit(kind); };
    for (int guard_pass = 0; guard_pass < 8; ++guard_pass) {
      if (runner_.next_time_event() <= t_) {
        runner_.fire_time_event(t_, y_, sink);
        continue;
      }
      if (runner_.guard(y_) <= 0.0) {
        runner_.fire_guard(t_, y_, sink);
        continue;
      }
      break;
    }
    if (!sh_reached_ && y_[0] <= s_h_) {
      sh_reached_ = true;
      emit(EventKind::ReachedSh);
    }
  }

  void emit(EventKind kind) {
    traj_.events.push_back({kind, as_state(t_, y_)});
  }

  void record() {
    const double u = runner_.control(y_);
    check_control(u);
    traj_.samples.push_back({t_, y_[0], y_[1], y_[2], u});
  }

  const EpidemicParams& params_;
  const IntegratorConfig& cfg_;
  double s_h_;
  PolicyRunner runner_;
  double t_{0.0};
  Vec y_;
  double q0_;
  bool sh_reached_{false};
  Trajectory traj_;
};

} // namespace

Trajectory simulate(const EpidemicParams& params, const InitialCondition& init,
                    double q0, const Policy& policy,
                    const IntegratorConfig& cfg) {
  const DerivedThresholds th = derive_thresholds(params, init);
  cfg.validate();
  if (!(q0 >= 0.0) || !std::isfinite(q0)) {
    throw DomainError("initial budget q0 must be finite and >= 0");
  }
  validate_policy(policy, th, init);

  Engine engine(params, init, q0, policy, cfg);
  const bool done = engine.run([](const PolicyRunner&) { return false; });
  const double t_end = engine.time();
  Trajectory traj = std::move(engine).finish();
  if (!done) {
    throw HorizonError("t_max = " + std::to_string(cfg.t_max) +
                           " reached before extinction (t = " +
                           std::to_string(t_end) + ")",
                       std::move(traj));
  }
  return traj;
}

double time_to_level(const EpidemicParams& params, const InitialCondition& init,
                     double level, const IntegratorConfig& cfg) {
  const DerivedThresholds th = derive_thresholds(params, init);
  cfg.validate();
  validate_level(level, th, init);

  Engine engine(params, init, 0.0, NsnFeedback{level}, cfg);
  const bool done = engine.run([](const PolicyRunner& r) {
    return r.phase() != PolicyRunner::Phase::Waiting;
  });
  if (!done) {
    throw HorizonError("level not reached before t_max", std::move(engine).finish());
  }
  return engine.time();
}

} // namespace nsnpeak
