#include "oracles.hpp"

#include <nsnpeak/integrator.hpp>
#include <nsnpeak/nsn_policy.hpp>

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

using namespace nsnpeak;

namespace {
// oracle::peak_by_quadrature
constexpr double kPeakReference = 0.300462903777464;
constexpr double kPeakS09I005 = 0.285582742329906;
// oracle::time_to_level_by_quadrature
constexpr double kTimeToOptimalLevel = 84.2445592385319;
constexpr double kTimeToOnePercent = 65.9509440465285;
// i_h / (28 beta s_h + 1) with the quadrature peak
constexpr double kLevelQ28 = 0.101507737762657;

bool s_non_increasing(const Trajectory& tr) {
  for (std::size_t k = 1; k < tr.samples.size(); ++k) {
    if (tr.samples[k].s > tr.samples[k - 1].s) {
      return false;
    }
  }
  return true;
}
} // namespace

TEST_CASE("config validation") {
  IntegratorConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.event_tol = cfg.step;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.t_max = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.t_stop = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("event kind names round trip") {
  for (auto kind : {EventKind::InterventionStart, EventKind::InterventionEnd,
                    EventKind::PeakReached, EventKind::ReachedSh,
                    EventKind::Extinction}) {
    CHECK(event_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS((void)event_kind_from_string("Nope"), ValidationError);
}

TEST_CASE("uncontrolled epidemic") {
  const Trajectory tr = simulate({}, {}, 0.0, ZeroControl{});
  CHECK(tr.peak_i == doctest::Approx(kPeakReference).epsilon(1e-9));
  CHECK(tr.budget_spent == 0.0);
  CHECK(tr.max_control() == 0.0);
  CHECK(s_non_increasing(tr));

  const auto sh = tr.first_event(EventKind::ReachedSh);
  const auto pk = tr.first_event(EventKind::PeakReached);
  const auto ext = tr.first_event(EventKind::Extinction);
  REQUIRE(sh);
  REQUIRE(pk);
  REQUIRE(ext);
  // Localized in time to event_tol, so S is off by at most |dS/dt| event_tol.
  CHECK(std::fabs(sh->state.s - 1.0 / 3.0) < 1e-9);
  CHECK(std::fabs(pk->state.t - sh->state.t) < 1e-6);
  CHECK(ext->state.i < 1e-9);
  CHECK(ext->state.s <= 1.0 / 3.0);
  CHECK(tr.samples.back().t == ext->state.t);

  CHECK(std::is_sorted(tr.events.begin(), tr.events.end(),
                       [](const Event& a, const Event& b) {
                         return a.state.t < b.state.t;
                       }));
}

TEST_CASE("uncontrolled peak agrees with a separate integrator") {
  const Trajectory tr = simulate({}, {0.9, 0.05}, 0.0, ZeroControl{});
  oracle::Model m{0.21, 0.07, 0.9, 0.05};
  const double midpoint = oracle::peak_by_midpoint(m, 1e-3, 200.0);
  CHECK(tr.peak_i == doctest::Approx(kPeakS09I005).epsilon(1e-9));
  CHECK(std::fabs(tr.peak_i - midpoint) < 1e-8);
}

TEST_CASE("property: invariant conserved under u = 0") {
  for (const auto& [beta, gamma, s0, i0] :
       {std::array{0.21, 0.07, 1.0 - 1e-6, 1e-6}, std::array{0.5, 0.1, 0.95, 0.05},
        std::array{0.3, 0.2, 0.999, 0.001}, std::array{1.0, 0.25, 0.6, 0.01}}) {
    const EpidemicParams p{beta, gamma};
    const Trajectory tr = simulate(p, {s0, i0}, 0.0, ZeroControl{});
    const double k0 = conserved_quantity(s0, i0, p);
    double worst = 0.0;
    for (const Sample& smp : tr.samples) {
      worst = std::max(worst, std::fabs(conserved_quantity(smp.s, smp.i, p) - k0));
      CHECK(smp.s + smp.i <= s0 + i0 + 1e-15);
    }
    CHECK(worst / std::fabs(k0) < 1e-8);
    CHECK(s_non_increasing(tr));
  }
}

TEST_CASE("full break freezes S and I decays exponentially") {
  IntegratorConfig cfg;
  cfg.t_stop = 50.0;
  const Trajectory tr = simulate({}, {0.7, 0.2}, 100.0, ConstantControl{1.0}, cfg);
  for (const Sample& smp : tr.samples) {
    CHECK(smp.s == 0.7);
    CHECK(smp.i == doctest::Approx(0.2 * std::exp(-0.07 * smp.t)).epsilon(1e-10));
  }
  CHECK(tr.samples.back().t == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(tr.budget_spent == doctest::Approx(50.0).epsilon(1e-10));
}

TEST_CASE("horizon error carries the partial trajectory") {
  // Under u = 0.5 the effective reproduction number is 1.5, so S stays
  // above s_h and the termination condition is never met.
  IntegratorConfig cfg;
  cfg.t_max = 300.0;
  try {
    (void)simulate({}, {}, 1e3, ConstantControl{0.5}, cfg);
    FAIL("expected a horizon error");
  } catch (const HorizonError& e) {
    REQUIRE_FALSE(e.partial().samples.empty());
    CHECK(e.partial().samples.back().t == doctest::Approx(300.0));
    CHECK(e.partial().budget_spent == doctest::Approx(150.0).epsilon(1e-9));
  }
}

TEST_CASE("invalid policies are domain errors") {
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, ConstantControl{1.5}), DomainError);
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, NsnFeedback{0.5}), DomainError);
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, NsnFeedback{1e-7}), DomainError);
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, PiecewiseConstant{{0.0, 1.0}, {2.0}}),
                  DomainError);
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, PiecewiseConstant{{1.0, 0.5}, {0.5}}),
                  DomainError);
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, PiecewiseConstant{{0.0, 1.0}, {}}),
                  DomainError);
  MorrisFourPhase m;
  m.level = 0.1;
  m.duration = 10.0;
  m.hold_duration = 20.0;
  CHECK_THROWS_AS((void)simulate({}, {}, 1.0, m), DomainError);
}

TEST_CASE("NSN feedback at the optimal level for Q = 28") {
  const Trajectory tr = simulate({}, {}, 28.0, NsnFeedback{kLevelQ28});
  CHECK(std::fabs(tr.peak_i - kLevelQ28) < 1e-6);
  CHECK(tr.budget_spent == doctest::Approx(28.0).epsilon(1e-6));
  CHECK(tr.admissible(1e-9));
  CHECK(tr.control_switches() == 1);
  CHECK(tr.max_control() ==
        doctest::Approx(1.0 - (1.0 / 3.0) / 0.840621227653659).epsilon(1e-9));

  const auto start = tr.first_event(EventKind::InterventionStart);
  const auto end = tr.first_event(EventKind::InterventionEnd);
  REQUIRE(start);
  REQUIRE(end);
  CHECK(start->state.t == doctest::Approx(kTimeToOptimalLevel).epsilon(1e-8));
  // The arc lasts (s_bar - s_h) / (gamma level).
  const double d = (0.840621227653659 - 1.0 / 3.0) / (0.07 * kLevelQ28);
  CHECK(end->state.t - start->state.t == doctest::Approx(d).epsilon(1e-7));

  // On the arc I stays at the level and u relaxes to 0 without a jump.
  for (const Sample& smp : tr.samples) {
    if (smp.t >= start->state.t && smp.t <= end->state.t) {
      CHECK(std::fabs(smp.i - kLevelQ28) <= 1e-6);
    }
  }
  const auto at_end = std::find_if(tr.samples.begin(), tr.samples.end(),
                                   [&](const Sample& s) { return s.t >= end->state.t; });
  REQUIRE(at_end != tr.samples.begin());
  CHECK(std::prev(at_end)->u < 1e-3);
  CHECK(s_non_increasing(tr));
}

TEST_CASE("property: NSN holds the peak at any level") {
  const double i_h = derive_thresholds({}, {}).i_h;
  for (double frac : {0.02, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    const double level = frac * i_h;
    const double budget = budget_of_level(level, {}, {});
    const Trajectory tr = simulate({}, {}, budget, NsnFeedback{level});
    CHECK(std::fabs(tr.peak_i - level) <= 1e-6);
    CHECK(std::fabs(tr.budget_spent - budget) <= 1e-3 * budget);
    CHECK(tr.admissible(1e-6));
    CHECK(tr.control_switches() == 1);
  }
}

TEST_CASE("NSN at the natural peak does nothing") {
  const double i_h = derive_thresholds({}, {}).i_h;
  const Trajectory tr = simulate({}, {}, 0.0, NsnFeedback{i_h});
  CHECK(tr.peak_i == doctest::Approx(i_h).epsilon(1e-9));
  CHECK(tr.budget_spent < 1e-6);
}

TEST_CASE("NSN at i0 starts immediately") {
  const InitialCondition ic{0.9, 0.05};
  const Trajectory tr = simulate({}, ic, 1e4, NsnFeedback{0.05});
  const auto start = tr.first_event(EventKind::InterventionStart);
  REQUIRE(start);
  CHECK(start->state.t == 0.0);
  CHECK(std::fabs(tr.peak_i - 0.05) <= 1e-6);
}

TEST_CASE("piecewise control") {
  const PiecewiseConstant pc{{10.0, 20.0, 35.0}, {0.4, 1.0}};
  CHECK(pc.integral() == doctest::Approx(19.0));
  const Trajectory tr = simulate({}, {}, 19.0, pc);
  CHECK(tr.budget_spent == doctest::Approx(19.0).epsilon(1e-12));
  const auto start = tr.first_event(EventKind::InterventionStart);
  const auto end = tr.first_event(EventKind::InterventionEnd);
  REQUIRE(start);
  REQUIRE(end);
  CHECK(start->state.t == 10.0);
  CHECK(end->state.t == 35.0);
  CHECK(tr.control_switches() == 3);
  CHECK(tr.admissible(1e-9));
}

TEST_CASE("property: C agrees with the quadrature of u") {
  const double level = kLevelQ28;
  MorrisFourPhase m;
  m.level = 0.08;
  m.duration = 60.0;
  m.hold_duration = 30.0;
  const std::vector<Policy> policies = {
      ZeroControl{}, NsnFeedback{level}, PiecewiseConstant{{5.0, 40.0, 90.0}, {0.3, 0.8}},
      m};
  for (const Policy& pol : policies) {
    const Trajectory tr = simulate({}, {}, 100.0, pol);
    CHECK(std::fabs(tr.budget_spent - tr.control_integral()) < 1e-6);
  }
}

TEST_CASE("four-phase policy with a fixed start") {
  MorrisFourPhase m;
  m.start = MorrisStart::FixedTime;
  m.start_time = 60.0;
  m.duration = 40.0;
  m.hold_duration = 15.0;
  m.level = 1e-6; // validated but not used for a fixed start
  const Trajectory tr = simulate({}, {}, 100.0, m);
  const auto start = tr.first_event(EventKind::InterventionStart);
  const auto end = tr.first_event(EventKind::InterventionEnd);
  REQUIRE(start);
  REQUIRE(end);
  CHECK(start->state.t == 60.0);
  CHECK(end->state.t == 100.0);
  CHECK(tr.control_switches() == 3);
  for (const Sample& smp : tr.samples) {
    if (smp.t > 60.0 && smp.t < 75.0) {
      CHECK(smp.i == doctest::Approx(start->state.i).epsilon(1e-9));
    } else if (smp.t >= 75.0 && smp.t < 100.0) {
      CHECK(smp.u == 1.0);
    }
  }
  CHECK(tr.budget_spent == doctest::Approx(tr.control_integral()).epsilon(1e-8));
}

TEST_CASE("time to level") {
  CHECK(time_to_level({}, {}, 1e-6) == 0.0);
  CHECK(time_to_level({}, {}, kLevelQ28) ==
        doctest::Approx(kTimeToOptimalLevel).epsilon(1e-8));
  CHECK(time_to_level({}, {}, 0.01) == doctest::Approx(kTimeToOnePercent).epsilon(1e-8));

  const double i_h = derive_thresholds({}, {}).i_h;
  const Trajectory zero = simulate({}, {}, 0.0, ZeroControl{});
  CHECK(std::fabs(time_to_level({}, {}, i_h) - zero.peak_time()) < 1e-6);

  CHECK_THROWS_AS((void)time_to_level({}, {}, 0.5), DomainError);
  CHECK_THROWS_AS((void)time_to_level({}, {}, 1e-7), DomainError);
}

TEST_CASE("fixed window") {
  IntegratorConfig cfg;
  cfg.t_stop = 12.345;
  const Trajectory tr = simulate({}, {}, 0.0, ZeroControl{}, cfg);
  CHECK(tr.samples.back().t == doctest::Approx(12.345).epsilon(1e-12));
}

TEST_CASE("stop once declining") {
  IntegratorConfig cfg;
  cfg.stop_when_declining = true;
  const Trajectory tr = simulate({}, {}, 0.0, ZeroControl{}, cfg);
  CHECK(tr.peak_i == doctest::Approx(kPeakReference).epsilon(1e-9));
  CHECK(tr.samples.back().s <= 1.0 / 3.0);
  CHECK_FALSE(tr.first_event(EventKind::Extinction));
}
