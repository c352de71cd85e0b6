#include <nsnpeak/nsn_policy.hpp>
#include <nsnpeak/verification.hpp>

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace nsnpeak;

namespace {
constexpr double kPeakReference = 0.300462903777464; // oracle::peak_by_quadrature
constexpr double kLevelQ28 = 0.101507737762657;
// Arc duration at Q = 28: (s_bar - s_h) / (gamma level) with oracle values.
constexpr double kDurationQ28 = 71.3932758092441;

double relative(double a, double b) { return std::fabs(a - b) / std::fabs(b); }
} // namespace

TEST_CASE("line integral without control") {
  // Each of the two terms integrates to about ln(I) / gamma, a few hundred,
  // and they cancel; what is left is trapezoidal error.
  const Trajectory tr = simulate({}, {}, 0.0, ZeroControl{});
  CHECK(std::fabs(budget_line_integral(tr, {})) < 1e-5);
}

TEST_CASE("line integral along the NSN trajectory") {
  const Trajectory tr = simulate({}, {}, 28.0, NsnFeedback{kLevelQ28});
  const double li = budget_line_integral(tr, {});
  CHECK(li == doctest::Approx(-28.0).epsilon(0.05 / 28.0));
  CHECK(relative(-li, tr.budget_spent) < 1e-3);
}

TEST_CASE("line integral under a constant control over a window") {
  IntegratorConfig cfg;
  cfg.t_stop = 100.0;
  const Trajectory tr = simulate({}, {}, 100.0, ConstantControl{0.5}, cfg);
  CHECK(budget_line_integral(tr, {}) == doctest::Approx(-50.0).epsilon(1e-3));
}

TEST_CASE("line integral rejects I <= 0") {
  Trajectory tr;
  tr.samples = {{0.0, 0.9, 0.1, 1.0, 0.0}, {1.0, 0.89, 0.0, 1.0, 0.0}};
  CHECK_THROWS_AS((void)budget_line_integral(tr, {}), DomainError);
}

TEST_CASE("SplitMix64 reference stream") {
  // First outputs of SplitMix64 seeded with 0 (reference implementation).
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng.next() == 0x06c45d188009454fULL);
}

TEST_CASE("SplitMix64 draws") {
  SplitMix64 rng(42);
  for (int k = 0; k < 10000; ++k) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const int n = rng.uniform_int(3, 7);
    CHECK(n >= 3);
    CHECK(n <= 7);
  }
  SplitMix64 a(7);
  SplitMix64 b(7);
  for (int k = 0; k < 100; ++k) {
    CHECK(a.next() == b.next());
  }
}

TEST_CASE("trial seeds differ") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    seen.insert(trial_seed(1, k));
  }
  CHECK(seen.size() == 1000);
  CHECK(trial_seed(1, 5) == trial_seed(1, 5));
  CHECK(trial_seed(1, 5) != trial_seed(2, 5));
}

TEST_CASE("rescale to budget") {
  SUBCASE("scales down") {
    const PiecewiseConstant pc{{0.0, 10.0, 30.0}, {0.8, 0.4}};
    const PiecewiseConstant out = rescale_to_budget(pc, 4.0);
    CHECK(out.integral() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(out.integral() <= 4.0);
    CHECK(out.values[0] == doctest::Approx(2.0 * out.values[1]).epsilon(1e-12));
  }
  SUBCASE("clips at one") {
    const PiecewiseConstant pc{{0.0, 10.0, 30.0}, {0.8, 0.1}};
    const PiecewiseConstant out = rescale_to_budget(pc, 20.0);
    CHECK(out.values[0] == 1.0);
    CHECK(out.integral() <= 20.0);
    CHECK(out.integral() == doctest::Approx(20.0).epsilon(1e-12));
  }
  SUBCASE("budget larger than the support") {
    const PiecewiseConstant pc{{0.0, 10.0, 30.0}, {0.2, 0.0}};
    const PiecewiseConstant out = rescale_to_budget(pc, 50.0);
    CHECK(out.values == std::vector<double>{1.0, 0.0});
  }
  SUBCASE("no budget") {
    const PiecewiseConstant out = rescale_to_budget({{0.0, 1.0}, {0.5}}, 0.0);
    CHECK(out.values == std::vector<double>{0.0});
  }
}

TEST_CASE("property: sampled adversaries are admissible") {
  const DerivedThresholds th = derive_thresholds({}, {});
  AdversaryContext ctx;
  ctx.horizon = time_to_level({}, {}, th.i_h);
  ctx.nsn_level = kLevelQ28;
  ctx.i_h = th.i_h;
  ctx.s_h = th.s_h;
  ctx.gamma = 0.07;
  for (auto family : {AdversaryFamily::Uniform, AdversaryFamily::BangBang,
                      AdversaryFamily::Sparse, AdversaryFamily::NsnLike}) {
    for (std::uint64_t k = 0; k < 50; ++k) {
      SplitMix64 rng(trial_seed(3, k));
      const PiecewiseConstant pc = sample_adversary(family, rng, 28.0, {}, {}, ctx);
      CHECK(pc.values.size() >= 1);
      CHECK(pc.values.size() <= 20);
      CHECK(pc.breakpoints.size() == pc.values.size() + 1);
      CHECK(pc.integral() <= 28.0 * (1.0 + 1e-12));
      for (double u : pc.values) {
        CHECK(u >= 0.0);
        CHECK(u <= 1.0);
      }
    }
  }
  CHECK(to_string(AdversaryFamily::BangBang) == "bang_bang");
}

TEST_CASE("adversarial search with no budget") {
  const AdversarialReport rep = adversarial_search({}, {}, 0.0, 8, 1);
  CHECK(rep.passed());
  CHECK(rep.nsn_peak == doctest::Approx(kPeakReference).epsilon(1e-12));
  for (const AdversaryTrial& t : rep.results) {
    CHECK(t.peak == doctest::Approx(kPeakReference).epsilon(1e-9));
    CHECK(t.budget_used == 0.0);
  }
  CHECK(std::fabs(rep.margin) < 1e-9);
}

TEST_CASE("adversarial search at Q = 28") {
  AdversarialOptions opt;
  opt.threads = 1;
  const AdversarialReport rep = adversarial_search({}, {}, 28.0, 40, 9, opt);
  CHECK(rep.trials == 40);
  CHECK(rep.passed());
  CHECK(rep.violations.empty());
  CHECK(rep.margin > -1e-4);
  CHECK(rep.max_budget_used <= 28.0 * (1.0 + 1e-9));
  CHECK(rep.nsn_peak == doctest::Approx(kLevelQ28).epsilon(1e-6));

  opt.threads = 4;
  const AdversarialReport threaded = adversarial_search({}, {}, 28.0, 40, 9, opt);
  CHECK(threaded.results == rep.results);
  CHECK(threaded.best_adversary_peak == rep.best_adversary_peak);

  const AdversarialReport other = adversarial_search({}, {}, 28.0, 40, 10, opt);
  CHECK(other.results != rep.results);

  CHECK_THROWS_AS((void)adversarial_search({}, {}, 28.0, 0, 1), DomainError);
}

TEST_CASE("control applied after S falls below s_h cannot lower the peak") {
  const Trajectory zero = simulate({}, {}, 0.0, ZeroControl{});
  const double t_late = zero.first_event(EventKind::ReachedSh)->state.t + 1.0;
  const PiecewiseConstant late{{t_late, t_late + 20.0, t_late + 40.0}, {1.0, 0.4}};
  const Trajectory tr = simulate({}, {}, 28.0, late);
  CHECK(tr.peak_i == zero.peak_i);
}

TEST_CASE("four-phase hold duration") {
  const double s_h = EpidemicParams{}.s_h();
  // Level at the natural peak: no room to hold.
  CHECK(morris_hold_duration(kPeakReference, 30.0, {}, {}) == 30.0);
  for (double d : {5.0, 20.0, 71.4, 200.0}) {
    for (double level : {0.02, 0.08, 0.15}) {
      const double hold = morris_hold_duration(level, d, {}, {});
      const double s_bar = s_at_level(level, {}, {});
      CHECK(hold >= 0.0);
      CHECK(hold <= d);
      CHECK(hold <= (s_bar - s_h) / (0.07 * level) + 1e-9);
    }
  }
}

TEST_CASE("four-phase strategy at the NSN duration for Q = 28") {
  const MorrisResult m = morris_strategy({}, {}, 71.4);
  CHECK_FALSE(m.degenerate);
  CHECK(m.budget_spent > 28.0);
  CHECK(m.trajectory.control_switches() == 3);
  // The held level balances the peak that follows the intervention.
  CHECK(std::fabs(m.second_peak - m.policy.level) < 1e-4);
  CHECK(m.second_peak <= m.policy.level + 1e-9);
  CHECK(m.peak == doctest::Approx(m.policy.level).epsilon(1e-6));
  CHECK(m.trajectory.admissible(1e-9));
}

TEST_CASE("four-phase strategy with a vanishing duration") {
  const MorrisResult m = morris_strategy({}, {}, 0.01);
  CHECK(m.peak == doctest::Approx(kPeakReference).epsilon(2e-3));
  CHECK_THROWS_AS((void)morris_strategy({}, {}, 0.0), DomainError);
  CHECK_THROWS_AS((void)morris_strategy({}, {}, -1.0), DomainError);
}

TEST_CASE("budget for a duration") {
  CHECK(budget_for_duration(0.0, {}, {}) == 0.0);
  CHECK(budget_for_duration(kDurationQ28, {}, {}) == doctest::Approx(28.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)budget_for_duration(-1.0, {}, {}), DomainError);
}

TEST_CASE("strategy comparison") {
  const std::vector<double> durations = {10.0, 71.4, 200.0};
  const Comparison cmp = compare_strategies({}, {}, durations, {}, 1);
  REQUIRE(cmp.rows.size() == 3);
  CHECK(cmp.nsn_budget_lower);
  CHECK(cmp.budget_gap_increasing);
  CHECK(cmp.peaks_converge);
  CHECK(cmp.rows[1].nsn_peak == doctest::Approx(0.1015).epsilon(5e-3));
  CHECK(cmp.rows[1].nsn_budget == doctest::Approx(28.0).epsilon(1e-3));

  const Comparison threaded = compare_strategies({}, {}, durations, {}, 3);
  CHECK(threaded.rows == cmp.rows);

  const std::vector<double> tiny = {1e-3};
  const Comparison small = compare_strategies({}, {}, tiny, {}, 1);
  CHECK(small.rows[0].nsn_peak == doctest::Approx(kPeakReference).epsilon(1e-3));
  CHECK(small.rows[0].morris_peak == doctest::Approx(kPeakReference).epsilon(1e-3));

  const std::vector<double> bad = {10.0, 5.0};
  CHECK_THROWS_AS((void)compare_strategies({}, {}, bad), DomainError);
}
