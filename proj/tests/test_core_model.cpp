#include "oracles.hpp"

#include <nsnpeak/core_model.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace nsnpeak;

namespace {
// Uncontrolled peaks computed by oracle::peak_by_quadrature.
constexpr double kPeakReference = 0.300462903777464;
constexpr double kPeakS09I005 = 0.285582742329906;
} // namespace

TEST_CASE("params validation") {
  EpidemicParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.beta = 0.21;
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.gamma = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p.gamma = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("initial condition validation") {
  InitialCondition ic;
  CHECK_NOTHROW(ic.validate());
  CHECK_THROWS_AS((InitialCondition{0.0, 0.1}.validate()), ValidationError);
  CHECK_THROWS_AS((InitialCondition{0.5, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((InitialCondition{0.8, 0.3}.validate()), ValidationError);
  CHECK_NOTHROW((InitialCondition{0.7, 0.3}.validate()));
}

TEST_CASE("thresholds for the reference scenario") {
  const DerivedThresholds th = derive_thresholds({}, {});
  CHECK(th.r0 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(th.s_h == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(th.i_h == doctest::Approx(kPeakReference).epsilon(1e-12));
  CHECK(th.outbreak_possible);
  CHECK(th.nontrivial);
}

TEST_CASE("thresholds for s0 = 0.9, i0 = 0.05") {
  const DerivedThresholds th = derive_thresholds({}, {0.9, 0.05});
  const double direct = 0.05 + 0.9 - 1.0 / 3.0 - std::log(2.7) / 3.0;
  CHECK(th.i_h == doctest::Approx(direct).epsilon(1e-14));
  CHECK(th.i_h == doctest::Approx(kPeakS09I005).epsilon(1e-12));
}

TEST_CASE("trivial case: s0 at the immunity threshold") {
  const EpidemicParams p{0.2, 0.1};
  const DerivedThresholds th = derive_thresholds(p, {0.5, 0.1});
  CHECK_FALSE(th.nontrivial);
  CHECK(th.i_h == 0.1);
}

TEST_CASE("no outbreak when gamma >= beta") {
  const DerivedThresholds th = derive_thresholds({0.1, 0.2}, {0.9, 0.01});
  CHECK_FALSE(th.outbreak_possible);
  CHECK_FALSE(th.nontrivial);
  CHECK(th.i_h == 0.01);
}

TEST_CASE("derive_thresholds rejects invalid input") {
  CHECK_THROWS_AS((void)derive_thresholds({-0.1, 0.07}, {}), ValidationError);
  CHECK_THROWS_AS((void)derive_thresholds({}, {0.9, 0.2}), ValidationError);
}

TEST_CASE("vector field") {
  const EpidemicParams p;
  SUBCASE("dI = 0 at s = s_h") {
    const StateRate r = vector_field({0.0, 1.0 / 3.0, 0.1, 1.0}, 0.0, p);
    CHECK(std::fabs(r.di) < 1e-17);
  }
  SUBCASE("full break") {
    const StateRate r = vector_field({0.0, 0.5, 0.2, 1.0}, 1.0, p);
    CHECK(r.ds == 0.0);
    CHECK(r.di == doctest::Approx(-0.07 * 0.2).epsilon(1e-15));
    CHECK(r.dc == -1.0);
  }
  SUBCASE("interior control") {
    const StateRate r = vector_field({0.0, 0.8, 0.1, 1.0}, 0.25, p);
    CHECK(r.ds == doctest::Approx(-0.0126).epsilon(1e-13));
    CHECK(r.di == doctest::Approx(0.0056).epsilon(1e-13));
    CHECK(r.dc == -0.25);
  }
  SUBCASE("control outside [0, 1]") {
    CHECK_THROWS_AS((void)vector_field({0.0, 0.5, 0.1, 1.0}, -0.01, p), DomainError);
    CHECK_THROWS_AS((void)vector_field({0.0, 0.5, 0.1, 1.0}, 1.01, p), DomainError);
    CHECK_THROWS_AS(
        (void)vector_field({0.0, 0.5, 0.1, 1.0},
                           std::numeric_limits<double>::quiet_NaN(), p),
        DomainError);
  }
}

TEST_CASE("conserved quantity") {
  const EpidemicParams p;
  CHECK(conserved_quantity(1.0, 0.0, p) == 1.0);
  CHECK(conserved_quantity(0.5, 0.2, p) ==
        doctest::Approx(0.7 - std::log(0.5) / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS((void)conserved_quantity(0.0, 0.1, p), DomainError);
  CHECK_THROWS_AS((void)conserved_quantity(-0.1, 0.1, p), DomainError);
}

TEST_CASE("property: vector field conserves the invariant when u = 0") {
  // d/dt (S + I - s_h ln S) = dS (1 - s_h/S) + dI = 0 for u = 0, and S is
  // never increasing for any admissible u.
  const EpidemicParams p{0.3, 0.1};
  for (int a = 1; a < 20; ++a) {
    for (int b = 1; b < 20; ++b) {
      const double s = a / 20.0;
      const double i = (1.0 - s) * b / 20.0;
      const StateRate r0 = vector_field({0.0, s, i, 1.0}, 0.0, p);
      CHECK(std::fabs(r0.ds * (1.0 - p.s_h() / s) + r0.di) < 1e-15);
      for (double u : {0.0, 0.3, 0.7, 1.0}) {
        CHECK(vector_field({0.0, s, i, 1.0}, u, p).ds <= 0.0);
      }
    }
  }
}

TEST_CASE("recovered proportion") {
  const EpidemicState st{0.0, 0.6, 0.1, 0.0};
  CHECK(st.r() == doctest::Approx(0.3));
}
