#include <nsnpeak/core_model.hpp>

#include <cmath>
#include <string>

namespace nsnpeak {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw ValidationError(what);
  }
}

} // namespace

void EpidemicParams::validate() const {
  require(std::isfinite(beta) && beta > 0.0, "beta must be finite and > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be finite and > 0");
}

void InitialCondition::validate() const {
  require(std::isfinite(s0) && s0 > 0.0, "s0 must be finite and > 0");
  require(s0 <= 1.0 + kProportionSlack, "s0 must be <= 1");
  require(std::isfinite(i0) && i0 > 0.0, "i0 must be finite and > 0");
  require(i0 <= 1.0 + kProportionSlack, "i0 must be <= 1");
  require(s0 + i0 <= 1.0 + kProportionSlack, "s0 + i0 must be <= 1");
}

DerivedThresholds derive_thresholds(const EpidemicParams& params,
                                    const InitialCondition& init) {
  params.validate();
  init.validate();

  DerivedThresholds th;
  th.r0 = params.r0();
  th.s_h = params.s_h();
  th.outbreak_possible = th.r0 > 1.0;
  th.nontrivial = init.s0 > th.s_h;
  th.i_h = th.nontrivial ? init.i0 + init.s0 - th.s_h -
                               th.s_h * std::log(init.s0 / th.s_h)
                         : init.i0;
  return th;
}

StateRate vector_field(const EpidemicState& state, double u,
                       const EpidemicParams& params) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("control value " + std::to_string(u) +
                      " outside [0, 1]");
  }
  const double infection = params.beta * state.s * state.i * (1.0 - u);
  return {-infection, infection - params.gamma * state.i, -u};
}

double conserved_quantity(double s, double i, const EpidemicParams& params) {
  if (!(s > 0.0)) {
    throw DomainError("conserved quantity requires s > 0");
  }
  return s + i - params.s_h() * std::log(s);
}

} // namespace nsnpeak
