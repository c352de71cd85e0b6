#pragma once

#include <nsnpeak/errors.hpp>

#include <cmath>
#include <concepts>

namespace nsnpeak {

struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs (a zero at
/// either end counts as a sign change). Stops once hi - lo <= tol or the
/// midpoint is no longer representable between the ends. Returns the final
/// bracket so callers can pick the side they need.
template <std::invocable<double> F>
[[nodiscard]] Bracket bisect_bracket(F&& f, double lo, double hi, double tol) {
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) {
    return {lo, lo, f_lo, f_lo};
  }
  if (f_hi == 0.0) {
    return {hi, hi, f_hi, f_hi};
  }
  if (std::signbit(f_lo) == std::signbit(f_hi) || std::isnan(f_lo) ||
      std::isnan(f_hi)) {
    throw DomainError("bisection: no sign change on bracket");
  }
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double f_mid = f(mid);
    if (f_mid == 0.0) {
      return {mid, mid, f_mid, f_mid};
    }
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return {lo, hi, f_lo, f_hi};
}

/// Root of f on [lo, hi]: the bracket end with the smaller residual.
template <std::invocable<double> F>
[[nodiscard]] double bisect(F&& f, double lo, double hi, double tol) {
  const Bracket b = bisect_bracket(f, lo, hi, tol);
  return std::fabs(b.f_lo) <= std::fabs(b.f_hi) ? b.lo : b.hi;
}

} // namespace nsnpeak
