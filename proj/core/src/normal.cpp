#include "policybound/normal.hpp"

#include <cmath>

#include "policybound/errors.hpp"

namespace policybound {

double norm_cdf(double x) {
  // Phi(x) = erfc(-x / sqrt(2)) / 2; erfc avoids cancellation for x << 0.
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

namespace {

// Acklam's rational approximation to the normal quantile (relative error
// ~1.15e-9), used as the starting point for one Halley refinement.
double quantile_initial(double p) {
  static constexpr double a[6] = {
      -3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
      1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {
      -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[6] = {
      -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("norm_quantile: p must lie strictly inside (0, 1)");
  }
  double x = quantile_initial(p);
  // One Halley step: u = (Phi(x) - p) / phi(x); x <- x - u / (1 + x u / 2).
  const double e = norm_cdf(x) - p;
  const double phi =
      0.39894228040143267794 * std::exp(-0.5 * x * x);  // 1/sqrt(2 pi)
  if (phi > 0.0) {
    const double u = e / phi;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double norm_critical_value(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("norm_critical_value: level must lie in (0, 1)");
  }
  return norm_quantile(0.5 * (1.0 + level));
}

}  // namespace policybound
