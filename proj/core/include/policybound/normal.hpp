#pragma once

namespace policybound {

// Standard normal CDF. Evaluated through erfc, which keeps full double
// precision in both tails (absolute error well below 1e-15).
double norm_cdf(double x);

// Standard normal quantile for p in (0, 1). Rational initial guess
// (Acklam's approximation) polished with one Halley step against
// norm_cdf; absolute error below 1e-13 across (1e-300, 1 - 1e-16).
double norm_quantile(double p);

// Two-sided normal critical value at the given confidence level,
// e.g. 1.95996... at level 0.95.
double norm_critical_value(double level);

}  // namespace policybound
