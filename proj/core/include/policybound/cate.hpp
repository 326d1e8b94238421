#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "policybound/panel.hpp"

namespace policybound {

// OLS fit of the final-period first difference on (1, A, x, A*x) with a
// heteroskedasticity-robust covariance. Coefficient order matches the
// names array.
struct CateFit {
  static constexpr std::array<const char*, 4> kNames = {"intercept", "treated",
                                                        "x", "treated_x"};
  std::array<double, 4> coef{};
  std::array<double, 16> covariance{};  // row-major 4 x 4
  std::size_t n = 0;
  std::string variant = "hc_small_sample";  // sandwich scaled by n/(n-p)
};

// Fit the interacted first-difference regression. Equivalent by
// construction to separate per-arm regressions of the final-period change
// on (1, x). Requires at least three units in each coarsened arm.
CateFit fit_cate_projection(const Panel& panel, std::string_view x_column);

struct Interval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Normal-approximation confidence interval for the fitted effect at
// covariate value x: point = b_treated + b_treated_x * x, variance by the
// linear-combination rule on the robust covariance.
Interval cate_interval(const CateFit& fit, double x, double level);

// Two-way fixed effects average effect of the coarsened indicator on a
// unit subset: coefficient on treated x post, cluster-robust standard
// error clustered by unit. The standard error is absent when either arm
// has fewer than two units in the subset.
struct TwfeAte {
  double estimate = 0.0;
  std::optional<double> std_error;
  std::optional<Interval> ci;  // normal 95% interval
  std::size_t n_units = 0;
  std::size_t n_treated = 0;
};

TwfeAte twfe_ate(const Panel& panel, const std::vector<std::size_t>& subset);

// Convenience overload: the full panel.
TwfeAte twfe_ate(const Panel& panel);

}  // namespace policybound
