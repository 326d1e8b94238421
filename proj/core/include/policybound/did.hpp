#pragma once

#include <string>
#include <vector>

#include "policybound/panel.hpp"

namespace policybound {

// How the counterfactual trend for a unit is predicted from its
// comparator pool.
enum class AdjusterKind {
  none,      // pool mean of first differences
  discrete,  // pool mean among exact covariate matches
  linear,    // OLS of the first difference on listed covariates
  twfe       // unit intercept plus pool period means
};

struct Adjuster {
  AdjusterKind kind = AdjusterKind::none;
  std::vector<std::string> columns;

  static Adjuster none() { return {}; }
  static Adjuster discrete(std::vector<std::string> cols) {
    return {AdjusterKind::discrete, std::move(cols)};
  }
  static Adjuster linear(std::vector<std::string> cols) {
    return {AdjusterKind::linear, std::move(cols)};
  }
  static Adjuster twfe() { return {AdjusterKind::twfe, {}}; }

  const char* label() const;
};

// Pre-treatment prediction errors for one unit, observed minus predicted,
// for t = 2..T-1 (length T-2). A 2-period panel yields an empty vector
// with the insufficient flag set instead of an error; rules that need
// residuals reject it downstream.
struct ResidualVector {
  std::string unit;
  std::vector<double> values;
  Adjuster adjuster;
  bool insufficient_pre_periods = false;
};

// Contrast code meaning "treated arm vs untreated arm on the coarsened
// indicator" rather than a specific version m.
inline constexpr int kCoarsenedContrast = -1;

// Unit-level difference-in-differences estimate. For a unit carrying the
// target code the point is Y_{i,T} - Yhat_{i,T}(0); for an untreated unit
// it is Yhat_{i,T}(m) - Y_{i,T}, so the sign always reads "effect of the
// policy relative to no policy".
struct UnitDidEstimate {
  std::string unit;
  int target_code = kCoarsenedContrast;
  double point = 0.0;
  double predicted_counterfactual = 0.0;
  ComparatorPool pool;
  Adjuster adjuster;
};

// Mean first difference at period t over the pool members: the
// finite-sample group trend B_m evaluated at t.
double group_trend(const Panel& panel, const ComparatorPool& pool, int t);

struct LinearTrendFit {
  double intercept = 0.0;
  std::vector<double> slopes;  // one per column, in column order
};

// OLS of the period-t first difference on an intercept plus the named
// numeric covariates, fit over the pool members. Solved by Householder
// QR. Requires pool size > #columns + 1.
LinearTrendFit fit_linear_trend_model(const Panel& panel,
                                      const ComparatorPool& pool, int t,
                                      const std::vector<std::string>& columns);

// Predicted counterfactual outcome for `unit` at period t (2..T), using
// the pool and adjuster. For the twfe adjuster the unit intercept
// averages pre-periods other than t itself, which makes pre-period
// predictions leave-one-out and reduces to the first-difference rule when
// only one pre-period is available (T = 2).
double impute_counterfactual(const Panel& panel, std::size_t unit,
                             const ComparatorPool& pool,
                             const Adjuster& adjuster, int t);

// Unit-level DiD estimate of the effect of `target_code` (or of the
// coarsened indicator when target_code == kCoarsenedContrast) versus no
// policy. The unit must sit on one side of the contrast and the pool on
// the other.
UnitDidEstimate unit_did(const Panel& panel, std::size_t unit, int target_code,
                         const Adjuster& adjuster, const ComparatorPool& pool);
UnitDidEstimate unit_did(const Panel& panel, std::string_view unit,
                         int target_code, const Adjuster& adjuster,
                         const ComparatorPool& pool);

// Observed-minus-predicted imputation errors at every pre-period that has
// a first difference, using the same pool and adjuster as the final
// period estimate.
ResidualVector pre_period_residuals(const Panel& panel, std::size_t unit,
                                    const Adjuster& adjuster,
                                    const ComparatorPool& pool);
ResidualVector pre_period_residuals(const Panel& panel, std::string_view unit,
                                    const Adjuster& adjuster,
                                    const ComparatorPool& pool);

}  // namespace policybound
