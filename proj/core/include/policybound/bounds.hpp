#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "policybound/did.hpp"
#include "policybound/panel.hpp"

namespace policybound {

enum class ResidualNorm { l1_mean, l2, linf };

// How the sensitivity half-width is produced from a unit's pre-period
// residuals (or, for oracle runs, from the known truth).
enum class TauStyle { norm_based, last_plus_maxdiff, oracle, fixed };

struct TauRule {
  TauStyle style = TauStyle::norm_based;
  ResidualNorm norm = ResidualNorm::linf;
  double z = 0.0;
  double fixed_value = 0.0;

  static TauRule norm_based(ResidualNorm norm, double z);
  static TauRule last_plus_maxdiff(double z);
  static TauRule oracle();
  static TauRule fixed(double value);

  std::string label() const;
};

// Output of a tau rule: a symmetric half-width around a possibly shifted
// center. Symmetric rules keep center_shift at zero; the
// last-plus-maxdiff rule recenters by minus the final pre-period residual
// and widens by Z times the largest consecutive change in residuals.
struct TauWidth {
  double center_shift = 0.0;
  double half_width = 0.0;
};

// l1_mean: mean absolute entry; l2: Euclidean norm; linf: max absolute.
double residual_norm(const std::vector<double>& values, ResidualNorm norm);

// Evaluate the rule on a residual vector. Styles that read residuals
// throw InsufficientPrePeriodError when too few are available.
TauWidth tau_from_rule(const ResidualVector& residuals, const TauRule& rule);

// The infeasible smallest valid half-width |predicted - true|, available
// only when the true counterfactual is known (simulation).
double oracle_tau(double true_counterfactual, double predicted);

enum class SignClass { strictly_positive, strictly_negative, indeterminate };

const char* sign_label(SignClass sign);

// Bound on one unit's effect: interval, strict-sign classification, and
// the rule and strategy that produced it. components carries the per-
// version intervals when the interval is a union hull.
struct BoundResult {
  std::string unit;
  double point = 0.0;
  TauWidth tau;
  double lo = 0.0;
  double hi = 0.0;
  SignClass sign = SignClass::indeterminate;
  TauRule rule;
  std::string strategy = "standard";
  std::vector<std::pair<double, double>> components;
};

// [point + shift - hw, point + shift + hw]; endpoints exactly at zero
// classify as indeterminate.
BoundResult bound_interval(const UnitDidEstimate& estimate,
                           const TauWidth& tau, const TauRule& rule,
                           std::string strategy = "standard");

// Smallest Z at which the symmetric norm-based interval touches zero:
// |point| / ||residuals||. Returns +infinity when the norm is zero and
// the point is not.
double tipping_z(const UnitDidEstimate& estimate,
                 const ResidualVector& residuals, ResidualNorm norm);

// Full per-unit pipeline on the coarsened contrast: opposite-arm pool
// (optionally covariate-matched), unit DiD point, pre-period residuals,
// rule, interval.
BoundResult coarsened_bound(const Panel& panel, std::size_t unit,
                            const Adjuster& adjuster, const TauRule& rule,
                            const std::vector<std::string>& match_columns = {});
BoundResult coarsened_bound(const Panel& panel, std::string_view unit,
                            const Adjuster& adjuster, const TauRule& rule,
                            const std::vector<std::string>& match_columns = {});

// How an untreated unit's bound handles not knowing which treatment
// version it would adopt.
struct CoarseningStrategy {
  enum class Kind { conservative, assume_version, union_over_versions };
  Kind kind = Kind::conservative;
  double z_inflation = 1.0;  // conservative only
  int version = 0;           // assume_version only

  static CoarseningStrategy conservative(double inflation);
  static CoarseningStrategy assume_version(int m);
  static CoarseningStrategy union_over_versions();

  std::string label() const;
};

// Bound for an untreated unit under the chosen coarsening strategy:
// conservative inflates the rule's multiplier; assume_version restricts
// the pool to treated units with M = m; union_over_versions reports the
// convex hull over the observed versions and keeps the raw per-version
// intervals in components.
BoundResult coarsened_untreated_bound(const Panel& panel, std::size_t unit,
                                      const CoarseningStrategy& strategy,
                                      const TauRule& rule,
                                      const Adjuster& adjuster);
BoundResult coarsened_untreated_bound(const Panel& panel, std::string_view unit,
                                      const CoarseningStrategy& strategy,
                                      const TauRule& rule,
                                      const Adjuster& adjuster);

// One cell of the eight-specification robustness grid; not-evaluable
// cells (empty matched pool, too few residuals) are excluded from counts.
struct GridCell {
  bool evaluable = false;
  SignClass sign = SignClass::indeterminate;
};

struct RobustnessRow {
  std::string unit;
  std::array<GridCell, 8> cells;
  int negative_count = 0;
  int positive_count = 0;
};

struct RobustnessGrid {
  double z = 0.0;
  std::array<std::string, 8> spec_labels;
  std::vector<RobustnessRow> rows;  // canonical panel unit order
};

// {first differences, twfe} x {Linf norm, last-plus-maxdiff} x {all
// comparators, comparators matched on the history columns}, evaluated on
// the coarsened contrast at multiplier z. Deterministic given the panel.
RobustnessGrid robustness_grid(const Panel& panel, double z,
                               const std::vector<std::string>& history_columns);

// Worst-case half-widths under errors bounded by zeta: 2 zeta for treated
// units and 4 zeta for untreated units; halved when the arm-mean error
// terms vanish asymptotically.
double worst_case_halfwidth(double zeta, bool treated_arm, bool asymptotic);

// sqrt(max{(1 + alpha)^2, (1 + sqrt(gamma))^2}): the factor relating the
// untreated-arm multiplier to the treated-arm one under mean scaling
// alpha and variance scaling gamma.
double shift_constant(double alpha, double gamma);

// sqrt(C_eta^2 + 1): tail constant for bounds built from a known
// second-moment bound.
double tail_inflation(double c_eta);

}  // namespace policybound
