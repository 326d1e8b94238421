#include "policybound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "policybound/csv.hpp"
#include "policybound/errors.hpp"

namespace policybound {

TauRule TauRule::norm_based(ResidualNorm norm, double z) {
  if (z < 0.0) {
    throw DomainError("TauRule: Z must be non-negative");
  }
  TauRule rule;
  rule.style = TauStyle::norm_based;
  rule.norm = norm;
  rule.z = z;
  return rule;
}

TauRule TauRule::last_plus_maxdiff(double z) {
  if (z < 0.0) {
    throw DomainError("TauRule: Z must be non-negative");
  }
  TauRule rule;
  rule.style = TauStyle::last_plus_maxdiff;
  rule.z = z;
  return rule;
}

TauRule TauRule::oracle() {
  TauRule rule;
  rule.style = TauStyle::oracle;
  return rule;
}

TauRule TauRule::fixed(double value) {
  if (value < 0.0) {
    throw DomainError("TauRule: fixed half-width must be non-negative");
  }
  TauRule rule;
  rule.style = TauStyle::fixed;
  rule.fixed_value = value;
  return rule;
}

namespace {

const char* norm_name(ResidualNorm norm) {
  switch (norm) {
    case ResidualNorm::l1_mean:
      return "l1_mean";
    case ResidualNorm::l2:
      return "l2";
    case ResidualNorm::linf:
      return "linf";
  }
  return "linf";
}

}  // namespace

std::string TauRule::label() const {
  switch (style) {
    case TauStyle::norm_based:
      return std::string(norm_name(norm)) + ":z=" + format_double(z);
    case TauStyle::last_plus_maxdiff:
      return "last_plus_maxdiff:z=" + format_double(z);
    case TauStyle::oracle:
      return "oracle";
    case TauStyle::fixed:
      return "fixed:" + format_double(fixed_value);
  }
  return "";
}

double residual_norm(const std::vector<double>& values, ResidualNorm norm) {
  if (values.empty()) {
    throw InsufficientPrePeriodError("residual_norm: empty residual vector");
  }
  switch (norm) {
    case ResidualNorm::l1_mean: {
      double sum = 0.0;
      for (double v : values) {
        sum += std::fabs(v);
      }
      return sum / static_cast<double>(values.size());
    }
    case ResidualNorm::l2: {
      double sum = 0.0;
      for (double v : values) {
        sum += v * v;
      }
      return std::sqrt(sum);
    }
    case ResidualNorm::linf: {
      double best = 0.0;
      for (double v : values) {
        best = std::max(best, std::fabs(v));
      }
      return best;
    }
  }
  return 0.0;
}

TauWidth tau_from_rule(const ResidualVector& residuals, const TauRule& rule) {
  TauWidth width;
  switch (rule.style) {
    case TauStyle::fixed:
      width.half_width = rule.fixed_value;
      return width;
    case TauStyle::oracle:
      throw DomainError(
          "tau_from_rule: oracle widths come from oracle_tau, not residuals");
    case TauStyle::norm_based:
      if (residuals.values.empty()) {
        throw InsufficientPrePeriodError(
            "tau_from_rule: unit " + residuals.unit +
            " has no pre-period residuals for a norm-based rule");
      }
      width.half_width = rule.z * residual_norm(residuals.values, rule.norm);
      return width;
    case TauStyle::last_plus_maxdiff: {
      if (residuals.values.size() < 2) {
        throw InsufficientPrePeriodError(
            "tau_from_rule: unit " + residuals.unit +
            " needs at least two pre-period residuals for last_plus_maxdiff");
      }
      double max_diff = 0.0;
      for (std::size_t i = 1; i < residuals.values.size(); ++i) {
        max_diff = std::max(
            max_diff,
            std::fabs(residuals.values[i] - residuals.values[i - 1]));
      }
      width.center_shift = -residuals.values.back();
      width.half_width = rule.z * max_diff;
      return width;
    }
  }
  return width;
}

double oracle_tau(double true_counterfactual, double predicted) {
  return std::fabs(predicted - true_counterfactual);
}

const char* sign_label(SignClass sign) {
  switch (sign) {
    case SignClass::strictly_positive:
      return "strictly_positive";
    case SignClass::strictly_negative:
      return "strictly_negative";
    case SignClass::indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

namespace {

SignClass classify(double lo, double hi) {
  if (lo > 0.0) {
    return SignClass::strictly_positive;
  }
  if (hi < 0.0) {
    return SignClass::strictly_negative;
  }
  return SignClass::indeterminate;
}

}  // namespace

BoundResult bound_interval(const UnitDidEstimate& estimate,
                           const TauWidth& tau, const TauRule& rule,
                           std::string strategy) {
  if (!std::isfinite(estimate.point) || !std::isfinite(tau.half_width) ||
      !std::isfinite(tau.center_shift)) {
    throw DomainError("bound_interval: non-finite inputs");
  }
  BoundResult out;
  out.unit = estimate.unit;
  out.point = estimate.point;
  out.tau = tau;
  out.lo = estimate.point + tau.center_shift - tau.half_width;
  out.hi = estimate.point + tau.center_shift + tau.half_width;
  out.sign = classify(out.lo, out.hi);
  out.rule = rule;
  out.strategy = std::move(strategy);
  return out;
}

double tipping_z(const UnitDidEstimate& estimate,
                 const ResidualVector& residuals, ResidualNorm norm) {
  const double scale = residual_norm(residuals.values, norm);
  if (scale == 0.0) {
    if (estimate.point == 0.0) {
      return 0.0;
    }
    return std::numeric_limits<double>::infinity();
  }
  return std::fabs(estimate.point) / scale;
}

BoundResult coarsened_bound(const Panel& panel, std::size_t unit,
                            const Adjuster& adjuster, const TauRule& rule,
                            const std::vector<std::string>& match_columns) {
  const ComparatorPool pool = opposite_arm_pool(panel, unit, match_columns);
  const UnitDidEstimate est =
      unit_did(panel, unit, kCoarsenedContrast, adjuster, pool);
  TauWidth width;
  if (rule.style == TauStyle::fixed) {
    width.half_width = rule.fixed_value;
  } else {
    const ResidualVector res =
        pre_period_residuals(panel, unit, adjuster, pool);
    width = tau_from_rule(res, rule);
  }
  return bound_interval(est, width, rule,
                        match_columns.empty() ? "standard" : "matched");
}

BoundResult coarsened_bound(const Panel& panel, std::string_view unit,
                            const Adjuster& adjuster, const TauRule& rule,
                            const std::vector<std::string>& match_columns) {
  return coarsened_bound(panel, panel.unit_index(unit), adjuster, rule,
                         match_columns);
}

CoarseningStrategy CoarseningStrategy::conservative(double inflation) {
  if (inflation < 0.0) {
    throw DomainError("CoarseningStrategy: inflation must be non-negative");
  }
  CoarseningStrategy s;
  s.kind = Kind::conservative;
  s.z_inflation = inflation;
  return s;
}

CoarseningStrategy CoarseningStrategy::assume_version(int m) {
  if (m <= 0) {
    throw DomainError("CoarseningStrategy: version must be positive");
  }
  CoarseningStrategy s;
  s.kind = Kind::assume_version;
  s.version = m;
  return s;
}

CoarseningStrategy CoarseningStrategy::union_over_versions() {
  CoarseningStrategy s;
  s.kind = Kind::union_over_versions;
  return s;
}

std::string CoarseningStrategy::label() const {
  switch (kind) {
    case Kind::conservative:
      return "conservative(" + format_double(z_inflation) + ")";
    case Kind::assume_version:
      return "assume_version(" + std::to_string(version) + ")";
    case Kind::union_over_versions:
      return "union_over_versions";
  }
  return "";
}

namespace {

// Bound an untreated unit against one assumed version: pool, point, and
// residuals all use the treated units carrying that version.
BoundResult version_bound(const Panel& panel, std::size_t unit, int m,
                          const TauRule& rule, const Adjuster& adjuster,
                          std::string strategy) {
  const ComparatorPool pool =
      comparator_pool(panel, panel.units()[unit], m, {});
  const UnitDidEstimate est = unit_did(panel, unit, m, adjuster, pool);
  TauWidth width;
  if (rule.style == TauStyle::fixed) {
    width.half_width = rule.fixed_value;
  } else {
    const ResidualVector res =
        pre_period_residuals(panel, unit, adjuster, pool);
    width = tau_from_rule(res, rule);
  }
  return bound_interval(est, width, rule, std::move(strategy));
}

TauRule inflate(const TauRule& rule, double factor) {
  TauRule out = rule;
  if (out.style == TauStyle::fixed) {
    out.fixed_value *= factor;
  } else {
    out.z *= factor;
  }
  return out;
}

}  // namespace

BoundResult coarsened_untreated_bound(const Panel& panel, std::size_t unit,
                                      const CoarseningStrategy& strategy,
                                      const TauRule& rule,
                                      const Adjuster& adjuster) {
  if (panel.coarsened(unit) != 0) {
    throw DomainError("coarsened_untreated_bound: unit " +
                      panel.units()[unit] + " is treated");
  }
  switch (strategy.kind) {
    case CoarseningStrategy::Kind::conservative: {
      BoundResult out = coarsened_bound(
          panel, unit, adjuster, inflate(rule, strategy.z_inflation));
      out.strategy = strategy.label();
      return out;
    }
    case CoarseningStrategy::Kind::assume_version: {
      if (panel.count_code(strategy.version) == 0) {
        throw StrategyError("assume_version: code " +
                            std::to_string(strategy.version) +
                            " is not observed among treated units");
      }
      return version_bound(panel, unit, strategy.version, rule, adjuster,
                           strategy.label());
    }
    case CoarseningStrategy::Kind::union_over_versions: {
      std::vector<std::pair<double, double>> parts;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (int m : panel.observed_codes()) {
        if (m <= 0) {
          continue;
        }
        const BoundResult piece =
            version_bound(panel, unit, m, rule, adjuster, strategy.label());
        parts.emplace_back(piece.lo, piece.hi);
        lo = std::min(lo, piece.lo);
        hi = std::max(hi, piece.hi);
      }
      if (parts.empty()) {
        throw StrategyError("union_over_versions: no treated versions observed");
      }
      // Reported as the convex hull; the raw per-version intervals stay in
      // components. The point is the standard coarsened DiD estimate, with
      // the shift/width pair chosen to reproduce the hull exactly.
      const ComparatorPool pool = opposite_arm_pool(panel, unit);
      const UnitDidEstimate est =
          unit_did(panel, unit, kCoarsenedContrast, adjuster, pool);
      BoundResult out;
      out.unit = est.unit;
      out.point = est.point;
      out.lo = lo;
      out.hi = hi;
      out.tau.half_width = 0.5 * (hi - lo);
      out.tau.center_shift = 0.5 * (hi + lo) - est.point;
      out.sign = classify(lo, hi);
      out.rule = rule;
      out.strategy = strategy.label();
      out.components = std::move(parts);
      return out;
    }
  }
  throw DomainError("coarsened_untreated_bound: unknown strategy");
}

BoundResult coarsened_untreated_bound(const Panel& panel, std::string_view unit,
                                      const CoarseningStrategy& strategy,
                                      const TauRule& rule,
                                      const Adjuster& adjuster) {
  return coarsened_untreated_bound(panel, panel.unit_index(unit), strategy,
                                   rule, adjuster);
}

RobustnessGrid robustness_grid(const Panel& panel, double z,
                               const std::vector<std::string>& history_columns) {
  for (const auto& name : history_columns) {
    panel.covariate(name);  // throws SchemaError when absent
  }
  if (panel.count_treated() == 0 ||
      panel.count_treated() == panel.n_units()) {
    throw DomainError("robustness_grid: need units in both arms");
  }

  RobustnessGrid grid;
  grid.z = z;
  const Adjuster models[2] = {Adjuster::none(), Adjuster::twfe()};
  const TauRule rules[2] = {TauRule::norm_based(ResidualNorm::linf, z),
                            TauRule::last_plus_maxdiff(z)};
  const char* model_tag[2] = {"fd", "twfe"};
  const char* rule_tag[2] = {"linf", "maxdiff"};
  const char* pool_tag[2] = {"all", "matched"};
  for (int s = 0; s < 8; ++s) {
    grid.spec_labels[s] = std::string(model_tag[s / 4]) + "_" +
                          rule_tag[(s / 2) % 2] + "_" + pool_tag[s % 2];
  }

  grid.rows.reserve(panel.n_units());
  for (std::size_t i = 0; i < panel.n_units(); ++i) {
    RobustnessRow row;
    row.unit = panel.units()[i];
    for (int s = 0; s < 8; ++s) {
      const Adjuster& adjuster = models[s / 4];
      const TauRule& rule = rules[(s / 2) % 2];
      const bool matched = (s % 2) == 1;
      GridCell cell;
      try {
        const BoundResult bound = coarsened_bound(
            panel, i, adjuster, rule,
            matched ? history_columns : std::vector<std::string>{});
        cell.evaluable = true;
        cell.sign = bound.sign;
      } catch (const EmptyPoolError&) {
        cell.evaluable = false;
      } catch (const InsufficientPrePeriodError&) {
        cell.evaluable = false;
      }
      if (cell.evaluable) {
        if (cell.sign == SignClass::strictly_positive) {
          ++row.positive_count;
        } else if (cell.sign == SignClass::strictly_negative) {
          ++row.negative_count;
        }
      }
      row.cells[static_cast<std::size_t>(s)] = cell;
    }
    grid.rows.push_back(std::move(row));
  }
  return grid;
}

double worst_case_halfwidth(double zeta, bool treated_arm, bool asymptotic) {
  if (zeta < 0.0) {
    throw DomainError("worst_case_halfwidth: zeta must be non-negative");
  }
  const double factor = treated_arm ? (asymptotic ? 1.0 : 2.0)
                                    : (asymptotic ? 2.0 : 4.0);
  return factor * zeta;
}

double shift_constant(double alpha, double gamma) {
  if (gamma < 0.0) {
    throw DomainError("shift_constant: gamma must be non-negative");
  }
  const double mean_term = (1.0 + alpha) * (1.0 + alpha);
  const double sd_term = (1.0 + std::sqrt(gamma)) * (1.0 + std::sqrt(gamma));
  return std::sqrt(std::max(mean_term, sd_term));
}

double tail_inflation(double c_eta) {
  if (c_eta < 0.0) {
    throw DomainError("tail_inflation: constant must be non-negative");
  }
  return std::sqrt(c_eta * c_eta + 1.0);
}

}  // namespace policybound
