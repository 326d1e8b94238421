#include "policybound/did.hpp"


#include "policybound/errors.hpp"
#include "policybound/ols.hpp"

namespace policybound {

const char* Adjuster::label() const {
  switch (kind) {
    case AdjusterKind::none:
      return "none";
    case AdjusterKind::discrete:
      return "discrete";
    case AdjusterKind::linear:
      return "linear";
    case AdjusterKind::twfe:
      return "twfe";
  }
  return "none";
}

double group_trend(const Panel& panel, const ComparatorPool& pool, int t) {
  if (pool.members.empty()) {
    throw EmptyPoolError("group_trend: empty comparator pool");
  }
  double sum = 0.0;
  for (std::size_t j : pool.members) {
    sum += first_difference(panel, j, t);
  }
  return sum / static_cast<double>(pool.members.size());
}

LinearTrendFit fit_linear_trend_model(const Panel& panel,
                                      const ComparatorPool& pool, int t,
                                      const std::vector<std::string>& columns) {
  const std::size_t n = pool.members.size();
  const std::size_t p = columns.size() + 1;
  if (n <= p) {
    throw DomainError(
        "fit_linear_trend_model: pool must be larger than #columns + 1");
  }
  for (const auto& name : columns) {
    if (!panel.covariate(name).numeric) {
      throw SchemaError("fit_linear_trend_model: column '" + name +
                        "' is categorical; the linear adjuster needs numeric "
                        "columns");
    }
  }
  Matrix x(n, p);
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t j = pool.members[r];
    x(r, 0) = 1.0;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      x(r, c + 1) = panel.numeric_covariate(j, columns[c]);
    }
    y[r] = first_difference(panel, j, t);
  }
  const LeastSquares fit = ols_qr(x, y);
  LinearTrendFit out;
  out.intercept = fit.coef[0];
  out.slopes.assign(fit.coef.begin() + 1, fit.coef.end());
  return out;
}

namespace {

// Exact-match refinement of a pool for the discrete adjuster.
ComparatorPool refine_pool(const Panel& panel, std::size_t unit,
                           const ComparatorPool& pool,
                           const std::vector<std::string>& columns) {
  ComparatorPool refined = pool;
  refined.members.clear();
  for (std::size_t j : pool.members) {
    if (panel.covariates_match(unit, j, columns)) {
      refined.members.push_back(j);
    }
  }
  for (const auto& c : columns) {
    refined.filter.push_back(c);
  }
  if (refined.members.empty()) {
    throw EmptyPoolError("discrete adjuster: no pool member matches " +
                         panel.units()[unit] + " exactly");
  }
  return refined;
}

double twfe_impute(const Panel& panel, std::size_t unit,
                   const ComparatorPool& pool, int t) {
  const int periods = panel.n_periods();
  // Pool period means play the role of the time effects.
  std::vector<double> lambda(static_cast<std::size_t>(periods));
  for (int s = 1; s <= periods; ++s) {
    double sum = 0.0;
    for (std::size_t j : pool.members) {
      sum += panel.outcome(j, s);
    }
    lambda[static_cast<std::size_t>(s - 1)] =
        sum / static_cast<double>(pool.members.size());
  }
  // Unit effect: mean of de-timed outcomes over pre-periods, skipping the
  // target period so pre-period predictions never see their own outcome.
  // For t in 2..T at least one pre-period always survives; with a single
  // pre-period this reduces to the first-difference rule.
  double mu = 0.0;
  int used = 0;
  for (int s = 1; s < periods; ++s) {
    if (s == t) {
      continue;
    }
    mu += panel.outcome(unit, s) - lambda[static_cast<std::size_t>(s - 1)];
    ++used;
  }
  return mu / used + lambda[static_cast<std::size_t>(t - 1)];
}

}  // namespace

double impute_counterfactual(const Panel& panel, std::size_t unit,
                             const ComparatorPool& pool,
                             const Adjuster& adjuster, int t) {
  if (t < 2 || t > panel.n_periods()) {
    throw DomainError("impute_counterfactual: t must lie in 2..T");
  }
  if (pool.members.empty()) {
    throw EmptyPoolError("impute_counterfactual: empty comparator pool");
  }
  switch (adjuster.kind) {
    case AdjusterKind::none:
      return panel.outcome(unit, t - 1) + group_trend(panel, pool, t);
    case AdjusterKind::discrete: {
      const ComparatorPool refined =
          refine_pool(panel, unit, pool, adjuster.columns);
      return panel.outcome(unit, t - 1) + group_trend(panel, refined, t);
    }
    case AdjusterKind::linear: {
      const LinearTrendFit fit =
          fit_linear_trend_model(panel, pool, t, adjuster.columns);
      double trend = fit.intercept;
      for (std::size_t c = 0; c < adjuster.columns.size(); ++c) {
        trend += fit.slopes[c] * panel.numeric_covariate(unit, adjuster.columns[c]);
      }
      return panel.outcome(unit, t - 1) + trend;
    }
    case AdjusterKind::twfe:
      return twfe_impute(panel, unit, pool, t);
  }
  throw DomainError("impute_counterfactual: unknown adjuster");
}

UnitDidEstimate unit_did(const Panel& panel, std::size_t unit, int target_code,
                         const Adjuster& adjuster, const ComparatorPool& pool) {
  const int periods = panel.n_periods();
  UnitDidEstimate est;
  est.unit = panel.units()[unit];
  est.target_code = target_code;
  est.pool = pool;
  est.adjuster = adjuster;

  bool unit_carries_target = false;
  if (target_code == kCoarsenedContrast) {
    unit_carries_target = panel.coarsened(unit) == 1;
    const int expected_pool =
        unit_carries_target ? 0 : kTreatedArmCode;
    if (pool.target_code != expected_pool) {
      throw DomainError("unit_did: pool must cover the opposite arm");
    }
  } else if (target_code <= 0) {
    throw DomainError("unit_did: versioned contrasts need a positive code");
  } else {
    const int own = panel.treatment_code(unit);
    if (own != 0 && own != target_code) {
      throw DomainError("unit_did: unit " + est.unit +
                        " carries code " + std::to_string(own) +
                        ", contrast needs 0 or " + std::to_string(target_code));
    }
    unit_carries_target = own == target_code && target_code != 0;
    const int expected_pool = unit_carries_target ? 0 : target_code;
    if (pool.target_code != expected_pool) {
      throw DomainError("unit_did: pool carries code " +
                        std::to_string(pool.target_code) + ", expected " +
                        std::to_string(expected_pool));
    }
  }

  est.predicted_counterfactual =
      impute_counterfactual(panel, unit, pool, adjuster, periods);
  const double observed = panel.outcome(unit, periods);
  est.point = unit_carries_target ? observed - est.predicted_counterfactual
                                  : est.predicted_counterfactual - observed;
  return est;
}

UnitDidEstimate unit_did(const Panel& panel, std::string_view unit,
                         int target_code, const Adjuster& adjuster,
                         const ComparatorPool& pool) {
  return unit_did(panel, panel.unit_index(unit), target_code, adjuster, pool);
}

ResidualVector pre_period_residuals(const Panel& panel, std::size_t unit,
                                    const Adjuster& adjuster,
                                    const ComparatorPool& pool) {
  ResidualVector res;
  res.unit = panel.units()[unit];
  res.adjuster = adjuster;
  const int periods = panel.n_periods();
  if (periods < 3) {
    res.insufficient_pre_periods = true;
    return res;
  }
  res.values.reserve(static_cast<std::size_t>(periods - 2));
  for (int t = 2; t <= periods - 1; ++t) {
    const double predicted =
        impute_counterfactual(panel, unit, pool, adjuster, t);
    res.values.push_back(panel.outcome(unit, t) - predicted);
  }
  return res;
}

ResidualVector pre_period_residuals(const Panel& panel, std::string_view unit,
                                    const Adjuster& adjuster,
                                    const ComparatorPool& pool) {
  return pre_period_residuals(panel, panel.unit_index(unit), adjuster, pool);
}

}  // namespace policybound
