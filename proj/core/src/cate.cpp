#include "policybound/cate.hpp"

#include <cmath>
#include <numeric>

#include "policybound/errors.hpp"
#include "policybound/normal.hpp"
#include "policybound/ols.hpp"

namespace policybound {

CateFit fit_cate_projection(const Panel& panel, std::string_view x_column) {
  const std::size_t n = panel.n_units();
  const int periods = panel.n_periods();
  std::size_t treated = panel.count_treated();
  if (treated < 3 || n - treated < 3) {
    throw DegenerateSubsetError(
        "fit_cate_projection: need at least three units in each arm");
  }

  Matrix x(n, 4);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = panel.coarsened(i);
    const double xi = panel.numeric_covariate(i, x_column);
    x(i, 0) = 1.0;
    x(i, 1) = a;
    x(i, 2) = xi;
    x(i, 3) = a * xi;
    y[i] = panel.outcome(i, periods) - panel.outcome(i, periods - 1);
  }

  const LeastSquares ls = ols_qr(x, y);
  const Matrix cov = hc_covariance(ls, x);

  CateFit fit;
  fit.n = n;
  for (std::size_t j = 0; j < 4; ++j) {
    fit.coef[j] = ls.coef[j];
    for (std::size_t k = 0; k < 4; ++k) {
      fit.covariance[j * 4 + k] = cov(j, k);
    }
  }
  return fit;
}

Interval cate_interval(const CateFit& fit, double x, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw DomainError("cate_interval: level must lie in (0, 1)");
  }
  const double point = fit.coef[1] + fit.coef[3] * x;
  // var(b_A + x b_AX) from the (treated, treated_x) block.
  const double var = fit.covariance[1 * 4 + 1] +
                     x * x * fit.covariance[3 * 4 + 3] +
                     2.0 * x * fit.covariance[1 * 4 + 3];
  const double se = std::sqrt(std::max(var, 0.0));
  const double crit = norm_critical_value(level);
  return {point, point - crit * se, point + crit * se};
}

TwfeAte twfe_ate(const Panel& panel, const std::vector<std::size_t>& subset) {
  const int periods = panel.n_periods();
  const std::size_t n_units = subset.size();
  std::size_t n_treated = 0;
  for (std::size_t i : subset) {
    n_treated += panel.coarsened(i) == 1;
  }
  if (n_units < 2 || n_treated == 0 || n_treated == n_units) {
    throw DegenerateSubsetError(
        "twfe_ate: subset needs at least one treated and one control unit");
  }

  // Two-way within transformation on the balanced subset. The treatment
  // regressor is A_i * 1(t = T).
  const std::size_t t_count = static_cast<std::size_t>(periods);
  const std::size_t n_obs = n_units * t_count;
  std::vector<double> y(n_obs);
  std::vector<double> d(n_obs);
  for (std::size_t r = 0; r < n_units; ++r) {
    const std::size_t i = subset[r];
    for (std::size_t t = 0; t < t_count; ++t) {
      y[r * t_count + t] = panel.outcome(i, static_cast<int>(t) + 1);
      d[r * t_count + t] =
          (panel.coarsened(i) == 1 && t + 1 == t_count) ? 1.0 : 0.0;
    }
  }
  auto demean_two_way = [&](std::vector<double>& v) {
    std::vector<double> unit_mean(n_units, 0.0);
    std::vector<double> time_mean(t_count, 0.0);
    double grand = 0.0;
    for (std::size_t r = 0; r < n_units; ++r) {
      for (std::size_t t = 0; t < t_count; ++t) {
        const double val = v[r * t_count + t];
        unit_mean[r] += val;
        time_mean[t] += val;
        grand += val;
      }
    }
    for (auto& m : unit_mean) {
      m /= static_cast<double>(t_count);
    }
    for (auto& m : time_mean) {
      m /= static_cast<double>(n_units);
    }
    grand /= static_cast<double>(n_obs);
    for (std::size_t r = 0; r < n_units; ++r) {
      for (std::size_t t = 0; t < t_count; ++t) {
        v[r * t_count + t] -= unit_mean[r] + time_mean[t] - grand;
      }
    }
  };
  demean_two_way(y);
  demean_two_way(d);

  double dd = 0.0;
  double dy = 0.0;
  for (std::size_t k = 0; k < n_obs; ++k) {
    dd += d[k] * d[k];
    dy += d[k] * y[k];
  }
  if (dd <= 0.0) {
    throw DegenerateSubsetError("twfe_ate: treatment regressor has no variation");
  }

  TwfeAte out;
  out.estimate = dy / dd;
  out.n_units = n_units;
  out.n_treated = n_treated;

  if (n_treated < 2 || n_units - n_treated < 2) {
    return out;  // saturated or near-saturated: no standard error
  }

  // Cluster-robust variance by unit on the within residuals, with the
  // full-model parameter count (unit effects, time effects, treatment).
  const std::size_t p_full = n_units + t_count;
  if (n_obs <= p_full) {
    return out;
  }
  double meat = 0.0;
  for (std::size_t r = 0; r < n_units; ++r) {
    double score = 0.0;
    for (std::size_t t = 0; t < t_count; ++t) {
      const std::size_t k = r * t_count + t;
      score += d[k] * (y[k] - out.estimate * d[k]);
    }
    meat += score * score;
  }
  const double g = static_cast<double>(n_units);
  const double factor =
      (g / (g - 1.0)) *
      ((static_cast<double>(n_obs) - 1.0) /
       static_cast<double>(n_obs - p_full));
  const double var = factor * meat / (dd * dd);
  const double se = std::sqrt(var);
  const double crit = norm_critical_value(0.95);
  out.std_error = se;
  out.ci = Interval{out.estimate, out.estimate - crit * se,
                    out.estimate + crit * se};
  return out;
}

TwfeAte twfe_ate(const Panel& panel) {
  std::vector<std::size_t> all(panel.n_units());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return twfe_ate(panel, all);
}

}  // namespace policybound
