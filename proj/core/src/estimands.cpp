#include "policybound/estimands.hpp"

#include <cmath>

#include "policybound/errors.hpp"
#include "policybound/normal.hpp"
#include "policybound/quadrature.hpp"

namespace policybound {

ErrorLaw ErrorLaw::centered_exponential(double rate) {
  if (rate <= 0.0) {
    throw DomainError("ErrorLaw: exponential rate must be positive");
  }
  return {Family::centered_exponential, rate, 0.0};
}

ErrorLaw ErrorLaw::uniform(double lo, double hi) {
  if (!(lo <= hi)) {
    throw DomainError("ErrorLaw: uniform bounds out of order");
  }
  return {Family::uniform, lo, hi};
}

ErrorLaw ErrorLaw::normal(double mean, double sd) {
  if (sd < 0.0) {
    throw DomainError("ErrorLaw: normal sd must be non-negative");
  }
  return {Family::normal, mean, sd};
}

ErrorLaw ErrorLaw::none() { return {Family::none, 0.0, 0.0}; }

double ErrorLaw::draw(Rng& rng) const {
  switch (family) {
    case Family::centered_exponential:
      return rng.exponential(a) - 1.0 / a;
    case Family::uniform:
      return rng.uniform(a, b);
    case Family::normal:
      return rng.normal(a, b);
    case Family::none:
      return 0.0;
  }
  return 0.0;
}

DgpParams DgpParams::simulation() {
  DgpParams p;
  p.probit_offset = std::sqrt(2.0) * norm_quantile(2.0 / 3.0);
  p.base_error = ErrorLaw::centered_exponential(1.0);
  p.version1_error = ErrorLaw::centered_exponential(1.5);
  p.version2_error = ErrorLaw::centered_exponential(1.5);
  p.validate();
  return p;
}

DgpParams DgpParams::illustration() {
  DgpParams p = simulation();
  p.sigma_xu = 0.25;
  p.validate();
  return p;
}

void DgpParams::validate() const {
  if (sigma2_x <= 0.0 || sigma2_u <= 0.0 ||
      sigma_xu * sigma_xu >= sigma2_x * sigma2_u) {
    throw DomainError("DgpParams: covariance of (X, U) is not positive "
                      "definite");
  }
  if (periods < 2) {
    throw DomainError("DgpParams: need at least two periods");
  }
}

double DgpParams::delta(int m) const {
  if (m == 1) {
    return delta1;
  }
  if (m == 2) {
    return delta2;
  }
  throw DomainError("version must be 1 or 2");
}

double DgpParams::alpha(int m) const {
  if (m == 1) {
    return alpha1;
  }
  if (m == 2) {
    return alpha2;
  }
  throw DomainError("version must be 1 or 2");
}

double DgpParams::beta(int m) const {
  if (m == 1) {
    return beta1;
  }
  if (m == 2) {
    return beta2;
  }
  throw DomainError("version must be 1 or 2");
}

const ErrorLaw& DgpParams::version_error(int m) const {
  if (m == 1) {
    return version1_error;
  }
  if (m == 2) {
    return version2_error;
  }
  throw DomainError("version must be 1 or 2");
}

double version_cde(const DgpParams& params, int m, double x) {
  return params.delta(m) + params.beta(m) * x;
}

double version_cate(const DgpParams& params, int m, double x) {
  const double slope =
      params.beta(m) + params.alpha(m) * params.sigma_xu / params.sigma2_x;
  return params.delta(m) + slope * x;
}

double version_weight(const DgpParams& params, int m, double x) {
  params.delta(m);  // validates m
  const double p2 = norm_cdf(x);
  return m == 2 ? p2 : 1.0 - p2;
}

double coarsened_mixture(const DgpParams& params, double x, MixtureKind kind) {
  double value = 0.0;
  for (int m = 1; m <= 2; ++m) {
    const double curve = kind == MixtureKind::cate
                             ? version_cate(params, m, x)
                             : version_cde(params, m, x);
    value += curve * version_weight(params, m, x);
  }
  return value;
}

LinearProjection projection_oracle(const DgpParams& params, MixtureKind kind,
                                   ProjectionWeighting weighting, int nodes) {
  const GaussHermite rule = gauss_hermite(nodes);
  const double sd = std::sqrt(params.sigma2_x);
  auto mix = [&](double x) { return coarsened_mixture(params, x, kind); };
  auto weight = [&](double x) {
    return weighting == ProjectionWeighting::marginal
               ? 1.0
               : norm_cdf(params.probit_offset + x);
  };
  // Weighted first and second moments of (1, X, f(X)) under the chosen
  // density; the least-squares line follows from them.
  const double w = normal_expectation(rule, weight, 0.0, sd);
  const double wx = normal_expectation(
      rule, [&](double x) { return weight(x) * x; }, 0.0, sd);
  const double wxx = normal_expectation(
      rule, [&](double x) { return weight(x) * x * x; }, 0.0, sd);
  const double wf = normal_expectation(
      rule, [&](double x) { return weight(x) * mix(x); }, 0.0, sd);
  const double wfx = normal_expectation(
      rule, [&](double x) { return weight(x) * mix(x) * x; }, 0.0, sd);

  const double mean_x = wx / w;
  const double var_x = wxx / w - mean_x * mean_x;
  const double mean_f = wf / w;
  const double cov_fx = wfx / w - mean_f * mean_x;

  LinearProjection line;
  line.slope = cov_fx / var_x;
  line.intercept = mean_f - line.slope * mean_x;
  return line;
}

double unit_ite(const DgpParams& params, int m, double x, double u,
                double eps_m) {
  return params.delta(m) + params.alpha(m) * u + params.beta(m) * x + eps_m;
}

}  // namespace policybound
