#pragma once

#include <string>

#include "policybound/rng.hpp"

namespace policybound {

// Idiosyncratic error law for one treatment version. `none` is a point
// mass at zero, used by property tests that need exactly constant
// effects; `uniform` gives the bounded errors the worst-case half-width
// results assume.
struct ErrorLaw {
  enum class Family { centered_exponential, uniform, normal, none };
  Family family = Family::none;
  double a = 0.0;  // rate | lower | mean
  double b = 0.0;  //      | upper | sd

  static ErrorLaw centered_exponential(double rate);
  static ErrorLaw uniform(double lo, double hi);
  static ErrorLaw normal(double mean, double sd);
  static ErrorLaw none();

  double draw(Rng& rng) const;
};

// Parameters of the two-version linear potential-outcome model:
//   Y(0, x) = delta_t + alpha0 U + beta0 x + eps_0
//   Y(m, x) = Y(0, x) + delta_m + alpha_m U + beta_m x + eps_m,  m = 1, 2
// with (X, U) mean-zero bivariate normal and treatment assigned by
// probits Pr(A=1|x) = Phi(offset + x), Pr(M(1)=2|x) = Phi(x). Defaults
// carry the simulation parameterization.
struct DgpParams {
  double delta1 = 1.0;
  double delta2 = -1.5;
  double alpha0 = 0.5;
  double alpha1 = 1.0;
  double alpha2 = -1.5;
  double beta0 = 0.5;
  double beta1 = 1.0;
  double beta2 = -1.5;
  double sigma2_x = 1.0;
  double sigma2_u = 1.0;
  double sigma_xu = 0.125;
  double probit_offset = 0.0;  // sqrt(2) Phi^{-1}(2/3) in the defaults
  int periods = 10;            // treatment applies at the final period
  ErrorLaw base_error;         // eps_{it,0}
  ErrorLaw version1_error;     // eps_{iT,1}
  ErrorLaw version2_error;     // eps_{iT,2}

  // Reference simulation parameterization (sigma_xu = 1/8, centered
  // exponential errors, T = 10).
  static DgpParams simulation();
  // Same but sigma_xu = 1/4, used for the single illustration dataset.
  static DgpParams illustration();

  void validate() const;  // throws DomainError on an invalid covariance

  double delta(int m) const;
  double alpha(int m) const;
  double beta(int m) const;
  const ErrorLaw& version_error(int m) const;
};

// Controlled direct effect of version m at covariate value x:
// delta_m + beta_m x.
double version_cde(const DgpParams& params, int m, double x);

// Conditional average effect of version m at x:
// delta_m + (beta_m + alpha_m sigma_xu / sigma2_x) x.
double version_cate(const DgpParams& params, int m, double x);

// Pr(M(1) = m | x): Phi(x) for m = 2, its complement for m = 1.
double version_weight(const DgpParams& params, int m, double x);

enum class MixtureKind { cate, cde };

// Version-weighted average of the m-specific curves: the coarsened CATE
// or CDE at x.
double coarsened_mixture(const DgpParams& params, double x, MixtureKind kind);

struct LinearProjection {
  double intercept = 0.0;
  double slope = 0.0;
};

// Weighting for the least-squares projection of the coarsened mixture:
// against the marginal X ~ N(0, sigma2_x), or against the treated-arm
// X distribution (density proportional to Phi(offset + x) phi(x)), which
// is what the interacted OLS regression targets in large samples.
enum class ProjectionWeighting { marginal, treated_arm };

// Population least-squares line of the coarsened mixture, by
// Gauss-Hermite quadrature with the given node count.
LinearProjection projection_oracle(const DgpParams& params, MixtureKind kind,
                                   ProjectionWeighting weighting =
                                       ProjectionWeighting::marginal,
                                   int nodes = 64);

// Realized unit-level effect of version m: delta_m + alpha_m u + beta_m x
// + eps_m.
double unit_ite(const DgpParams& params, int m, double x, double u,
                double eps_m);

}  // namespace policybound
