#include <doctest.h>

#include <cmath>

#include "policybound/errors.hpp"
#include "policybound/estimands.hpp"
#include "policybound/normal.hpp"
#include "policybound/quadrature.hpp"
#include "policybound/rng.hpp"

using namespace policybound;

TEST_CASE("version-specific direct effects") {
  const DgpParams p = DgpParams::simulation();
  CHECK(version_cde(p, 1, 0.0) == doctest::Approx(1.0));
  CHECK(version_cde(p, 2, 0.0) == doctest::Approx(-1.5));
  CHECK(version_cde(p, 1, 1.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(version_cde(p, 3, 0.0), DomainError);
}

TEST_CASE("version-specific conditional effects carry the confounding slope") {
  DgpParams p = DgpParams::simulation();
  CHECK(version_cate(p, 1, 1.0) == doctest::Approx(1.0 + 1.125));
  CHECK(version_cate(p, 2, 1.0) == doctest::Approx(-1.5 - 1.6875));

  p.sigma_xu = 0.0;
  for (double x = -2.0; x <= 2.0; x += 0.5) {
    CHECK(version_cate(p, 1, x) == doctest::Approx(version_cde(p, 1, x)));
    CHECK(version_cate(p, 2, x) == doctest::Approx(version_cde(p, 2, x)));
  }
}

TEST_CASE("intercepts coincide at x = 0 for any parameterization") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    DgpParams p = DgpParams::simulation();
    p.delta1 = rng.normal();
    p.delta2 = rng.normal();
    p.alpha1 = rng.normal();
    p.alpha2 = rng.normal();
    p.beta1 = rng.normal();
    p.beta2 = rng.normal();
    p.sigma_xu = 0.4 * rng.uniform();
    CHECK(version_cate(p, 1, 0.0) == doctest::Approx(p.delta1));
    CHECK(version_cde(p, 1, 0.0) == doctest::Approx(p.delta1));
    CHECK(version_cate(p, 2, 0.0) == doctest::Approx(p.delta2));
    CHECK(version_cde(p, 2, 0.0) == doctest::Approx(p.delta2));
  }
}

TEST_CASE("version weights are probit probabilities") {
  const DgpParams p = DgpParams::simulation();
  CHECK(version_weight(p, 1, 0.0) == doctest::Approx(0.5));
  CHECK(version_weight(p, 2, 0.0) == doctest::Approx(0.5));
  CHECK(std::fabs(version_weight(p, 2, 1.0) - 0.841344746068543) < 1e-9);
  CHECK(version_weight(p, 2, 40.0) == doctest::Approx(1.0));
  CHECK(version_weight(p, 1, 40.0) == doctest::Approx(0.0));
}

TEST_CASE("coarsened mixture") {
  const DgpParams p = DgpParams::simulation();
  CHECK(coarsened_mixture(p, 0.0, MixtureKind::cate) ==
        doctest::Approx(-0.25));
  CHECK(coarsened_mixture(p, 0.0, MixtureKind::cde) == doctest::Approx(-0.25));

  SUBCASE("no confounding collapses cate onto cde") {
    DgpParams q = p;
    q.sigma_xu = 0.0;
    for (double x = -3.0; x <= 3.0; x += 0.25) {
      CHECK(coarsened_mixture(q, x, MixtureKind::cate) ==
            doctest::Approx(coarsened_mixture(q, x, MixtureKind::cde)));
    }
  }
  SUBCASE("extreme x collapses onto the dominant version") {
    // The minority term is Phi(-|x|) times the gap between the version
    // curves: about 2e-8 at |x| = 6 and 3e-11 at |x| = 7.
    CHECK(std::fabs(coarsened_mixture(p, 6.0, MixtureKind::cate) -
                    version_cate(p, 2, 6.0)) < 1e-7);
    CHECK(std::fabs(coarsened_mixture(p, -6.0, MixtureKind::cate) -
                    version_cate(p, 1, -6.0)) < 1e-7);
    CHECK(std::fabs(coarsened_mixture(p, 7.0, MixtureKind::cate) -
                    version_cate(p, 2, 7.0)) < 1e-8);
    CHECK(std::fabs(coarsened_mixture(p, -7.0, MixtureKind::cate) -
                    version_cate(p, 1, -7.0)) < 1e-8);
  }
  SUBCASE("hump shape: rising left of zero, falling right of zero") {
    const double h = 1e-5;
    const double d_left =
        (coarsened_mixture(p, -1.0 + h, MixtureKind::cate) -
         coarsened_mixture(p, -1.0 - h, MixtureKind::cate)) /
        (2.0 * h);
    const double d_right =
        (coarsened_mixture(p, 1.0 + h, MixtureKind::cate) -
         coarsened_mixture(p, 1.0 - h, MixtureKind::cate)) /
        (2.0 * h);
    CHECK(d_left > 0.0);
    CHECK(d_right < 0.0);
  }
}

TEST_CASE("projection oracle recovers exact lines") {
  DgpParams p = DgpParams::simulation();
  p.delta2 = p.delta1 = 0.8;
  p.beta2 = p.beta1 = -0.6;
  p.alpha1 = p.alpha2 = 0.0;
  p.sigma_xu = 0.0;
  // Both versions share the same line, so the mixture is that line.
  const LinearProjection line = projection_oracle(p, MixtureKind::cate);
  CHECK(line.intercept == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(line.slope == doctest::Approx(-0.6).epsilon(1e-8));
}

TEST_CASE("projection oracle agrees with monte carlo on a symmetric model") {
  DgpParams p = DgpParams::simulation();
  p.delta1 = 0.9;
  p.delta2 = -0.9;
  p.beta1 = 0.7;
  p.beta2 = -0.7;
  p.alpha1 = p.alpha2 = 0.0;
  p.sigma_xu = 0.0;
  const LinearProjection line = projection_oracle(p, MixtureKind::cate);

  const GaussHermite rule = gauss_hermite(64);
  const double mean_mix = normal_expectation(
      rule, [&](double x) { return coarsened_mixture(p, x, MixtureKind::cate); },
      0.0, std::sqrt(p.sigma2_x));

  Rng rng(271828);
  const int n = 10000000;
  double sum_f = 0.0;
  double sum_fx = 0.0;
  double sum_x2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    const double f = coarsened_mixture(p, x, MixtureKind::cate);
    sum_f += f;
    sum_fx += f * x;
    sum_x2 += x * x;
  }
  const double mc_mean = sum_f / n;
  const double mc_slope = sum_fx / sum_x2;
  CHECK(std::fabs(mean_mix - mc_mean) < 0.002);
  CHECK(std::fabs(line.slope - mc_slope) < 0.002);
  // With E[X] = 0 the intercept is the mean of the mixture.
  CHECK(line.intercept == doctest::Approx(mean_mix).epsilon(1e-8));
}

TEST_CASE("projection of the simulation mixture slopes downward") {
  const DgpParams p = DgpParams::simulation();
  const LinearProjection line = projection_oracle(p, MixtureKind::cate);
  CHECK(line.slope < 0.0);
  // Doubling the node count does not move the projection.
  const LinearProjection fine =
      projection_oracle(p, MixtureKind::cate, ProjectionWeighting::marginal,
                        128);
  CHECK(std::fabs(line.intercept - fine.intercept) < 1e-8);
  CHECK(std::fabs(line.slope - fine.slope) < 1e-8);

  // Dual-method check of the mean coarsened effect: quadrature vs draws.
  const GaussHermite rule = gauss_hermite(64);
  const double quad_mean = normal_expectation(
      rule, [&](double x) { return coarsened_mixture(p, x, MixtureKind::cate); },
      0.0, std::sqrt(p.sigma2_x));
  Rng rng(161803);
  const int n = 10000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += coarsened_mixture(p, rng.normal(), MixtureKind::cate);
  }
  CHECK(std::fabs(quad_mean - sum / n) < 0.002);
}

TEST_CASE("treated-arm weighting shifts the projection") {
  const DgpParams p = DgpParams::simulation();
  const LinearProjection marginal = projection_oracle(p, MixtureKind::cate);
  const LinearProjection treated = projection_oracle(
      p, MixtureKind::cate, ProjectionWeighting::treated_arm);
  // The treated arm overweights large x, where the mixture slopes down.
  CHECK(treated.slope < marginal.slope);
}

TEST_CASE("unit effects") {
  const DgpParams p = DgpParams::simulation();
  CHECK(unit_ite(p, 1, 0.4, 0.0, 0.0) ==
        doctest::Approx(version_cde(p, 1, 0.4)));
  CHECK(unit_ite(p, 1, 1.0, 1.0, 0.5) == doctest::Approx(3.5));

  // Averaging over (U | X = x) and the error law recovers the CATE.
  const double x = 0.8;
  const double mean_u = p.sigma_xu / p.sigma2_x * x;
  const double sd_u =
      std::sqrt(p.sigma2_u - p.sigma_xu * p.sigma_xu / p.sigma2_x);
  Rng rng(999);
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = mean_u + sd_u * rng.normal();
    const double eps = p.version1_error.draw(rng);
    sum += unit_ite(p, 1, x, u, eps);
  }
  CHECK(std::fabs(sum / n - version_cate(p, 1, x)) < 0.01);
}

TEST_CASE("dgp parameter validation") {
  DgpParams p = DgpParams::simulation();
  p.sigma_xu = 1.5;  // breaks positive definiteness with unit variances
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK(DgpParams::illustration().sigma_xu == doctest::Approx(0.25));
  CHECK(DgpParams::simulation().probit_offset ==
        doctest::Approx(std::sqrt(2.0) * norm_quantile(2.0 / 3.0)));
}

TEST_CASE("error law draws are centered") {
  Rng rng(123);
  const ErrorLaw law = ErrorLaw::centered_exponential(1.5);
  double sum = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    sum += law.draw(rng);
  }
  CHECK(std::fabs(sum / n) < 0.005);
  const ErrorLaw u = ErrorLaw::uniform(-0.5, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.draw(rng);
    CHECK(v >= -0.5);
    CHECK(v <= 0.5);
  }
  CHECK(ErrorLaw::none().draw(rng) == 0.0);
  CHECK_THROWS_AS(ErrorLaw::centered_exponential(0.0), DomainError);
  CHECK_THROWS_AS(ErrorLaw::uniform(1.0, -1.0), DomainError);
}
