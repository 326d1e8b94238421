#include "policybound/quadrature.hpp"

#include <cmath>

#include "policybound/errors.hpp"

namespace policybound {

GaussHermite gauss_hermite(int n) {
  if (n < 1) {
    throw DomainError("gauss_hermite: need at least one node");
  }
  constexpr double kTol = 1e-14;
  constexpr int kMaxIter = 100;
  constexpr double kPiQuarterInv = 0.7511255444649425;  // pi^(-1/4)

  GaussHermite rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  // Roots come in +/- pairs; solve for the positive half.
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    // Initial guesses: largest root from the asymptotic expansion, then
    // successive roots stepped off the previous ones.
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }

    double pp = 0.0;
    int iter = 0;
    for (; iter < kMaxIter; ++iter) {
      // Evaluate the orthonormal Hermite polynomial of degree n at z via
      // the three-term recurrence; pp is its derivative.
      double p1 = kPiQuarterInv;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double step = p1 / pp;
      z -= step;
      if (std::fabs(step) <= kTol) {
        break;
      }
    }
    if (iter >= kMaxIter) {
      throw DomainError("gauss_hermite: Newton iteration did not converge");
    }

    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) {
    rule.nodes[half - 1] = 0.0;  // center the odd node exactly
  }
  return rule;
}

double normal_expectation(const GaussHermite& rule,
                          const std::function<double(double)>& f, double mean,
                          double sd) {
  constexpr double kSqrtPiInv = 0.5641895835477562869;  // 1/sqrt(pi)
  const double scale = std::sqrt(2.0) * sd;
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mean + scale * rule.nodes[i]);
  }
  return kSqrtPiInv * sum;
}

}  // namespace policybound
