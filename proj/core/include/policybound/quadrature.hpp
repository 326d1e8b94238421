#pragma once

#include <functional>
#include <vector>

namespace policybound {

// Gauss-Hermite rule: integrates f(t) exp(-t^2) dt over the real line as
// sum_i weights[i] * f(nodes[i]).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes and weights for the n-point rule, by Newton iteration on the
// orthonormal Hermite recurrence with the usual asymptotic initial
// guesses. Exact for polynomials of degree 2n - 1.
GaussHermite gauss_hermite(int n);

// E[f(X)] for X ~ N(mean, sd^2) via the change of variable x = mean +
// sqrt(2) sd t.
double normal_expectation(const GaussHermite& rule,
                          const std::function<double(double)>& f, double mean,
                          double sd);

}  // namespace policybound
