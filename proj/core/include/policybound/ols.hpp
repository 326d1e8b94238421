#pragma once

#include <cstddef>
#include <vector>

namespace policybound {

// Dense row-major matrix just big enough for the regressions in this
// library (designs stay narrow; n can be large).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }
};

// Ordinary least squares fit. xtx_inv is (X'X)^{-1}, recovered from the
// triangular factor, for sandwich covariances.
struct LeastSquares {
  std::vector<double> coef;
  Matrix xtx_inv;
  std::vector<double> fitted;
  std::vector<double> residuals;
  std::size_t n = 0;
  std::size_t p = 0;
};

// Solve min ||y - X b|| by Householder QR. Never forms the normal
// equations. Throws SingularDesignError if the design is rank deficient.
LeastSquares ols_qr(const Matrix& x, const std::vector<double>& y);

// Heteroskedasticity-robust covariance with the small-sample factor
// n / (n - p) applied to the plain sandwich.
Matrix hc_covariance(const LeastSquares& fit, const Matrix& x);

// Cluster-robust covariance (clusters given per row) with the factor
// G/(G-1) * (n-1)/(n-p). `params_absorbed` counts coefficients that were
// swept out before the fit (fixed effects), so p reflects the full model.
Matrix cluster_covariance(const LeastSquares& fit, const Matrix& x,
                          const std::vector<int>& cluster,
                          std::size_t params_absorbed = 0);

}  // namespace policybound
