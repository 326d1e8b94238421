#include "policybound/ols.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "policybound/errors.hpp"

namespace policybound {

namespace {

// Back-substitution for R z = rhs with R upper triangular p x p.
std::vector<double> solve_upper(const Matrix& r, std::vector<double> rhs) {
  const std::size_t p = r.cols;
  for (std::size_t k = p; k-- > 0;) {
    for (std::size_t j = k + 1; j < p; ++j) {
      rhs[k] -= r(k, j) * rhs[j];
    }
    rhs[k] /= r(k, k);
  }
  return rhs;
}

}  // namespace

LeastSquares ols_qr(const Matrix& x, const std::vector<double>& y) {
  const std::size_t n = x.rows;
  const std::size_t p = x.cols;
  if (y.size() != n) {
    throw DomainError("ols_qr: y length does not match design rows");
  }
  if (n < p) {
    throw SingularDesignError("ols_qr: fewer rows than columns");
  }

  // Householder QR on a working copy of [X | y]; after the sweep, work
  // holds R in its upper p x p corner and Q'y in the last column.
  Matrix work(n, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      work(i, j) = x(i, j);
    }
    work(i, p) = y[i];
  }

  double max_diag = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      norm += work(i, k) * work(i, k);
    }
    norm = std::sqrt(norm);
    if (work(k, k) > 0.0) {
      norm = -norm;
    }
    const double alpha = norm;
    // Reflection v = column - alpha * e_k, applied to remaining columns.
    work(k, k) -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < n; ++i) {
      vnorm2 += work(i, k) * work(i, k);
    }
    if (vnorm2 > 0.0) {
      for (std::size_t j = k + 1; j <= p; ++j) {
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) {
          dot += work(i, k) * work(i, j);
        }
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < n; ++i) {
          work(i, j) -= scale * work(i, k);
        }
      }
    }
    work(k, k) = alpha;
    max_diag = std::max(max_diag, std::fabs(alpha));
  }

  // Rank check on the diagonal of R, relative to its largest entry.
  for (std::size_t k = 0; k < p; ++k) {
    if (std::fabs(work(k, k)) <= 1e-10 * std::max(max_diag, 1e-300)) {
      throw SingularDesignError("ols_qr: design matrix is rank deficient");
    }
  }

  Matrix r(p, p);
  std::vector<double> qty(p);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t j = k; j < p; ++j) {
      r(k, j) = work(k, j);
    }
    qty[k] = work(k, p);
  }

  LeastSquares fit;
  fit.n = n;
  fit.p = p;
  fit.coef = solve_upper(r, qty);

  // (X'X)^{-1} = R^{-1} R^{-T}: solve R columns of the identity.
  Matrix rinv(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> e(p, 0.0);
    e[j] = 1.0;
    const std::vector<double> col = solve_upper(r, std::move(e));
    for (std::size_t i = 0; i < p; ++i) {
      rinv(i, j) = col[i];
    }
  }
  fit.xtx_inv = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p; ++k) {
        s += rinv(i, k) * rinv(j, k);
      }
      fit.xtx_inv(i, j) = s;
    }
  }

  fit.fitted.resize(n);
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double yhat = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      yhat += x(i, j) * fit.coef[j];
    }
    fit.fitted[i] = yhat;
    fit.residuals[i] = y[i] - yhat;
  }
  return fit;
}

Matrix hc_covariance(const LeastSquares& fit, const Matrix& x) {
  const std::size_t n = fit.n;
  const std::size_t p = fit.p;
  if (n <= p) {
    throw DegenerateSubsetError("hc_covariance: no residual degrees of freedom");
  }
  Matrix meat(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    const double u2 = fit.residuals[i] * fit.residuals[i];
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        meat(a, b) += u2 * x(i, a) * x(i, b);
      }
    }
  }
  const double factor = static_cast<double>(n) / static_cast<double>(n - p);
  Matrix cov(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t d = 0; d < p; ++d) {
          s += fit.xtx_inv(a, c) * meat(c, d) * fit.xtx_inv(d, b);
        }
      }
      cov(a, b) = factor * s;
    }
  }
  return cov;
}

Matrix cluster_covariance(const LeastSquares& fit, const Matrix& x,
                          const std::vector<int>& cluster,
                          std::size_t params_absorbed) {
  const std::size_t n = fit.n;
  const std::size_t p = fit.p;
  if (cluster.size() != n) {
    throw DomainError("cluster_covariance: cluster length mismatch");
  }
  const std::set<int> ids(cluster.begin(), cluster.end());
  const std::size_t g = ids.size();
  const std::size_t p_full = p + params_absorbed;
  if (g < 2 || n <= p_full) {
    throw DegenerateSubsetError(
        "cluster_covariance: need at least two clusters and residual degrees "
        "of freedom");
  }

  Matrix meat(p, p);
  std::vector<double> score(p);
  for (int id : ids) {
    std::fill(score.begin(), score.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (cluster[i] != id) {
        continue;
      }
      for (std::size_t a = 0; a < p; ++a) {
        score[a] += x(i, a) * fit.residuals[i];
      }
    }
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        meat(a, b) += score[a] * score[b];
      }
    }
  }

  const double factor = (static_cast<double>(g) / (g - 1.0)) *
                        ((n - 1.0) / static_cast<double>(n - p_full));
  Matrix cov(p, p);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < p; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) {
        for (std::size_t d = 0; d < p; ++d) {
          s += fit.xtx_inv(a, c) * meat(c, d) * fit.xtx_inv(d, b);
        }
      }
      cov(a, b) = factor * s;
    }
  }
  return cov;
}

}  // namespace policybound
