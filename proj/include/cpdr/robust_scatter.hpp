#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cpdr/types.hpp"

namespace cpdr {

enum class LocationMode { fixed_median, iterate };

struct ScatterOptions {
  double tol = 1e-8;       // relative Frobenius change threshold
  int max_iter = 500;
  LocationMode location_mode = LocationMode::fixed_median;
};

struct ScatterEstimate {
  Vector mu_hat;           // location estimate
  Matrix sigma_hat;        // symmetric positive-definite, trace = p
  Matrix sigma_inv_sqrt;   // symmetric inverse square root of sigma_hat
  int iterations_used = 0;
  double final_residual = 0.0;  // fixed-point residual at the returned estimate
};

// Thrown when the fixed-point iteration exhausts max_iter; carries the last
// iterate and its residual so callers can inspect or accept it explicitly.
struct ScatterNonConvergence : std::runtime_error {
  ScatterNonConvergence(Matrix last, double res)
      : std::runtime_error("scatter iteration did not converge"),
        last_iterate(std::move(last)),
        residual(res) {}
  Matrix last_iterate;
  double residual;
};

inline Vector coordinatewise_median(const Eigen::Ref<const Matrix>& X) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n == 0) throw std::invalid_argument("no samples");
  Vector med(p);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = X(i, j);
    const std::size_t h = col.size() / 2;
    std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(h), col.end());
    double m = col[h];
    if (n % 2 == 0) {
      // even count: average the two middle order statistics
      const double lo = *std::max_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(h));
      m = 0.5 * (lo + m);
    }
    med(j) = m;
  }
  return med;
}

inline Matrix symmetric_inverse_sqrt(const Eigen::Ref<const Matrix>& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("scatter numerically singular");
  const Vector& ev = es.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0) || ev(0) < 1e-12 * lmax)
    throw std::runtime_error("scatter numerically singular");
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

namespace detail {

// Overall magnitude of deviations from mu; reference scale for degeneracy checks.
inline double deviation_scale(const Matrix& U) {
  const double s = U.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

// Squared Mahalanobis norms ||u_i||^2_S via a Cholesky solve.
inline Vector mahalanobis_sq(const Matrix& U, const Matrix& S) {
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) throw std::runtime_error("scatter numerically singular");
  // rows of V solve L V^T = U^T, so ||V_i||^2 = u_i^T S^{-1} u_i
  Matrix V = llt.matrixL().solve(U.transpose());
  return V.colwise().squaredNorm();
}

// One fixed-point update: the weighted second-moment matrix rescaled to trace p.
inline Matrix scatter_update(const Matrix& U, const Vector& w2, Eigen::Index p) {
  Matrix C = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    C.noalias() += U.row(i).transpose() * U.row(i) / w2(i);
  C *= static_cast<double>(p) / C.trace();
  return C;
}

inline void check_not_degenerate(const Matrix& U) {
  const double thresh = 1e-12 * deviation_scale(U);
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    if (U.row(i).norm() < thresh)
      throw std::runtime_error("degenerate sample at location estimate");
}

}  // namespace detail

// Distribution-free M-estimator of scatter: iterate the trace-normalized
// weighted second-moment update until the relative Frobenius change of the
// scatter falls below tol. In iterate mode the location is refreshed after
// each scatter update as the inverse-distance weighted mean, using the new
// scatter for the distances; in fixed_median mode mu stays at its input value.
inline ScatterEstimate tyler_scatter(const Eigen::Ref<const Matrix>& X, const Vector& mu0,
                                     const ScatterOptions& opts = {},
                                     const Matrix& sigma0 = Matrix()) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n == 0) throw std::invalid_argument("no samples");
  if (opts.tol <= 0.0 || opts.max_iter < 1)
    throw std::invalid_argument("invalid scatter options");

  Vector mu = mu0;
  Matrix S = sigma0.size() > 0 ? Matrix(sigma0) : Matrix(Matrix::Identity(p, p));
  S *= static_cast<double>(p) / S.trace();

  Matrix U = X.rowwise() - mu.transpose();
  detail::check_not_degenerate(U);

  int used = 0;
  double rel = 0.0;
  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector w2 = detail::mahalanobis_sq(U, S);
    Matrix C = detail::scatter_update(U, w2, p);
    rel = (C - S).norm() / S.norm();
    S = std::move(C);
    used = it + 1;
    if (opts.location_mode == LocationMode::iterate) {
      const Vector w2n = detail::mahalanobis_sq(U, S);
      const Vector w = w2n.cwiseSqrt().cwiseInverse();
      mu = (X.transpose() * w) / w.sum();
      U = X.rowwise() - mu.transpose();
      detail::check_not_degenerate(U);
    }
    if (rel < opts.tol) {
      converged = true;
      break;
    }
  }

  // residual of the fixed-point equation at the returned (mu, S)
  const Vector w2 = detail::mahalanobis_sq(U, S);
  const Matrix rhs = detail::scatter_update(U, w2, p);
  const double residual = (S - rhs).norm() / S.norm();

  if (!converged) throw ScatterNonConvergence(S, residual);

  ScatterEstimate est;
  est.mu_hat = std::move(mu);
  est.sigma_hat = S;
  est.sigma_inv_sqrt = symmetric_inverse_sqrt(S);
  est.iterations_used = used;
  est.final_residual = residual;
  return est;
}

// Convenience: coordinatewise median location, then the scatter fixed point.
inline ScatterEstimate estimate_scatter(const Eigen::Ref<const Matrix>& X,
                                        const ScatterOptions& opts = {}) {
  return tyler_scatter(X, coordinatewise_median(X), opts);
}

}  // namespace cpdr
