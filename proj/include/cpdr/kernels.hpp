#pragma once

#include <stdexcept>
#include <vector>

#include "cpdr/projection.hpp"
#include "cpdr/robust_scatter.hpp"
#include "cpdr/slicing.hpp"
#include "cpdr/types.hpp"

namespace cpdr {

struct SliceMoments {
  Vector p_hat;                // slice proportions, sums to 1
  std::vector<Vector> m_hat;   // per-slice means of the projected predictors
  std::vector<Matrix> S_hat;   // per-slice raw second moments (trace 1 each)
  Vector tau_hat;              // median eigenvalue of each S_hat

  int K() const { return static_cast<int>(p_hat.size()); }
  int dim() const { return m_hat.empty() ? 0 : static_cast<int>(m_hat.front().size()); }
};

struct KernelMatrix {
  Matrix M;       // symmetric positive semidefinite
  Method method;
};

inline double median_of_eigenvalues(const Eigen::Ref<const Matrix>& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();  // ascending
  const Eigen::Index p = ev.size();
  const Eigen::Index mid = p / 2;
  return (p % 2 == 1) ? ev(mid) : 0.5 * (ev(mid - 1) + ev(mid));
}

// Plug-in per-slice moments of the projected predictors: proportions, means,
// raw second moments (no mean subtraction), and the median-eigenvalue level.
inline SliceMoments slice_moments(const ProjectedSample& proj, const SliceAssignment& slices) {
  const Eigen::Index n = proj.X_proj.rows(), p = proj.X_proj.cols();
  const int K = slices.K;
  for (int c : slices.counts)
    if (c < 2) throw std::invalid_argument("slice too small");

  SliceMoments m;
  m.p_hat = Vector::Zero(K);
  m.tau_hat = Vector::Zero(K);
  m.m_hat.assign(static_cast<std::size_t>(K), Vector::Zero(p));
  m.S_hat.assign(static_cast<std::size_t>(K), Matrix::Zero(p, p));

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(slices.labels[static_cast<std::size_t>(i)] - 1);
    m.m_hat[k] += proj.X_proj.row(i).transpose();
    m.S_hat[k].noalias() += proj.X_proj.row(i).transpose() * proj.X_proj.row(i);
  }
  for (int k = 0; k < K; ++k) {
    const double nk = slices.counts[static_cast<std::size_t>(k)];
    m.p_hat(k) = nk / static_cast<double>(n);
    m.m_hat[static_cast<std::size_t>(k)] /= nk;
    m.S_hat[static_cast<std::size_t>(k)] /= nk;
    m.tau_hat(k) = median_of_eigenvalues(m.S_hat[static_cast<std::size_t>(k)]);
  }
  return m;
}

namespace detail {
inline Matrix symmetrized(Matrix M) { return 0.5 * (M + M.transpose()).eval(); }
}  // namespace detail

// First-moment kernel: weighted outer products of the slice means.
inline KernelMatrix kernel_cp_sir(const SliceMoments& m) {
  const int p = m.dim();
  Matrix M = Matrix::Zero(p, p);
  for (int k = 0; k < m.K(); ++k) {
    const Vector& mk = m.m_hat[static_cast<std::size_t>(k)];
    M.noalias() += m.p_hat(k) * mk * mk.transpose();
  }
  return {detail::symmetrized(std::move(M)), Method::cp_sir};
}

// Second-moment kernel: weighted squares of (tau_k I - S_k).
inline KernelMatrix kernel_cp_save(const SliceMoments& m) {
  const int p = m.dim();
  const Matrix I = Matrix::Identity(p, p);
  Matrix M = Matrix::Zero(p, p);
  for (int k = 0; k < m.K(); ++k) {
    const Matrix H = m.tau_hat(k) * I - m.S_hat[static_cast<std::size_t>(k)];
    M.noalias() += m.p_hat(k) * H * H;
  }
  return {detail::symmetrized(std::move(M)), Method::cp_save};
}

// Directional-regression kernel, single pass over slices. This is the exact
// expansion of the pairwise double sum computed by kernel_dr_pairwise — the
// two agree to floating-point roundoff on any input — evaluated in O(K)
// matrix work instead of O(K^2).
inline KernelMatrix kernel_cp_dr(const SliceMoments& m) {
  const int p = m.dim();
  const int K = m.K();
  const Matrix I = Matrix::Identity(p, p);

  Matrix sum_pH2 = Matrix::Zero(p, p);  // sum_k p_k H_k^2 with H_k = tau_k I - S_k
  Matrix Hbar = Matrix::Zero(p, p);     // sum_k p_k H_k
  Vector mbar = Vector::Zero(p);        // sum_k p_k m_k
  Vector ubar = Vector::Zero(p);        // sum_k p_k H_k m_k
  Matrix M1 = Matrix::Zero(p, p);       // sum_k p_k m_k m_k^T
  double s = 0.0;                       // sum_k p_k |m_k|^2
  std::vector<Matrix> H(static_cast<std::size_t>(K));

  for (int k = 0; k < K; ++k) {
    const double pk = m.p_hat(k);
    const Vector& mk = m.m_hat[static_cast<std::size_t>(k)];
    Matrix& Hk = H[static_cast<std::size_t>(k)];
    Hk = m.tau_hat(k) * I - m.S_hat[static_cast<std::size_t>(k)];
    sum_pH2.noalias() += pk * Hk * Hk;
    Hbar.noalias() += pk * Hk;
    mbar.noalias() += pk * mk;
    ubar.noalias() += pk * (Hk * mk);
    M1.noalias() += pk * mk * mk.transpose();
    s += pk * mk.squaredNorm();
  }

  Matrix V = Matrix::Zero(p, p);  // sum_k p_k (H_k mbar) m_k^T
  for (int k = 0; k < K; ++k) {
    const Vector Hm = H[static_cast<std::size_t>(k)] * mbar;
    V.noalias() += m.p_hat(k) * Hm * m.m_hat[static_cast<std::size_t>(k)].transpose();
  }

  Matrix M = 2.0 * (sum_pH2 + Hbar * Hbar + ubar * mbar.transpose() + mbar * ubar.transpose() +
                    V + V.transpose() + M1 * M1 + s * M1);
  return {detail::symmetrized(std::move(M)), Method::cp_dr};
}

// Brute-force double sum over slice pairs; reference implementation used to
// cross-check kernel_cp_dr.
inline KernelMatrix kernel_dr_pairwise(const SliceMoments& m) {
  const int p = m.dim();
  const int K = m.K();
  const Matrix I = Matrix::Identity(p, p);
  Matrix M = Matrix::Zero(p, p);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < K; ++l) {
      const Vector& mk = m.m_hat[static_cast<std::size_t>(k)];
      const Vector& ml = m.m_hat[static_cast<std::size_t>(l)];
      Matrix A = m.S_hat[static_cast<std::size_t>(k)] + m.S_hat[static_cast<std::size_t>(l)] -
                 mk * ml.transpose() - ml * mk.transpose();
      Matrix D = (m.tau_hat(k) + m.tau_hat(l)) * I - A;
      M.noalias() += m.p_hat(k) * m.p_hat(l) * D * D;
    }
  }
  return {detail::symmetrized(std::move(M)), Method::cp_dr};
}

struct StandardizedSample {
  Matrix Z;                    // mean-centered, covariance-whitened predictors
  ScatterEstimate standardizer;  // mu = sample mean, sigma = raw 1/n covariance
};

// Classical standardization: z_i = C^{-1/2}(x_i - xbar) with the raw 1/n
// sample covariance, so the standardized sample has mean 0 and covariance I.
inline StandardizedSample standardize_sample(const Eigen::Ref<const Matrix>& X) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw std::invalid_argument("no samples");
  StandardizedSample out;
  out.standardizer.mu_hat = X.colwise().mean();
  Matrix U = X.rowwise() - out.standardizer.mu_hat.transpose();
  out.standardizer.sigma_hat = (U.transpose() * U) / static_cast<double>(n);
  out.standardizer.sigma_inv_sqrt = symmetric_inverse_sqrt(out.standardizer.sigma_hat);
  out.Z.noalias() = U * out.standardizer.sigma_inv_sqrt;
  return out;
}

// Moment-based baseline kernels over an already standardized sample.
inline KernelMatrix kernel_classical_standardized(const StandardizedSample& std_sample,
                                                  const SliceAssignment& slices, Method method) {
  if (method != Method::sir && method != Method::save && method != Method::dr)
    throw std::invalid_argument("kernel_classical requires a classical method");
  const Matrix& Z = std_sample.Z;
  const Eigen::Index n = Z.rows(), p = Z.cols();
  const int K = slices.K;
  const Matrix I = Matrix::Identity(p, p);

  Vector p_hat = Vector::Zero(K);
  std::vector<Vector> mean(static_cast<std::size_t>(K), Vector::Zero(p));
  std::vector<Matrix> second(static_cast<std::size_t>(K), Matrix::Zero(p, p));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(slices.labels[static_cast<std::size_t>(i)] - 1);
    mean[k] += Z.row(i).transpose();
    second[k].noalias() += Z.row(i).transpose() * Z.row(i);
  }
  for (int k = 0; k < K; ++k) {
    const double nk = slices.counts[static_cast<std::size_t>(k)];
    if (nk < 2) throw std::invalid_argument("slice too small");
    p_hat(k) = nk / static_cast<double>(n);
    mean[static_cast<std::size_t>(k)] /= nk;
    second[static_cast<std::size_t>(k)] /= nk;
  }

  Matrix M = Matrix::Zero(p, p);
  switch (method) {
    case Method::sir:
      for (int k = 0; k < K; ++k)
        M.noalias() += p_hat(k) * mean[static_cast<std::size_t>(k)] *
                       mean[static_cast<std::size_t>(k)].transpose();
      break;
    case Method::save:
      for (int k = 0; k < K; ++k) {
        const Vector& mk = mean[static_cast<std::size_t>(k)];
        const Matrix cov = second[static_cast<std::size_t>(k)] - mk * mk.transpose();
        const Matrix D = I - cov;
        M.noalias() += p_hat(k) * D * D;
      }
      break;
    default:  // dr
      for (int k = 0; k < K; ++k) {
        for (int l = 0; l < K; ++l) {
          const Vector& mk = mean[static_cast<std::size_t>(k)];
          const Vector& ml = mean[static_cast<std::size_t>(l)];
          Matrix A = second[static_cast<std::size_t>(k)] + second[static_cast<std::size_t>(l)] -
                     mk * ml.transpose() - ml * mk.transpose();
          Matrix D = 2.0 * I - A;
          M.noalias() += p_hat(k) * p_hat(l) * D * D;
        }
      }
      break;
  }
  return {detail::symmetrized(std::move(M)), method};
}

inline KernelMatrix kernel_classical(const Eigen::Ref<const Matrix>& X,
                                     const SliceAssignment& slices, Method method) {
  return kernel_classical_standardized(standardize_sample(X), slices, method);
}

}  // namespace cpdr
