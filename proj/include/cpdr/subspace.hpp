#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cpdr/kernels.hpp"
#include "cpdr/robust_scatter.hpp"
#include "cpdr/types.hpp"

namespace cpdr {

struct SubspaceEstimate {
  Vector eigenvalues;  // all p, descending, negatives clamped to 0
  Matrix basis_proj;   // p x d orthonormal, in projected/standardized coordinates
  Matrix basis_x;      // p x d orthonormal, in raw predictor coordinates
  int d = 0;
};

// Spectral extraction with deterministic conventions: eigenvalues descending
// (negatives clamped to zero); each eigenvector is signed so its largest-
// magnitude component is positive (magnitude ties break to the lowest index);
// exactly tied eigenvalues are ordered by that component index ascending.
inline SubspaceEstimate top_eigen(const KernelMatrix& kernel, int d) {
  const Eigen::Index p = kernel.M.rows();
  if (d < 1 || d > p) throw std::invalid_argument("requested dimension out of range");

  Eigen::SelfAdjointEigenSolver<Matrix> es(detail::symmetrized(kernel.M));
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  Matrix vecs = es.eigenvectors();
  Vector vals = es.eigenvalues();
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double a = std::abs(vecs(i, j));
      if (a > best) {  // strict: magnitude ties keep the lowest index
        best = a;
        arg = i;
      }
    }
    if (vecs(arg, j) < 0.0) vecs.col(j) = -vecs.col(j);
    argmax[static_cast<std::size_t>(j)] = arg;
  }

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(p));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (vals(a) != vals(b)) return vals(a) > vals(b);
    return argmax[static_cast<std::size_t>(a)] < argmax[static_cast<std::size_t>(b)];
  });

  SubspaceEstimate out;
  out.d = d;
  out.eigenvalues.resize(p);
  out.basis_proj.resize(p, d);
  for (Eigen::Index r = 0; r < p; ++r) {
    out.eigenvalues(r) = std::max(0.0, vals(idx[static_cast<std::size_t>(r)]));
    if (r < d) out.basis_proj.col(r) = vecs.col(idx[static_cast<std::size_t>(r)]);
  }
  return out;
}

// Maps the basis back to raw predictor coordinates: a direction v scored in
// projected coordinates corresponds to sigma^{-1/2} v on the raw scale; the
// image is re-orthonormalized by a QR factorization with the column signs
// fixed so the triangular factor has a nonnegative diagonal (identity scatter
// therefore reproduces basis_proj exactly).
inline SubspaceEstimate back_transform(SubspaceEstimate est, const ScatterEstimate& scatter) {
  const Matrix B = scatter.sigma_inv_sqrt * est.basis_proj;
  Eigen::HouseholderQR<Matrix> qr(B);
  Matrix Q = qr.householderQ() * Matrix::Identity(B.rows(), B.cols());
  const Matrix R = qr.matrixQR().topRows(B.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < B.cols(); ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  est.basis_x = std::move(Q);
  return est;
}

// Maximal eigenvalue ratio selection: d = the smallest index attaining the
// largest ratio lambda_j / lambda_{j+1} over j = 1..d_max, with denominators
// floored at 1e-12 * lambda_1 to survive exact zeros.
inline int merc(const Eigen::Ref<const Vector>& eigenvalues, int d_max) {
  const Eigen::Index p = eigenvalues.size();
  if (d_max < 1 || d_max + 1 > p) throw std::invalid_argument("d_max out of range");
  const double lead = eigenvalues(0);
  if (!(lead > 0.0)) throw std::runtime_error("kernel matrix is null");
  const double floor_val = 1e-12 * lead;
  int best_j = 1;
  double best_ratio = -1.0;
  for (int j = 1; j <= d_max; ++j) {
    const double denom = std::max(eigenvalues(j), floor_val);
    const double r = eigenvalues(j - 1) / denom;
    if (r > best_ratio) {  // strict: ties keep the smallest j
      best_ratio = r;
      best_j = j;
    }
  }
  return best_j;
}

}  // namespace cpdr
