#pragma once

#include <stdexcept>

#include "cpdr/types.hpp"

namespace cpdr {

struct SubspacePair {
  Matrix B_true;  // p x d0, any full-column-rank spanning set
  Matrix B_est;   // p x d, any full-column-rank spanning set
};

// Orthonormal basis of the column span (QR), rejecting rank-deficient input.
inline Matrix orthonormalize_basis(const Eigen::Ref<const Matrix>& B) {
  if (B.rows() == 0 || B.cols() == 0 || B.cols() > B.rows())
    throw std::invalid_argument("basis not full rank");
  Eigen::ColPivHouseholderQR<Matrix> rank_check(B);
  if (rank_check.rank() < B.cols()) throw std::invalid_argument("basis not full rank");
  Eigen::HouseholderQR<Matrix> qr(B);
  return qr.householderQ() * Matrix::Identity(B.rows(), B.cols());
}

// Projection-matrix distance tr((P_true - P_est)^2) / d0. Computed through
// the cross-Gram identity tr((P0 - P1)^2) = d0 + d - 2 ||Q0^T Q1||_F^2, which
// avoids forming the p x p projectors.
inline double delta_distance(const Eigen::Ref<const Matrix>& B_true,
                             const Eigen::Ref<const Matrix>& B_est) {
  const Matrix Q0 = orthonormalize_basis(B_true);
  const Matrix Q1 = orthonormalize_basis(B_est);
  if (Q0.rows() != Q1.rows()) throw std::invalid_argument("bases have different ambient dimension");
  const double d0 = static_cast<double>(Q0.cols());
  const double d1 = static_cast<double>(Q1.cols());
  const double cross = (Q0.transpose() * Q1).squaredNorm();
  return (d0 + d1 - 2.0 * cross) / d0;
}

inline double delta_distance(const SubspacePair& pair) {
  return delta_distance(pair.B_true, pair.B_est);
}

}  // namespace cpdr
