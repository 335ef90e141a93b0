#pragma once

#include <stdexcept>

#include "cpdr/robust_scatter.hpp"
#include "cpdr/types.hpp"

namespace cpdr {

struct ProjectedSample {
  Matrix X_proj;           // rows are unit vectors on the scatter contour
  Vector radii;            // Mahalanobis distances of each sample from mu_hat
  ScatterEstimate scatter; // the estimate used for the projection
};

// Maps each sample to the unit contour: sigma^{-1/2}(x - mu) normalized by its
// Mahalanobis length, which equals the Euclidean length after the whitening,
// so every output row has norm 1 by construction.
inline ProjectedSample project(const Eigen::Ref<const Matrix>& X, const ScatterEstimate& est) {
  const Eigen::Index n = X.rows();
  if (n == 0) throw std::invalid_argument("no samples");

  Matrix U = X.rowwise() - est.mu_hat.transpose();
  const double thresh = 1e-12 * detail::deviation_scale(U);
  for (Eigen::Index i = 0; i < n; ++i)
    if (U.row(i).norm() < thresh)
      throw std::runtime_error("cannot project the center point");

  ProjectedSample out;
  out.X_proj.noalias() = U * est.sigma_inv_sqrt;  // symmetric factor
  out.radii = out.X_proj.rowwise().norm();
  out.X_proj.array().colwise() /= out.radii.array();
  out.scatter = est;
  return out;
}

}  // namespace cpdr
