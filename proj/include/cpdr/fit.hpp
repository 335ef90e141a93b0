#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "cpdr/kernels.hpp"
#include "cpdr/projection.hpp"
#include "cpdr/robust_scatter.hpp"
#include "cpdr/slicing.hpp"
#include "cpdr/subspace.hpp"
#include "cpdr/types.hpp"

namespace cpdr {

struct FitOptions {
  Method method = Method::cp_dr;
  int slices = 5;
  int dim = 0;   // 0 = select automatically via the eigenvalue-ratio rule
  int dmax = 5;  // search cap for automatic selection
  bool standardize = false;  // rescale columns so the scatter diagonal is 1, then refit
  ScatterOptions scatter{};
};

// Complete fitted model: estimated subspace plus everything needed to map new
// data through the identical transform (center, whitening matrix, optional
// per-column scale), so reports round-trip and projections are reproducible.
struct FitResult {
  Method method = Method::cp_dr;
  int n = 0, p = 0, K = 0, d_selected = 0;
  Vector eigenvalues;   // all p kernel eigenvalues, descending
  Matrix basis_proj;    // p x d, projected/standardized coordinates
  Matrix basis_x;       // p x d, raw predictor coordinates
  Matrix indices;       // n x d per-sample scores basis_proj^T z_i
  Vector mu;            // transform center
  Matrix sigma_inv_sqrt;  // transform whitening factor
  bool contour = true;  // true: scores use unit-normalized rows; false: plain whitening
  Vector column_scale;  // size p when standardize was requested, else empty
  int scatter_iterations = 0;
  double scatter_residual = 0.0;
  std::string response_name;
};

// Applies a fitted transform to new predictors and returns their per-sample
// scores; identical to the scores stored at fit time when given the same data.
inline Matrix project_indices(const FitResult& fit, const Eigen::Ref<const Matrix>& Xnew) {
  if (Xnew.cols() != fit.p)
    throw std::invalid_argument("dimension mismatch between model file and data");
  Matrix Xw = Xnew;
  if (fit.column_scale.size() > 0)
    Xw.array().rowwise() /= fit.column_scale.transpose().array();
  Matrix U = Xw.rowwise() - fit.mu.transpose();
  Matrix V = U * fit.sigma_inv_sqrt;
  if (fit.contour) {
    const double thresh = 1e-12 * detail::deviation_scale(U);
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
      const double r = V.row(i).norm();
      if (U.row(i).norm() < thresh) throw std::runtime_error("cannot project the center point");
      V.row(i) /= r;
    }
  }
  return V * fit.basis_proj;
}

inline FitResult fit(const Eigen::Ref<const Matrix>& X, const Eigen::Ref<const Vector>& y,
                     const FitOptions& opts) {
  if (X.rows() != y.size()) throw std::invalid_argument("predictor and response sizes differ");
  if (X.rows() == 0) throw std::invalid_argument("no samples");

  FitResult out;
  out.method = opts.method;
  out.n = static_cast<int>(X.rows());
  out.p = static_cast<int>(X.cols());

  Matrix Xw = X;
  if (opts.standardize) {
    const ScatterEstimate pre = estimate_scatter(X, opts.scatter);
    out.column_scale = pre.sigma_hat.diagonal().cwiseSqrt();
    Xw.array().rowwise() /= out.column_scale.transpose().array();
  }

  const SliceAssignment slices = slice_response(y, opts.slices);
  out.K = slices.K;

  KernelMatrix kernel{Matrix(), opts.method};
  ScatterEstimate transform;
  Matrix scores_base;  // rows the per-sample scores are taken from
  if (is_contour_method(opts.method)) {
    transform = estimate_scatter(Xw, opts.scatter);
    ProjectedSample proj = project(Xw, transform);
    const SliceMoments moments = slice_moments(proj, slices);
    switch (opts.method) {
      case Method::cp_sir: kernel = kernel_cp_sir(moments); break;
      case Method::cp_save: kernel = kernel_cp_save(moments); break;
      default: kernel = kernel_cp_dr(moments); break;
    }
    out.contour = true;
    out.scatter_iterations = transform.iterations_used;
    out.scatter_residual = transform.final_residual;
    scores_base = std::move(proj.X_proj);
  } else {
    StandardizedSample std_sample = standardize_sample(Xw);
    kernel = kernel_classical_standardized(std_sample, slices, opts.method);
    transform = std::move(std_sample.standardizer);
    out.contour = false;
    scores_base = std::move(std_sample.Z);
  }

  const SubspaceEstimate full = top_eigen(kernel, out.p);
  out.eigenvalues = full.eigenvalues;
  int d = opts.dim;
  if (d == 0) d = merc(full.eigenvalues, std::min(opts.dmax, out.p - 1));
  if (d < 1 || d > out.p) throw std::invalid_argument("requested dimension out of range");

  SubspaceEstimate sub;
  sub.d = d;
  sub.eigenvalues = full.eigenvalues;
  sub.basis_proj = full.basis_proj.leftCols(d);
  sub = back_transform(std::move(sub), transform);

  out.d_selected = d;
  out.basis_proj = sub.basis_proj;
  out.basis_x = sub.basis_x;
  out.indices = scores_base * out.basis_proj;
  out.mu = transform.mu_hat;
  out.sigma_inv_sqrt = transform.sigma_inv_sqrt;
  return out;
}

}  // namespace cpdr
