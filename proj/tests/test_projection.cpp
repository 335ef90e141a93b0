#include <catch2/catch_amalgamated.hpp>

#include "cpdr/projection.hpp"
#include "cpdr/rng.hpp"
#include "cpdr/robust_scatter.hpp"

using cpdr::Matrix;
using cpdr::Vector;

namespace {

cpdr::ScatterEstimate identity_scatter(int p) {
  cpdr::ScatterEstimate est;
  est.mu_hat = Vector::Zero(p);
  est.sigma_hat = Matrix::Identity(p, p);
  est.sigma_inv_sqrt = Matrix::Identity(p, p);
  return est;
}

Matrix t_sample(int n, int p, int df, std::uint64_t seed) {
  cpdr::Rng rng(seed);
  Matrix X(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) X(i, j) = rng.normal();
    if (df > 0) X.row(i) /= std::sqrt(rng.chisq(df) / df);
  }
  return X;
}

}  // namespace

TEST_CASE("identity-scatter projection normalizes and keeps the radius") {
  Matrix X(1, 2);
  X << 3, 4;
  const auto proj = cpdr::project(X, identity_scatter(2));
  CHECK(proj.X_proj(0, 0) == Catch::Approx(0.6).margin(1e-15));
  CHECK(proj.X_proj(0, 1) == Catch::Approx(0.8).margin(1e-15));
  CHECK(proj.radii(0) == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("direct projection equals standardize-then-normalize") {
  // trace-2 normalized diagonal scatter diag(4,1)*(2/5)
  cpdr::ScatterEstimate est;
  est.mu_hat = Vector::Zero(2);
  est.sigma_hat = Matrix::Zero(2, 2);
  est.sigma_hat(0, 0) = 1.6;
  est.sigma_hat(1, 1) = 0.4;
  est.sigma_inv_sqrt = cpdr::symmetric_inverse_sqrt(est.sigma_hat);

  Matrix X(1, 2);
  X << 2, 1;
  const auto proj = cpdr::project(X, est);

  // second code path: whiten first, then divide by the Euclidean norm
  const Vector z = est.sigma_inv_sqrt * X.row(0).transpose();
  const Vector expect = z / z.norm();
  CHECK((proj.X_proj.row(0).transpose() - expect).norm() < 1e-12);
  CHECK(proj.radii(0) == Catch::Approx(z.norm()).margin(1e-12));
}

TEST_CASE("every projected row has unit norm") {
  const Matrix X = t_sample(400, 5, 3, 3);
  const auto est = cpdr::estimate_scatter(X);
  const auto proj = cpdr::project(X, est);
  double worst = 0.0;
  for (int i = 0; i < X.rows(); ++i)
    worst = std::max(worst, std::abs(proj.X_proj.row(i).norm() - 1.0));
  CHECK(worst < 1e-12);
  CHECK(proj.radii.minCoeff() > 0.0);
}

TEST_CASE("projected rows under extreme tails have near-isotropic covariance") {
  // moderate-n version of the population identities: cov ~ I/p, mean ~ 0
  const int n = 50000, p = 5;
  const Matrix X = t_sample(n, p, 1, 17);
  const auto est = cpdr::estimate_scatter(X);
  const auto proj = cpdr::project(X, est);
  const Vector mean = proj.X_proj.colwise().mean();
  Matrix cov = proj.X_proj.transpose() * proj.X_proj / static_cast<double>(n);
  cov -= mean * mean.transpose();
  CHECK((cov - Matrix::Identity(p, p) / p).cwiseAbs().maxCoeff() < 4e-3);
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("projection is scale/shift invariant") {
  const Matrix X = t_sample(200, 3, 3, 29);
  const double c = 2.5;
  Vector b(3);
  b << 1, -2, 3;
  const Matrix Y = (c * X).rowwise() + b.transpose();
  const auto px = cpdr::project(X, cpdr::estimate_scatter(X));
  const auto py = cpdr::project(Y, cpdr::estimate_scatter(Y));
  CHECK((px.X_proj - py.X_proj).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((py.radii - c * px.radii).cwiseAbs().maxCoeff() < 1e-8 * c * px.radii.maxCoeff());
}

TEST_CASE("projecting the center point is rejected") {
  Matrix X(3, 2);
  X << 0, 0, 1, 1, -1, 2;
  CHECK_THROWS_WITH(cpdr::project(X, identity_scatter(2)), "cannot project the center point");
}
