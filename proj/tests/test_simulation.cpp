#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "cpdr/evaluation.hpp"
#include "cpdr/rng.hpp"
#include "cpdr/simulation.hpp"

using cpdr::Matrix;
using cpdr::Vector;

namespace {

cpdr::ModelSpec spec_of(cpdr::Model m, int n, int df, cpdr::Family fam, int p = 20) {
  cpdr::ModelSpec s;
  s.model = m;
  s.p = p;
  s.n = n;
  s.df = df;
  s.family = fam;
  return s;
}

double column_var(const Vector& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / (v.size() - 1);
}

double empirical_quantile(Vector v, double q) {
  std::sort(v.data(), v.data() + v.size());
  const auto idx = static_cast<Eigen::Index>(q * (v.size() - 1));
  return v(idx);
}

}  // namespace

TEST_CASE("same seed reproduces the draw bit for bit, different seeds do not") {
  const auto spec = spec_of(cpdr::Model::I, 200, 3, cpdr::Family::elliptical_t, 6);
  const auto [X1, e1] = cpdr::gen_predictors(spec, 42);
  const auto [X2, e2] = cpdr::gen_predictors(spec, 42);
  REQUIRE(X1.rows() == 200);
  REQUIRE(X1.cols() == 6);
  CHECK((X1.array() == X2.array()).all());
  CHECK((e1.array() == e2.array()).all());
  const auto [X3, e3] = cpdr::gen_predictors(spec, 43);
  CHECK((X1 - X3).norm() > 1e-6);
}

TEST_CASE("without tail mixing the elliptical family is standard normal") {
  const auto spec =
      spec_of(cpdr::Model::II, 50000, cpdr::df_infinite, cpdr::Family::elliptical_t, 3);
  const auto [X, eps] = cpdr::gen_predictors(spec, 7);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(X.col(j).mean()) < 0.02);
    CHECK(std::abs(column_var(X.col(j)) - 1.0) < 0.03);
  }
  CHECK(std::abs(column_var(eps) - 1.0) < 0.03);
  // magnitudes of distinct columns are uncorrelated without a shared scale
  const Vector a = X.col(0).array().abs().log().matrix();
  const Vector b = X.col(1).array().abs().log().matrix();
  const double cov = ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / a.size();
  CHECK(std::abs(cov / std::sqrt(column_var(a) * column_var(b))) < 0.02);
}

TEST_CASE("five degrees of freedom reproduce scalar-t marginals") {
  const auto spec = spec_of(cpdr::Model::I, 200000, 5, cpdr::Family::elliptical_t, 3);
  const auto [X, eps] = cpdr::gen_predictors(spec, 9);
  const Vector col = X.col(0);
  CHECK(std::abs(column_var(col) - 5.0 / 3.0) < 0.08);
  // reference quantiles of the t distribution with five degrees of freedom
  CHECK(std::abs(empirical_quantile(col, 0.95) - 2.015048) < 0.06);
  CHECK(std::abs(empirical_quantile(col, 0.75) - 0.726687) < 0.03);
  CHECK(std::abs(empirical_quantile(col, 0.50)) < 0.03);
  CHECK(std::abs(empirical_quantile(col, 0.05) + 2.015048) < 0.06);
}

TEST_CASE("the shared per-row scale couples coordinate magnitudes") {
  const auto spec = spec_of(cpdr::Model::I, 20000, 1, cpdr::Family::elliptical_t, 4);
  const auto [X, eps] = cpdr::gen_predictors(spec, 11);
  const Vector a = X.col(0).array().abs().log().matrix();
  const Vector b = X.col(3).array().abs().log().matrix();
  const double cov = ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / a.size();
  const double corr = cov / std::sqrt(column_var(a) * column_var(b));
  CHECK(corr > 0.3);  // theory gives about one half for one degree of freedom
}

TEST_CASE("the asymmetric family is centered with unit variance and right skew") {
  const auto spec =
      spec_of(cpdr::Model::I, 50000, cpdr::df_infinite, cpdr::Family::asymmetric_exp, 3);
  const auto [X, eps] = cpdr::gen_predictors(spec, 13);
  const Vector col = X.col(1);
  CHECK(std::abs(col.mean()) < 0.02);
  CHECK(std::abs(column_var(col) - 1.0) < 0.04);
  const double skew = (col.array() - col.mean()).cube().mean() / std::pow(column_var(col), 1.5);
  CHECK(skew > 1.5);  // centered exponential has skewness two
  CHECK(col.minCoeff() > -1.0 - 1e-12);  // support is bounded below at minus one
}

TEST_CASE("responses follow the stated formulas on handcrafted rows") {
  const int p = 12;
  Matrix X = Matrix::Zero(3, p);
  Vector eps(3);
  X(0, 0) = 1.0;
  eps(0) = 0.0;
  X(1, 0) = X(1, 1) = X(1, 2) = 1.0;
  eps(1) = 2.0;
  X(2, 1) = -3.0;
  eps(2) = 1.0;

  const auto m1 = spec_of(cpdr::Model::I, 3, cpdr::df_infinite, cpdr::Family::elliptical_t, p);
  const Vector y1 = cpdr::gen_response(m1, X, eps);
  CHECK(y1(0) == Catch::Approx(1.0).margin(1e-15));        // single active coordinate
  CHECK(y1(1) == Catch::Approx(3.0 + 1.0).margin(1e-15));  // sum of three plus half the noise

  const auto m2 = spec_of(cpdr::Model::II, 3, cpdr::df_infinite, cpdr::Family::elliptical_t, p);
  const Vector y2 = cpdr::gen_response(m2, X, eps);
  CHECK(y2(0) == Catch::Approx(1.0).margin(1e-15));              // 1^2 + 0
  CHECK(y2(1) == Catch::Approx(1.0 + 1.0 + 0.4).margin(1e-15));  // 1^2 + 1 + 0.2*2
  CHECK(y2(2) == Catch::Approx(-3.0 + 0.2).margin(1e-15));       // 0 - 3 + 0.2

  const auto m4 = spec_of(cpdr::Model::IV, 3, cpdr::df_infinite, cpdr::Family::elliptical_t, p);
  const Vector y4 = cpdr::gen_response(m4, X, eps);
  CHECK(y4(0) == Catch::Approx(0.0).margin(1e-15));  // zero noise kills the product
  CHECK(y4(1) == Catch::Approx(0.5 * 0.25 * 2.0).margin(1e-15));

  const auto m5 = spec_of(cpdr::Model::V, 3, cpdr::df_infinite, cpdr::Family::elliptical_t, p);
  const Vector y5 = cpdr::gen_response(m5, X, eps);
  CHECK(y5(0) == Catch::Approx(1.0).margin(1e-15));              // 1/1
  CHECK(y5(1) == Catch::Approx(4.0 / 3.0 + 0.4).margin(1e-15));  // (1+1)^2 over norm 3
}

TEST_CASE("the discrete model takes exactly the four coded levels") {
  const auto spec = spec_of(cpdr::Model::III, 400, 3, cpdr::Family::elliptical_t, 20);
  const auto [X, eps] = cpdr::gen_predictors(spec, 17);
  const Vector y = cpdr::gen_response(spec, X, eps);
  std::set<double> seen(y.data(), y.data() + y.size());
  for (double v : seen) CHECK((v == 0.0 || v == 1.0 || v == 2.0 || v == 3.0));
  CHECK(seen.size() == 4);  // all four quadrant codes occur at this sample size
}

TEST_CASE("the ratio model ignores a common rescaling of the predictors") {
  const auto spec = spec_of(cpdr::Model::V, 50, 3, cpdr::Family::elliptical_t, 8);
  const auto [X, eps] = cpdr::gen_predictors(spec, 19);
  const Vector zero = Vector::Zero(50);
  const Vector y1 = cpdr::gen_response(spec, X, zero);
  const Vector y2 = cpdr::gen_response(spec, Matrix(7.5 * X), zero);
  CHECK((y1 - y2).norm() < 1e-12);
}

TEST_CASE("true bases have the documented dimension and support") {
  for (auto m : {cpdr::Model::I, cpdr::Model::II, cpdr::Model::III, cpdr::Model::IV,
                 cpdr::Model::V}) {
    const auto spec = spec_of(m, 100, 3, cpdr::Family::elliptical_t, 20);
    const Matrix B = cpdr::true_basis(spec);
    CHECK(B.cols() == cpdr::true_dim(m));
    const Matrix Q = cpdr::orthonormalize_basis(B);  // throws if rank-deficient
    CHECK(Q.cols() == B.cols());
  }
  const Matrix B3 = cpdr::true_basis(spec_of(cpdr::Model::III, 100, 3,
                                             cpdr::Family::elliptical_t, 20));
  CHECK((B3.col(0).array() * B3.col(1).array() == 0.0).all());  // disjoint blocks
  CHECK(B3.col(0).sum() == 4.0);
  CHECK(B3.col(1).sum() == 4.0);
}

TEST_CASE("invalid model settings are rejected") {
  CHECK_THROWS_AS(cpdr::validate_spec(spec_of(cpdr::Model::III, 100, 3,
                                              cpdr::Family::elliptical_t, 8)),
                  std::invalid_argument);
  CHECK_THROWS_AS(cpdr::validate_spec(spec_of(cpdr::Model::I, 100, -1,
                                              cpdr::Family::elliptical_t, 20)),
                  std::invalid_argument);
  CHECK_THROWS_AS(cpdr::validate_spec(spec_of(cpdr::Model::I, 0, 3,
                                              cpdr::Family::elliptical_t, 20)),
                  std::invalid_argument);
}

TEST_CASE("replication streams depend on the data cell, not the method") {
  const auto spec = spec_of(cpdr::Model::I, 400, cpdr::df_infinite,
                            cpdr::Family::elliptical_t, 20);
  CHECK(cpdr::cell_key(spec) == "I|elliptical_t|inf|400|20");
  const auto spec3 = spec_of(cpdr::Model::III, 300, 5, cpdr::Family::asymmetric_exp, 12);
  CHECK(cpdr::cell_key(spec3) == "III|asymmetric_exp|5|300|12");
  // identical key => identical stream for every estimation method
  CHECK(cpdr::derive_stream(99, cpdr::cell_key(spec), 4) ==
        cpdr::derive_stream(99, cpdr::cell_key(spec), 4));
  CHECK(cpdr::derive_stream(99, cpdr::cell_key(spec), 4) !=
        cpdr::derive_stream(99, cpdr::cell_key(spec), 5));
  CHECK(cpdr::derive_stream(99, cpdr::cell_key(spec), 4) !=
        cpdr::derive_stream(100, cpdr::cell_key(spec), 4));
}

TEST_CASE("a replication is deterministic and scores a sensible fit") {
  const auto spec = spec_of(cpdr::Model::I, 400, cpdr::df_infinite,
                            cpdr::Family::elliptical_t, 20);
  const auto a = cpdr::run_replication(spec, cpdr::Method::cp_dr,
                                       cpdr::DimensionMode::fixed_d0, 1234);
  const auto b = cpdr::run_replication(spec, cpdr::Method::cp_dr,
                                       cpdr::DimensionMode::fixed_d0, 1234);
  CHECK(a.delta == b.delta);
  CHECK(a.d_selected == 1);
  CHECK(a.delta < 0.3);  // a single linear direction is easy at this size
  CHECK(a.delta >= 0.0);
}

TEST_CASE("benchmark aggregation equals a hand loop over replications") {
  cpdr::BenchmarkCell cell;
  cell.spec = spec_of(cpdr::Model::I, 150, 3, cpdr::Family::elliptical_t, 6);
  cell.method = cpdr::Method::cp_sir;
  cell.reps = 5;
  const std::uint64_t base = 2024;
  const auto table = cpdr::run_benchmark({cell}, base, cpdr::DimensionMode::fixed_d0, 1);
  REQUIRE(table.rows.size() == 1);

  std::vector<double> deltas;
  for (int r = 0; r < 5; ++r) {
    const auto seed = cpdr::derive_stream(base, cpdr::cell_key(cell.spec),
                                          static_cast<std::uint64_t>(r));
    deltas.push_back(cpdr::run_replication(cell.spec, cell.method,
                                           cpdr::DimensionMode::fixed_d0, seed)
                         .delta);
  }
  double mean = 0.0;
  for (double d : deltas) mean += d;
  mean /= 5.0;
  double ss = 0.0;
  for (double d : deltas) ss += (d - mean) * (d - mean);
  const double se = std::sqrt(ss / 4.0) / std::sqrt(5.0);
  CHECK(table.rows[0].mean_delta == Catch::Approx(mean).margin(1e-15));
  CHECK(table.rows[0].se_delta == Catch::Approx(se).margin(1e-15));
  CHECK(table.rows[0].reps == 5);
}

TEST_CASE("benchmark output does not depend on the thread count") {
  std::vector<cpdr::BenchmarkCell> cells;
  for (auto m : {cpdr::Method::cp_dr, cpdr::Method::sir}) {
    cpdr::BenchmarkCell cell;
    cell.spec = spec_of(cpdr::Model::II, 120, 5, cpdr::Family::elliptical_t, 6);
    cell.method = m;
    cell.reps = 4;
    cells.push_back(cell);
  }
  const auto t1 = cpdr::run_benchmark(cells, 77, cpdr::DimensionMode::fixed_d0, 1);
  const auto t4 = cpdr::run_benchmark(cells, 77, cpdr::DimensionMode::fixed_d0, 4);
  REQUIRE(t1.rows.size() == t4.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i].mean_delta == t4.rows[i].mean_delta);  // bitwise, not approximate
    CHECK(t1.rows[i].se_delta == t4.rows[i].se_delta);
  }
}

TEST_CASE("dimension selection accuracy is recorded when it runs") {
  cpdr::BenchmarkCell cell;
  cell.spec = spec_of(cpdr::Model::I, 400, cpdr::df_infinite, cpdr::Family::elliptical_t, 20);
  cell.method = cpdr::Method::cp_dr;
  cell.reps = 3;
  const auto table = cpdr::run_benchmark({cell}, 5, cpdr::DimensionMode::merc, 2);
  CHECK(table.d_mode == cpdr::DimensionMode::merc);
  CHECK(table.rows[0].dhat_accuracy == 1.0);  // the linear model is unambiguous here
}

TEST_CASE("an empty or invalid benchmark request is rejected") {
  cpdr::BenchmarkCell cell;
  cell.spec = spec_of(cpdr::Model::I, 100, 3, cpdr::Family::elliptical_t, 5);
  cell.reps = 0;
  CHECK_THROWS_AS(cpdr::run_benchmark({cell}, 1, cpdr::DimensionMode::fixed_d0, 1),
                  std::invalid_argument);
}
