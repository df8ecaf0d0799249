#include <doctest.h>

#include "errors.hpp"
#include "helpers.hpp"
#include "linalg.hpp"
#include "tucker.hpp"

using namespace mtcs;
using test::random_matrix;
using test::random_tensor;

namespace {

TuckerModel random_orthonormal_model(const std::vector<std::size_t>& dims,
                                     const std::vector<std::size_t>& ranks,
                                     std::uint64_t seed) {
  TuckerModel m;
  m.core = random_tensor(ranks, seed);
  for (std::size_t n = 0; n < dims.size(); ++n) {
    const Matrix g = random_matrix(dims[n], ranks[n], seed + 100 * (n + 1));
    Eigen::HouseholderQR<Matrix> qr(g);
    m.factors.push_back(qr.householderQ() * Matrix::Identity(dims[n], ranks[n]));
  }
  m.orthonormal.assign(dims.size(), true);
  return m;
}

}  // namespace

TEST_CASE("rank-1 reconstruction is the outer product") {
  TuckerModel m;
  m.core = DenseTensor({1, 1});
  m.core[0] = 1.0;
  Matrix u = random_matrix(4, 1, 201);
  Matrix v = random_matrix(3, 1, 203);
  m.factors = {u, v};
  m.orthonormal = {false, false};
  const DenseTensor x = tucker_reconstruct(m);
  const Matrix want = u * v.transpose();
  CHECK((matrix_from_tensor(x) - want).norm() < 1e-14);
}

TEST_CASE("identity core with identity factors reconstructs the core") {
  TuckerModel m;
  m.core = random_tensor({3, 3, 3}, 207);
  for (int n = 0; n < 3; ++n) m.factors.push_back(Matrix::Identity(3, 3));
  m.orthonormal = {true, true, true};
  CHECK(frobenius_distance(tucker_reconstruct(m), m.core) == 0.0);
}

TEST_CASE("reconstruction equals the chained mode-product oracle") {
  const auto model = random_orthonormal_model({6, 5, 4}, {3, 2, 2}, 211);
  DenseTensor chained = model.core;
  for (std::size_t n = 0; n < 3; ++n)
    chained = mode_product(chained, model.factors[n], n);
  CHECK(frobenius_distance(tucker_reconstruct(model), chained) == 0.0);
}

TEST_CASE("reconstruction preserves core norm under orthonormal factors") {
  const auto model = random_orthonormal_model({7, 6, 5}, {3, 3, 2}, 213);
  CHECK(frobenius_norm(tucker_reconstruct(model)) ==
        doctest::Approx(frobenius_norm(model.core)).epsilon(1e-12));
}

TEST_CASE("tucker model validation catches shape mismatches") {
  TuckerModel m;
  m.core = DenseTensor({2, 2});
  m.factors = {Matrix::Identity(3, 2)};
  m.orthonormal = {true};
  CHECK_THROWS_AS(validate(m), ShapeError);
  m.factors.push_back(Matrix::Identity(3, 3));  // wrong column count
  m.orthonormal.push_back(true);
  CHECK_THROWS_AS(validate(m), ShapeError);
}

TEST_CASE("hosvd recovers an exact multilinear-rank-(2,2,2) tensor") {
  const auto model = random_orthonormal_model({8, 7, 6}, {2, 2, 2}, 223);
  const DenseTensor x = tucker_reconstruct(model);
  const TuckerModel fitted = hosvd(x, {2, 2, 2});
  CHECK(relative_error(tucker_reconstruct(fitted), x) < 1e-10);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(fitted.orthonormal[n]);
    const Matrix& u = fitted.factors[n];
    CHECK((u.transpose() * u - Matrix::Identity(2, 2)).norm() < 1e-10);
  }
}

TEST_CASE("hosvd with full ranks is lossless") {
  const DenseTensor x = random_tensor({4, 5, 3}, 227);
  const TuckerModel fitted = hosvd(x, {4, 5, 3});
  CHECK(relative_error(tucker_reconstruct(fitted), x) < 1e-10);
  CHECK_THROWS_AS(hosvd(x, {5, 5, 3}), ShapeError);
  CHECK_THROWS_AS(hosvd(x, {4, 5}), ShapeError);
}

TEST_CASE("hosvd is sqrt(N)-quasi-optimal against the ALS refinement") {
  const auto model = random_orthonormal_model({10, 9, 8}, {3, 3, 3}, 229);
  DenseTensor x = tucker_reconstruct(model);
  const DenseTensor noise = random_tensor({10, 9, 8}, 233);
  x = add_scaled(x, 0.05 / frobenius_norm(noise), noise);

  const DenseTensor via_hosvd = tucker_reconstruct(hosvd(x, {3, 3, 3}));
  const DenseTensor via_als = tucker_reconstruct(tucker_als(x, {3, 3, 3}));
  const double err_hosvd = frobenius_distance(via_hosvd, x);
  const double err_als = frobenius_distance(via_als, x);
  CHECK(err_als <= err_hosvd * (1 + 1e-12));
  CHECK(err_hosvd <= std::sqrt(3.0) * err_als);
}

TEST_CASE("ALS converges immediately on exact low-rank input") {
  const auto model = random_orthonormal_model({9, 8, 7}, {2, 3, 2}, 239);
  const DenseTensor x = tucker_reconstruct(model);
  AlsTrace trace;
  const TuckerModel fitted = tucker_als(x, {2, 3, 2}, {}, &trace);
  CHECK(relative_error(tucker_reconstruct(fitted), x) < 1e-10);
  CHECK(trace.converged);
  CHECK(trace.iterations <= 2);
}

TEST_CASE("ALS with full ranks is lossless") {
  const DenseTensor x = random_tensor({4, 4, 4}, 241);
  const TuckerModel fitted = tucker_als(x, {4, 4, 4});
  CHECK(relative_error(tucker_reconstruct(fitted), x) < 1e-10);
}

TEST_CASE("ALS fit error is monotone non-increasing per sweep") {
  const DenseTensor x = random_tensor({8, 8, 8}, 251);
  AlsTrace trace;
  tucker_als(x, {3, 3, 3}, {.max_iters = 20, .tol = 0.0}, &trace);
  REQUIRE(trace.fit_errors.size() >= 2);
  for (std::size_t i = 1; i < trace.fit_errors.size(); ++i)
    CHECK(trace.fit_errors[i] <= trace.fit_errors[i - 1] * (1 + 1e-10) + 1e-15);
}

TEST_CASE("best rank matrix satisfies Eckart-Young") {
  const Matrix rank1 = random_matrix(6, 1, 257) * random_matrix(1, 5, 263);
  CHECK((best_rank_matrix(rank1, 1) - rank1).norm() < 1e-12 * rank1.norm());

  const Matrix m = random_matrix(6, 5, 269);
  CHECK((best_rank_matrix(m, 5) - m).norm() < 1e-12 * m.norm());

  const Matrix big = random_matrix(10, 10, 271);
  const SvdFactors f = svd(big);
  const double err = spectral_norm(big - best_rank_matrix(big, 3));
  CHECK(err == doctest::Approx(f.S(3)).epsilon(1e-10));

  CHECK_THROWS_AS(best_rank_matrix(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(best_rank_matrix(m, 6), std::invalid_argument);
}
