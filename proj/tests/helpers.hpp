#pragma once

#include <cstdint>
#include <vector>

#include "rng.hpp"
#include "tensor.hpp"

namespace mtcs::test {

inline DenseTensor random_tensor(const std::vector<std::size_t>& dims, std::uint64_t seed) {
  KeyedRng rng(seed);
  DenseTensor t(dims);
  for (double& v : t.values()) v = rng.next_gaussian();
  return t;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  KeyedRng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.next_gaussian();
  return m;
}

// Independent spectral-norm oracle: power iteration on M^T M.
inline double power_iteration_norm(const Matrix& m, int iters = 500) {
  if (m.size() == 0) return 0.0;
  KeyedRng rng(0x9e1);
  Vector v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.next_gaussian();
  v.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Vector w = m.transpose() * (m * v);
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

inline double relative_diff(const Matrix& a, const Matrix& b) {
  const double denom = b.norm();
  return denom == 0.0 ? (a - b).norm() : (a - b).norm() / denom;
}

}  // namespace mtcs::test
