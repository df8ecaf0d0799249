#pragma once

#include <vector>

#include "tensor.hpp"

namespace mtcs {

// Core tensor plus one factor matrix per mode (factor n: I_n x R_n).
// The orthonormal flags track which factors have orthonormal columns;
// oblique change-of-basis factors carry the flag cleared.
struct TuckerModel {
  DenseTensor core;
  std::vector<Matrix> factors;
  std::vector<bool> orthonormal;
};

// Shape consistency; throws ShapeError on mismatch.
void validate(const TuckerModel& model);

// core x_1 A_1 x_2 ... x_N A_N.
DenseTensor tucker_reconstruct(const TuckerModel& model);

// Truncated higher-order SVD: factor n holds the leading ranks[n] left
// singular vectors of the mode-n unfolding; core = t contracted with the
// factor transposes.
TuckerModel hosvd(const DenseTensor& t, const std::vector<std::size_t>& ranks);

struct AlsOptions {
  int max_iters = 50;
  double tol = 1e-8;  // relative fit-error change
};

struct AlsTrace {
  std::vector<double> fit_errors;  // [0] is the HOSVD initialization
  int iterations = 0;
  bool converged = false;
};

// Higher-order orthogonal iteration refinement of the HOSVD initialization.
// The fit error is non-increasing across sweeps.
TuckerModel tucker_als(const DenseTensor& t, const std::vector<std::size_t>& ranks,
                       const AlsOptions& opts = {}, AlsTrace* trace = nullptr);

// Best rank-R approximation via truncated SVD (Eckart-Young).
Matrix best_rank_matrix(const Matrix& m, std::size_t rank);

}  // namespace mtcs
