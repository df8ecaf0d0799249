#pragma once

#include "tensor.hpp"

namespace mtcs {

// Thin SVD, singular values sorted in non-increasing order.
struct SvdFactors {
  Matrix U;
  Vector S;
  Matrix V;
};

SvdFactors svd(const Matrix& m);

// Largest singular value.
double spectral_norm(const Matrix& m);

// Relative numerical-zero threshold: sigma_0 * max(rows, cols) * eps.
// Singular values at or below it count as zero when tau itself is smaller,
// so the tau = 0 case is the standard pseudo-inverse restricted to the
// numerically nonzero spectrum.
double zero_cutoff(const Vector& s, Eigen::Index rows, Eigen::Index cols);

// Number of singular values kept by threshold tau (kept iff sigma > tau,
// strictly; ties are dropped).
Eigen::Index kept_rank(const Vector& s, Eigen::Index rows, Eigen::Index cols, double tau);

// Truncated Moore-Penrose pseudo-inverse: V * diag(1/sigma_i for sigma_i
// kept, 0 otherwise) * U^T.  Shape is the transpose of the input's.
Matrix truncated_pinv(const Matrix& m, double tau);
Matrix truncated_pinv(const SvdFactors& f, Eigen::Index rows, Eigen::Index cols, double tau);

// Residuals of the defining pseudo-inverse identities, all in spectral norm:
//   reconstruct_residual = ||W W* W - W||   (zero when tau < sigma_min,
//                                            at most tau otherwise)
//   star_residual        = ||W* W W* - W*|| (always ~ zero)
//   norm_w_wstar, norm_wstar_w              (both 1 while anything is kept)
struct PinvPropertyReport {
  double reconstruct_residual = 0.0;
  double star_residual = 0.0;
  double norm_w_wstar = 0.0;
  double norm_wstar_w = 0.0;
  Eigen::Index kept = 0;
};

PinvPropertyReport pinv_properties_check(const Matrix& m, double tau);

}  // namespace mtcs
