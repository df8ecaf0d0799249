#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sensing.hpp"
#include "tensor.hpp"
#include "tucker.hpp"

namespace mtcs {

// Threshold selection for the truncated pseudo-inverses: either a fixed
// tau >= 0 (tau = 0 is the plain pseudo-inverse), or Auto, which derives
// tau from a model-error estimate via the rough bound eps*||Phi1||*||Phi2||.
struct TruncationPolicy {
  static TruncationPolicy fixed_tau(double tau);
  static TruncationPolicy auto_epsilon(double epsilon);

  bool auto_mode = false;
  double tau = 0.0;
  double epsilon = 0.0;
};

struct ReconstructionReport {
  DenseTensor reconstruction;
  double tau_used = 0.0;
  std::vector<Vector> w_spectra;               // singular values of each W_(n)
  std::vector<Eigen::Index> truncation_counts; // dropped singular values per mode
  double wall_ms = 0.0;
  std::vector<std::string> warnings;
};

// Smallest per-mode singular values sigma_{R_n}(W_(n)); zero for modes whose
// unfolding cannot reach full row rank.
std::vector<double> sigma_min_per_mode(const ReconstructionReport& report,
                                       const std::vector<std::size_t>& ranks);

// Direct reconstruction  Xhat = W x_1 Z_1 W_(1)^{*tau} x_2 ... x_N Z_N W_(N)^{*tau}.
// With tau below every sigma_{R_n} this is the exact formula; larger tau
// trades bias for stability via the truncated pseudo-inverse.
ReconstructionReport reconstruct(const MeasurementSet& m, const SensingEnsemble& e,
                                 const TruncationPolicy& policy);

// Two-mode pipeline: assemble the multi-way measurements from Y1/Y2, then
// run the direct reconstruction.
ReconstructionReport reconstruct_two_mode(const TwoModeMeasurements& y,
                                          const Matrix& phi1, const Matrix& phi2,
                                          const Matrix& phi3,
                                          const TruncationPolicy& policy);

// Bound-minimizing threshold tau0 = eps * sqrt(c / a).
double tau0(double epsilon, double a, double c);
// Overestimate usable without the signal factors: eps * ||Phi1|| * ||Phi2||.
double tau0_rough(double epsilon, const Matrix& phi1, const Matrix& phi2);

enum class BoundBranch { LowTau, HighTau, Gap };

// Constants and evaluation of the reconstruction-error upper bound:
//   tau <= sigma_under:  b eps + c eps^2 / sigma_R
//   tau >  sigma_bar:    a tau + b eps + c eps^2 / tau
// where sigma_R = min over modes 1, 2 of sigma_{R_n}(W_(n)) and
// sigma_bar/sigma_under are the max/min over all modes.  Between the two
// (possible with order 3) no bound is claimed; both candidates are reported
// with branch = Gap and bound_value conservatively set to their max.
struct BoundReport {
  double a = 0.0, b = 0.0, c = 0.0;
  std::vector<double> sigma_min_per_mode;
  double sigma_bar = 0.0, sigma_under = 0.0;
  double tau_used = 0.0, epsilon = 0.0;
  double bound_value = 0.0;
  double candidate_low = 0.0, candidate_high = 0.0;
  BoundBranch branch = BoundBranch::LowTau;
};

// Constants a, b, c from the change-of-basis factors A_n = U_n (Phi_n U_n)^{-1}:
//   a = ||A1|| ||A2||   (times sqrt(R1) + sqrt(R2) + sqrt(I3) for order 3)
//   b = 1 + ||A1 Phi1|| ||A2 Phi2|| + ||A1|| (1 + ||A2 Phi2||) ||Phi1||
//         + ||A2|| (1 + ||A1 Phi1||) ||Phi2||
//   c = (1 + ||A1 Phi1||) (1 + ||A2 Phi2||) ||Phi1|| ||Phi2||
// x0_model must carry orthonormal factors; order 3 requires the identity
// sensing matrix in mode 3.
BoundReport bound_constants(const TuckerModel& x0_model, const SensingEnsemble& e);

BoundReport error_bound(const BoundReport& constants, std::vector<double> sigma_min_modes,
                        double tau, double epsilon);

// H = W x_1 W_(1) W_(1)^{*tau} x_2 W_(2) W_(2)^{*tau} x_3 W_(3) W_(3)^{*tau} - W.
// Contract: ||H||_F = 0 when tau < min sigma_{R_n}, and
// ||H||_F <= (sqrt(R1) + sqrt(R2) + sqrt(R3)) tau when tau > max sigma_{R_n}.
std::pair<DenseTensor, double> projection_residual(const DenseTensor& w, double tau);

}  // namespace mtcs
