#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace mtcs {

enum class SensingKind { Gaussian, Bernoulli, Identity, Custom };

std::string to_string(SensingKind kind);
SensingKind sensing_kind_from_string(const std::string& name);

// Per-mode sensing matrices Phi_n (R_n x I_n) plus the seed/kinds that
// produced them.
struct SensingEnsemble {
  std::vector<Matrix> matrices;
  std::vector<SensingKind> kinds;
  std::uint64_t seed = 0;
};

// One R x I sensing matrix, deterministic in (kind, R, I, seed, mode_tag).
// Gaussian entries are unnormalized standard normals; Bernoulli entries are
// +-1 equiprobable; Identity requires R = I.
Matrix gen_sensing(SensingKind kind, std::size_t rows, std::size_t cols,
                   std::uint64_t seed, std::uint64_t mode_tag);

// Ensemble with one matrix per mode, streams keyed by (seed, mode index).
SensingEnsemble make_ensemble(const std::vector<SensingKind>& kinds,
                              const std::vector<std::size_t>& ranks,
                              const std::vector<std::size_t>& dims, std::uint64_t seed);

// Ensemble wrapping caller-supplied matrices (kind Custom).
SensingEnsemble custom_ensemble(std::vector<Matrix> matrices, std::uint64_t seed = 0);

void validate(const SensingEnsemble& e, const std::vector<std::size_t>& dims);

// Multi-way measurements: Z[n] is the signal projected in every mode except
// n, W is the signal projected in all modes; W = Z[n] x_n Phi_n for every n.
struct MeasurementSet {
  std::vector<DenseTensor> Z;
  DenseTensor W;
  std::uint64_t seed = 0;  // provenance of the ensemble that produced it
  std::vector<SensingKind> kinds;
};

// Signal dimensions / sensing ranks recovered from the measurement shapes.
std::vector<std::size_t> signal_dims(const MeasurementSet& m);
std::vector<std::size_t> sensing_ranks(const MeasurementSet& m);

MeasurementSet multiway_measure(const DenseTensor& x, const SensingEnsemble& e);

// Linear projections of an order-3 tensor in modes 1 and 2 only:
// Y1 = Phi_1 X_(1), Y2 = Phi_2 X_(2).
struct TwoModeMeasurements {
  Matrix Y1;  // R1 x (I2 I3)
  Matrix Y2;  // R2 x (I1 I3)
  std::vector<std::size_t> dims;  // (I1, I2, I3) of the original signal
};

TwoModeMeasurements two_mode_measure(const DenseTensor& x, const Matrix& phi1,
                                     const Matrix& phi2);

// Rebuilds the full multi-way measurement set from two-mode projections:
//   (Z1)_(2) = Y2 (Phi3^T kron I),  (Z2)_(1) = Y1 (Phi3^T kron I),
//   (Z3)_(1) = Y1 (I kron Phi2^T),
// then W = Z3 x_3 Phi3, cross-checked against Z1 x_1 Phi1 to 1e-10.
// phi3 is a synthetic mode-3 matrix (often the identity).
MeasurementSet assemble_from_two_mode(const TwoModeMeasurements& y, const Matrix& phi1,
                                      const Matrix& phi2, const Matrix& phi3);

// Redundancy identity of the square 2D case.  With Z1^T = (Z11, Z12) and
// Phi1 = (Phi11, Phi12) split after I - R columns, the held-out block is
//   Z12 = (Phi2 Z2 - Z11 Phi11^T) (Phi12^{-1})^T.
// Verification utility only; throws NumericalError when Phi12 is
// ill-conditioned (condition number above 1e12).
Matrix recover_block_z12(const Matrix& z2, const Matrix& z11, const Matrix& phi1,
                         const Matrix& phi2);

// delta = 2 (R/I) - (R/I)^2, the non-redundant measurement fraction.
double sampling_ratio(std::size_t rank, std::size_t dim);
// Nearest integer R with sampling_ratio(R, I) ~ delta, clamped to [1, I].
std::size_t rank_for_sampling_ratio(std::size_t dim, double delta);

// Directory layout: z_<n>.ten + w.ten (multiway) or y_1.ten + y_2.ten
// (two-mode), plus manifest.json {format_version, mode, seed, kinds, dims,
// ranks}.  Seeded ensembles are regenerated from the manifest on load;
// Custom ensembles additionally store phi_<n>.ten.
struct StoredMeasurements {
  bool two_mode = false;
  MeasurementSet set;               // valid when !two_mode
  TwoModeMeasurements projections;  // valid when two_mode
  SensingEnsemble ensemble;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> ranks;
};

void save_measurement_dir(const std::string& dir, const MeasurementSet& m,
                          const SensingEnsemble& e);
void save_measurement_dir(const std::string& dir, const TwoModeMeasurements& y,
                          const SensingEnsemble& e);
StoredMeasurements load_measurement_dir(const std::string& dir);

}  // namespace mtcs
