#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reconstruction.hpp"
#include "sensing.hpp"
#include "tucker.hpp"

namespace mtcs {

// Synthetic signal X = X0 + epsilon * E with ||E||_F = 1 and X0 the
// reconstruction of a seeded random Tucker model (orthonormal factors,
// Gaussian core).  core_decay < 1 damps core entry (i_1, ..., i_N) by
// decay^(i_1 + ... + i_N), producing ill-conditioned spectra.
struct NoisySignalSpec {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> ranks;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool normalize = true;  // rescale so ||X||_F = 1
  double core_decay = 1.0;
};

struct NoisySignal {
  DenseTensor x;
  DenseTensor x0;
  TuckerModel model;  // Tucker model of x0 (factors orthonormal)
  DenseTensor noise;  // E, unit Frobenius norm
  double achieved_epsilon = 0.0;
};

TuckerModel random_tucker(const std::vector<std::size_t>& dims,
                          const std::vector<std::size_t>& ranks, std::uint64_t seed,
                          double core_decay = 1.0);

NoisySignal gen_noisy_signal(const NoisySignalSpec& spec);

// Same pipeline, but X0 is the best multilinear-rank fit of a user-supplied
// tensor instead of a random model.  spec.dims must match the tensor.
NoisySignal gen_noisy_signal_from(const DenseTensor& base, const NoisySignalSpec& spec,
                                  const AlsOptions& als = {});

// 20 log10(max(ref) / ||test - ref||_F); +infinity on an exact match.
// Throws when max(ref) <= 0 (the formula is undefined there).
double psnr(const DenseTensor& ref, const DenseTensor& test);

enum class SweepVar { Tau, Epsilon, Delta };

std::string to_string(SweepVar var);
SweepVar sweep_var_from_string(const std::string& name);

// Monte Carlo sweep over tau, epsilon, or the sampling ratio delta.  The
// signal is fixed by spec.seed; each trial draws a fresh sensing ensemble
// keyed by (base_seed, point, trial), so output does not depend on
// execution order.  Delta sweeps require dims[0] == dims[1] and map each
// grid value to R = round(I (1 - sqrt(1 - delta))) in modes 1 and 2.
struct SweepConfig {
  SweepVar var = SweepVar::Tau;
  std::vector<double> grid;  // non-empty, strictly increasing
  int trials = 1;
  std::uint64_t base_seed = 0;
  NoisySignalSpec signal;
  std::vector<SensingKind> kinds;
  TruncationPolicy policy;  // tau sweeps override with the grid value
  std::vector<std::size_t> sense_ranks;  // empty: use the signal's ranks
};

struct TrialRecord {
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double error = 0.0;    // ||Xhat - X||_F
  double psnr_db = 0.0;
  double tau = 0.0;
  std::vector<double> sigma_min_modes;
  double wall_ms = 0.0;
  std::string failure;  // non-empty when the trial failed
};

struct PointSummary {
  double value = 0.0;
  double realized_value = 0.0;  // differs from value for delta sweeps
  int trials = 0;
  double mean_error = 0.0, std_error = 0.0, min_error = 0.0, max_error = 0.0;
  double mean_psnr = 0.0;
};

struct SweepResult {
  std::vector<TrialRecord> records;
  std::vector<PointSummary> summary;
};

SweepResult run_sweep(const SweepConfig& cfg);

// Fixed CSV schema, floats with 17 significant digits, infinities as "inf":
// sweep_var,value,trial,seed,error,psnr_db,tau,sigma_min_modes,wall_ms
void write_csv(std::ostream& os, SweepVar var, const std::vector<TrialRecord>& records);

// Round trip helpers for the CSV number format.
std::string format_g17(double v);

}  // namespace mtcs
