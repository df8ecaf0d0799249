#include "bench.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "errors.hpp"
#include "rng.hpp"

namespace mtcs {

namespace {

Matrix random_orthonormal(std::size_t rows, std::size_t cols, KeyedRng rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Fix the sign ambiguity so the result is a deterministic function of g.
  const auto r_diag = qr.matrixQR().diagonal();
  for (Eigen::Index j = 0; j < q.cols(); ++j)
    if (r_diag(j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

DenseTensor gaussian_tensor(const std::vector<std::size_t>& dims, KeyedRng rng) {
  DenseTensor t(dims);
  for (double& v : t.values()) v = rng.next_gaussian();
  return t;
}

}  // namespace

TuckerModel random_tucker(const std::vector<std::size_t>& dims,
                          const std::vector<std::size_t>& ranks, std::uint64_t seed,
                          double core_decay) {
  if (dims.size() != ranks.size()) throw ShapeError("random_tucker: dims/ranks mismatch");
  if (!(core_decay > 0.0) || core_decay > 1.0)
    throw std::invalid_argument("random_tucker: core decay must lie in (0, 1]");
  for (std::size_t n = 0; n < dims.size(); ++n)
    if (ranks[n] == 0 || ranks[n] > dims[n])
      throw ShapeError("random_tucker: ranks must satisfy 1 <= R <= I");

  const KeyedRng root(seed);
  TuckerModel model;
  model.orthonormal.assign(dims.size(), true);
  const KeyedRng factor_rng = root.fork(rng_tag::kSignalFactor);
  for (std::size_t n = 0; n < dims.size(); ++n)
    model.factors.push_back(random_orthonormal(dims[n], ranks[n], factor_rng.fork(n)));

  model.core = gaussian_tensor(ranks, root.fork(rng_tag::kSignalCore));
  if (core_decay < 1.0) {
    // Damp entry (i_1, ..., i_N) by decay^(sum of indices).
    std::vector<std::size_t> idx(ranks.size(), 0);
    for (std::size_t flat = 0; flat < model.core.size(); ++flat) {
      std::size_t index_sum = 0;
      for (std::size_t v : idx) index_sum += v;
      model.core[flat] *= std::pow(core_decay, static_cast<double>(index_sum));
      for (std::size_t n = 0; n < idx.size(); ++n) {
        if (++idx[n] < ranks[n]) break;
        idx[n] = 0;
      }
    }
  }
  return model;
}

namespace {

// Shared tail of signal generation: normalize X0, add unit-norm noise at
// the requested level, optionally rescale everything to ||X||_F = 1.
NoisySignal finish_signal(TuckerModel model, const NoisySignalSpec& spec) {
  if (spec.epsilon < 0.0) throw std::invalid_argument("signal epsilon must be >= 0");
  if (spec.dims.size() < 2) throw ShapeError("signal must have order >= 2");

  NoisySignal out;
  out.model = std::move(model);
  out.x0 = tucker_reconstruct(out.model);
  const double base_norm = frobenius_norm(out.x0);
  if (base_norm <= 0.0) throw NumericalError("gen_noisy_signal: degenerate zero signal");
  // Bring X0 to unit norm first so epsilon is a relative model error.
  scale(out.x0, 1.0 / base_norm);
  scale(out.model.core, 1.0 / base_norm);

  out.noise = gaussian_tensor(spec.dims, KeyedRng(spec.seed).fork(rng_tag::kNoise));
  const double noise_norm = frobenius_norm(out.noise);
  scale(out.noise, 1.0 / noise_norm);

  out.x = add_scaled(out.x0, spec.epsilon, out.noise);
  out.achieved_epsilon = spec.epsilon;
  if (spec.normalize) {
    const double s = frobenius_norm(out.x);
    scale(out.x, 1.0 / s);
    scale(out.x0, 1.0 / s);
    scale(out.model.core, 1.0 / s);
    out.achieved_epsilon = spec.epsilon / s;
  }
  return out;
}

}  // namespace

NoisySignal gen_noisy_signal(const NoisySignalSpec& spec) {
  return finish_signal(random_tucker(spec.dims, spec.ranks, spec.seed, spec.core_decay),
                       spec);
}

NoisySignal gen_noisy_signal_from(const DenseTensor& base, const NoisySignalSpec& spec,
                                  const AlsOptions& als) {
  if (base.dims() != spec.dims)
    throw ShapeError("gen_noisy_signal_from: spec dims do not match the tensor");
  return finish_signal(tucker_als(base, spec.ranks, als), spec);
}

double psnr(const DenseTensor& ref, const DenseTensor& test) {
  const double peak = max_entry(ref);
  if (peak <= 0.0)
    throw NumericalError("psnr: max(X) <= 0, formula undefined; shift the data");
  const double err = frobenius_distance(test, ref);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(peak / err);
}

std::string to_string(SweepVar var) {
  switch (var) {
    case SweepVar::Tau: return "tau";
    case SweepVar::Epsilon: return "epsilon";
    case SweepVar::Delta: return "delta";
  }
  throw std::invalid_argument("unknown sweep variable");
}

SweepVar sweep_var_from_string(const std::string& name) {
  if (name == "tau") return SweepVar::Tau;
  if (name == "epsilon") return SweepVar::Epsilon;
  if (name == "delta") return SweepVar::Delta;
  throw std::invalid_argument("unknown sweep variable: " + name);
}

namespace {

void check_config(const SweepConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
  if (cfg.grid.empty()) throw std::invalid_argument("sweep: grid must be non-empty");
  for (std::size_t i = 1; i < cfg.grid.size(); ++i)
    if (!(cfg.grid[i] > cfg.grid[i - 1]))
      throw std::invalid_argument("sweep: grid must be strictly increasing");
  if (cfg.kinds.size() != cfg.signal.dims.size())
    throw ShapeError("sweep: kinds arity does not match signal order");
  if (!cfg.sense_ranks.empty() && cfg.sense_ranks.size() != cfg.signal.dims.size())
    throw ShapeError("sweep: sense_ranks arity does not match signal order");
  if (cfg.var == SweepVar::Delta && cfg.signal.dims[0] != cfg.signal.dims[1])
    throw std::invalid_argument("sweep: delta sweeps require dims[0] == dims[1]");
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg) {
  check_config(cfg);
  const std::size_t order = cfg.signal.dims.size();

  SweepResult result;
  const KeyedRng trial_root = KeyedRng(cfg.base_seed).fork(rng_tag::kTrial);

  for (std::size_t p = 0; p < cfg.grid.size(); ++p) {
    const double value = cfg.grid[p];

    NoisySignalSpec signal_spec = cfg.signal;
    if (cfg.var == SweepVar::Epsilon) {
      if (value < 0.0) throw std::invalid_argument("sweep: epsilon grid must be >= 0");
      signal_spec.epsilon = value;
    }
    const NoisySignal signal = gen_noisy_signal(signal_spec);

    // Sensing ranks: explicit override or the signal's model ranks, except
    // identity modes (full dimension) and delta sweeps (ranks in modes 1, 2
    // derived from delta).
    std::vector<std::size_t> sense_ranks =
        cfg.sense_ranks.empty() ? signal_spec.ranks : cfg.sense_ranks;
    double realized = value;
    if (cfg.var == SweepVar::Delta) {
      const std::size_t r = rank_for_sampling_ratio(signal_spec.dims[0], value);
      sense_ranks[0] = sense_ranks[1] = r;
      realized = sampling_ratio(r, signal_spec.dims[0]);
    }
    for (std::size_t n = 0; n < order; ++n)
      if (cfg.kinds[n] == SensingKind::Identity) sense_ranks[n] = signal_spec.dims[n];

    TruncationPolicy policy = cfg.policy;
    if (cfg.var == SweepVar::Tau) {
      if (value < 0.0) throw std::invalid_argument("sweep: tau grid must be >= 0");
      policy = TruncationPolicy::fixed_tau(value);
    } else if (cfg.var == SweepVar::Epsilon && cfg.policy.auto_mode) {
      policy = TruncationPolicy::auto_epsilon(value);  // track the swept model error
    }

    PointSummary summary;
    summary.value = value;
    summary.realized_value = realized;
    std::vector<double> errors, psnrs;

    for (int t = 0; t < cfg.trials; ++t) {
      TrialRecord rec;
      rec.sweep_value = value;
      rec.trial = t;
      rec.seed = trial_root.fork(p).fork(static_cast<std::uint64_t>(t)).stream_key();
      try {
        const SensingEnsemble ensemble =
            make_ensemble(cfg.kinds, sense_ranks, signal_spec.dims, rec.seed);
        const MeasurementSet meas = multiway_measure(signal.x, ensemble);
        const ReconstructionReport report = reconstruct(meas, ensemble, policy);
        rec.error = frobenius_distance(report.reconstruction, signal.x);
        rec.psnr_db = psnr(signal.x, report.reconstruction);
        rec.tau = report.tau_used;
        rec.sigma_min_modes = sigma_min_per_mode(report, sense_ranks);
        rec.wall_ms = report.wall_ms;
        errors.push_back(rec.error);
        psnrs.push_back(rec.psnr_db);
      } catch (const std::exception& e) {
        rec.error = std::numeric_limits<double>::quiet_NaN();
        rec.psnr_db = std::numeric_limits<double>::quiet_NaN();
        rec.failure = e.what();
      }
      result.records.push_back(std::move(rec));
    }

    summary.trials = static_cast<int>(errors.size());
    if (!errors.empty()) {
      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= static_cast<double>(errors.size());
      double var = 0.0;
      for (double e : errors) var += (e - mean) * (e - mean);
      var = errors.size() > 1 ? var / static_cast<double>(errors.size() - 1) : 0.0;
      summary.mean_error = mean;
      summary.std_error = std::sqrt(var);
      summary.min_error = *std::min_element(errors.begin(), errors.end());
      summary.max_error = *std::max_element(errors.begin(), errors.end());
      double psnr_mean = 0.0;
      for (double v : psnrs) psnr_mean += v;
      summary.mean_psnr = psnr_mean / static_cast<double>(psnrs.size());
    }
    result.summary.push_back(std::move(summary));
  }
  return result;
}

std::string format_g17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, SweepVar var, const std::vector<TrialRecord>& records) {
  os << "sweep_var,value,trial,seed,error,psnr_db,tau,sigma_min_modes,wall_ms\n";
  const std::string name = to_string(var);
  for (const TrialRecord& r : records) {
    os << name << ',' << format_g17(r.sweep_value) << ',' << r.trial << ',' << r.seed
       << ',' << format_g17(r.error) << ',' << format_g17(r.psnr_db) << ','
       << format_g17(r.tau) << ',';
    for (std::size_t i = 0; i < r.sigma_min_modes.size(); ++i) {
      if (i) os << ';';
      os << format_g17(r.sigma_min_modes[i]);
    }
    os << ',' << format_g17(r.wall_ms) << '\n';
  }
}

}  // namespace mtcs
