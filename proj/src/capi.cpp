#include "mtcs.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bench.hpp"
#include "errors.hpp"
#include "reconstruction.hpp"
#include "sensing.hpp"
#include "tensor.hpp"
#include "tensor_io.hpp"

using nlohmann::json;

struct mtcs_tensor {
  mtcs::DenseTensor t;
};

struct mtcs_ensemble {
  mtcs::SensingEnsemble e;
};

struct mtcs_measurements {
  mtcs::StoredMeasurements s;
};

namespace {

thread_local std::string g_last_error;

mtcs_status fail(mtcs_status code, const char* what) {
  g_last_error = what;
  return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
mtcs_status guarded(Fn&& fn) {
  try {
    fn();
    return MTCS_OK;
  } catch (const mtcs::ShapeError& e) {
    return fail(MTCS_ERR_SHAPE_MISMATCH, e.what());
  } catch (const mtcs::IoError& e) {
    return fail(MTCS_ERR_IO, e.what());
  } catch (const mtcs::NumericalError& e) {
    return fail(MTCS_ERR_NUMERICAL, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(MTCS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(MTCS_ERR_NUMERICAL, e.what());
  }
}

bool null_arg(const void* p) { return p == nullptr; }

mtcs_status require_nonnull(std::initializer_list<const void*> ps) {
  for (const void* p : ps)
    if (null_arg(p)) return fail(MTCS_ERR_INVALID_ARGUMENT, "null argument");
  return MTCS_OK;
}

std::vector<std::size_t> to_sizes(const uint64_t* v, uint32_t n) {
  return std::vector<std::size_t>(v, v + n);
}

mtcs::SensingKind to_kind(mtcs_kind k) {
  switch (k) {
    case MTCS_KIND_GAUSSIAN: return mtcs::SensingKind::Gaussian;
    case MTCS_KIND_BERNOULLI: return mtcs::SensingKind::Bernoulli;
    case MTCS_KIND_IDENTITY: return mtcs::SensingKind::Identity;
  }
  throw std::invalid_argument("unknown sensing kind code");
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

json report_to_json(const mtcs::ReconstructionReport& r) {
  json spectra = json::array();
  for (const auto& s : r.w_spectra)
    spectra.push_back(std::vector<double>(s.data(), s.data() + s.size()));
  return json{{"tau", r.tau_used},
              {"truncation_counts", r.truncation_counts},
              {"sigma_spectra", spectra},
              {"wall_ms", r.wall_ms},
              {"warnings", r.warnings}};
}

mtcs_status do_reconstruct(const mtcs_measurements* m, const mtcs::TruncationPolicy& policy,
                           mtcs_tensor** xhat, char** report_json) {
  if (auto rc = require_nonnull({m, xhat}); rc != MTCS_OK) return rc;
  return guarded([&] {
    const mtcs::StoredMeasurements& s = m->s;
    mtcs::ReconstructionReport report =
        s.two_mode ? mtcs::reconstruct_two_mode(s.projections, s.ensemble.matrices[0],
                                      s.ensemble.matrices[1], s.ensemble.matrices[2], policy)
                   : mtcs::reconstruct(s.set, s.ensemble, policy);
    *xhat = new mtcs_tensor{std::move(report.reconstruction)};
    if (report_json) *report_json = dup_string(report_to_json(report).dump(2));
  });
}

mtcs::SweepConfig parse_sweep_config(const std::string& text) {
  json cfg;
  try {
    cfg = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bench config is not valid JSON: ") + e.what());
  }
  try {
    mtcs::SweepConfig out;
    out.var = mtcs::sweep_var_from_string(cfg.at("sweep").get<std::string>());
    out.grid = cfg.at("grid").get<std::vector<double>>();
    out.trials = cfg.value("trials", 1);
    out.base_seed = cfg.value("seed", static_cast<std::uint64_t>(0));

    const json& sig = cfg.at("signal");
    out.signal.dims = sig.at("dims").get<std::vector<std::size_t>>();
    out.signal.ranks = sig.at("ranks").get<std::vector<std::size_t>>();
    out.signal.epsilon = sig.value("epsilon", 0.0);
    out.signal.seed = sig.value("seed", out.base_seed);
    out.signal.normalize = sig.value("normalize", true);
    out.signal.core_decay = sig.value("core_decay", 1.0);

    for (const auto& k : cfg.at("kinds"))
      out.kinds.push_back(mtcs::sensing_kind_from_string(k.get<std::string>()));

    if (cfg.contains("sense_ranks"))
      out.sense_ranks = cfg.at("sense_ranks").get<std::vector<std::size_t>>();

    if (cfg.contains("policy")) {
      const json& pol = cfg.at("policy");
      if (pol.contains("auto_epsilon"))
        out.policy = mtcs::TruncationPolicy::auto_epsilon(pol.at("auto_epsilon").get<double>());
      else
        out.policy = mtcs::TruncationPolicy::fixed_tau(pol.value("tau", 0.0));
    }
    return out;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bench config is incomplete: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* mtcs_version(void) { return "0.1.0"; }

const char* mtcs_last_error(void) { return g_last_error.c_str(); }

void mtcs_string_free(char* s) { delete[] s; }

mtcs_status mtcs_tensor_create(uint32_t order, const uint64_t* dims, const double* data,
                               mtcs_tensor** out) {
  if (auto rc = require_nonnull({dims, out}); rc != MTCS_OK) return rc;
  return guarded([&] {
    std::vector<std::size_t> d = to_sizes(dims, order);
    const std::size_t n = mtcs::num_elements(d);
    std::vector<double> payload =
        data ? std::vector<double>(data, data + n) : std::vector<double>(n, 0.0);
    *out = new mtcs_tensor{mtcs::DenseTensor(std::move(d), std::move(payload))};
  });
}

void mtcs_tensor_destroy(mtcs_tensor* t) { delete t; }

uint32_t mtcs_tensor_order(const mtcs_tensor* t) {
  return t ? static_cast<uint32_t>(t->t.order()) : 0;
}

uint64_t mtcs_tensor_dim(const mtcs_tensor* t, uint32_t mode) {
  if (!t || mode >= t->t.order()) return 0;
  return t->t.dim(mode);
}

uint64_t mtcs_tensor_size(const mtcs_tensor* t) { return t ? t->t.size() : 0; }

const double* mtcs_tensor_data(const mtcs_tensor* t) { return t ? t->t.data() : nullptr; }

mtcs_status mtcs_tensor_read(const char* path, mtcs_tensor** out) {
  if (auto rc = require_nonnull({path, out}); rc != MTCS_OK) return rc;
  return guarded([&] { *out = new mtcs_tensor{mtcs::read_ten1_file(path)}; });
}

mtcs_status mtcs_tensor_write(const mtcs_tensor* t, const char* path) {
  if (auto rc = require_nonnull({t, path}); rc != MTCS_OK) return rc;
  return guarded([&] { mtcs::write_ten1_file(t->t, path); });
}

mtcs_status mtcs_tensor_frobenius_norm(const mtcs_tensor* t, double* out) {
  if (auto rc = require_nonnull({t, out}); rc != MTCS_OK) return rc;
  return guarded([&] { *out = mtcs::frobenius_norm(t->t); });
}

mtcs_status mtcs_psnr(const mtcs_tensor* ref, const mtcs_tensor* test, double* psnr_db) {
  if (auto rc = require_nonnull({ref, test, psnr_db}); rc != MTCS_OK) return rc;
  return guarded([&] { *psnr_db = mtcs::psnr(ref->t, test->t); });
}

mtcs_status mtcs_signal_generate(uint32_t order, const uint64_t* dims,
                                 const uint64_t* ranks, double epsilon, uint64_t seed,
                                 int normalize, double core_decay, mtcs_tensor** x,
                                 mtcs_tensor** x0, double* achieved_epsilon) {
  if (auto rc = require_nonnull({dims, ranks, x}); rc != MTCS_OK) return rc;
  return guarded([&] {
    mtcs::NoisySignalSpec spec;
    spec.dims = to_sizes(dims, order);
    spec.ranks = to_sizes(ranks, order);
    spec.epsilon = epsilon;
    spec.seed = seed;
    spec.normalize = normalize != 0;
    spec.core_decay = core_decay;
    mtcs::NoisySignal sig = mtcs::gen_noisy_signal(spec);
    *x = new mtcs_tensor{std::move(sig.x)};
    if (x0) *x0 = new mtcs_tensor{std::move(sig.x0)};
    if (achieved_epsilon) *achieved_epsilon = sig.achieved_epsilon;
  });
}

mtcs_status mtcs_signal_from_tensor(const mtcs_tensor* base, const uint64_t* ranks,
                                    double epsilon, uint64_t seed, int normalize,
                                    int als_max_iters, double als_tol, mtcs_tensor** x,
                                    mtcs_tensor** x0, double* achieved_epsilon) {
  if (auto rc = require_nonnull({base, ranks, x}); rc != MTCS_OK) return rc;
  return guarded([&] {
    mtcs::NoisySignalSpec spec;
    spec.dims = base->t.dims();
    spec.ranks = to_sizes(ranks, static_cast<uint32_t>(base->t.order()));
    spec.epsilon = epsilon;
    spec.seed = seed;
    spec.normalize = normalize != 0;
    mtcs::AlsOptions als;
    if (als_max_iters > 0) als.max_iters = als_max_iters;
    if (als_tol > 0.0) als.tol = als_tol;
    mtcs::NoisySignal sig = mtcs::gen_noisy_signal_from(base->t, spec, als);
    *x = new mtcs_tensor{std::move(sig.x)};
    if (x0) *x0 = new mtcs_tensor{std::move(sig.x0)};
    if (achieved_epsilon) *achieved_epsilon = sig.achieved_epsilon;
  });
}

mtcs_status mtcs_ensemble_create(uint32_t order, const uint64_t* ranks,
                                 const uint64_t* dims, const mtcs_kind* kinds,
                                 uint64_t seed, mtcs_ensemble** out) {
  if (auto rc = require_nonnull({ranks, dims, kinds, out}); rc != MTCS_OK) return rc;
  return guarded([&] {
    std::vector<mtcs::SensingKind> ks;
    for (uint32_t n = 0; n < order; ++n) ks.push_back(to_kind(kinds[n]));
    *out = new mtcs_ensemble{
        mtcs::make_ensemble(ks, to_sizes(ranks, order), to_sizes(dims, order), seed)};
  });
}

void mtcs_ensemble_destroy(mtcs_ensemble* e) { delete e; }

mtcs_status mtcs_measure_multiway(const mtcs_tensor* x, const mtcs_ensemble* e,
                                  mtcs_measurements** out) {
  if (auto rc = require_nonnull({x, e, out}); rc != MTCS_OK) return rc;
  return guarded([&] {
    mtcs::StoredMeasurements s;
    s.two_mode = false;
    s.set = mtcs::multiway_measure(x->t, e->e);
    s.ensemble = e->e;
    s.dims = x->t.dims();
    s.ranks = mtcs::sensing_ranks(s.set);
    *out = new mtcs_measurements{std::move(s)};
  });
}

mtcs_status mtcs_measure_two_mode(const mtcs_tensor* x, const mtcs_ensemble* e,
                                  mtcs_measurements** out) {
  if (auto rc = require_nonnull({x, e, out}); rc != MTCS_OK) return rc;
  return guarded([&] {
    if (e->e.matrices.size() != 3)
      throw mtcs::ShapeError("two-mode measurement requires a 3-mode ensemble");
    mtcs::validate(e->e, x->t.dims());
    mtcs::StoredMeasurements s;
    s.two_mode = true;
    s.projections = mtcs::two_mode_measure(x->t, e->e.matrices[0], e->e.matrices[1]);
    s.ensemble = e->e;
    s.dims = x->t.dims();
    for (const auto& m : e->e.matrices) s.ranks.push_back(m.rows());
    *out = new mtcs_measurements{std::move(s)};
  });
}

void mtcs_measurements_destroy(mtcs_measurements* m) { delete m; }

mtcs_status mtcs_measurements_save(const mtcs_measurements* m, const char* dir) {
  if (auto rc = require_nonnull({m, dir}); rc != MTCS_OK) return rc;
  return guarded([&] {
    if (m->s.two_mode)
      mtcs::save_measurement_dir(dir, m->s.projections, m->s.ensemble);
    else
      mtcs::save_measurement_dir(dir, m->s.set, m->s.ensemble);
  });
}

mtcs_status mtcs_measurements_load(const char* dir, mtcs_measurements** out) {
  if (auto rc = require_nonnull({dir, out}); rc != MTCS_OK) return rc;
  return guarded([&] { *out = new mtcs_measurements{mtcs::load_measurement_dir(dir)}; });
}

mtcs_status mtcs_reconstruct_fixed(const mtcs_measurements* m, double tau,
                                   mtcs_tensor** xhat, char** report_json) {
  mtcs::TruncationPolicy policy;
  auto rc = guarded([&] { policy = mtcs::TruncationPolicy::fixed_tau(tau); });
  if (rc != MTCS_OK) return rc;
  return do_reconstruct(m, policy, xhat, report_json);
}

mtcs_status mtcs_reconstruct_auto(const mtcs_measurements* m, double epsilon,
                                  mtcs_tensor** xhat, char** report_json) {
  mtcs::TruncationPolicy policy;
  auto rc = guarded([&] { policy = mtcs::TruncationPolicy::auto_epsilon(epsilon); });
  if (rc != MTCS_OK) return rc;
  return do_reconstruct(m, policy, xhat, report_json);
}

mtcs_status mtcs_sampling_ratio(uint64_t rank, uint64_t dim, double* delta) {
  if (auto rc = require_nonnull({delta}); rc != MTCS_OK) return rc;
  return guarded([&] { *delta = mtcs::sampling_ratio(rank, dim); });
}

mtcs_status mtcs_rank_for_ratio(uint64_t dim, double delta, uint64_t* rank,
                                double* realized) {
  if (auto rc = require_nonnull({rank}); rc != MTCS_OK) return rc;
  return guarded([&] {
    const std::size_t r = mtcs::rank_for_sampling_ratio(dim, delta);
    *rank = r;
    if (realized) *realized = mtcs::sampling_ratio(r, dim);
  });
}

mtcs_status mtcs_bench_run(const char* config_json, const char* csv_path,
                           char** summary_json) {
  if (auto rc = require_nonnull({config_json, csv_path}); rc != MTCS_OK) return rc;
  return guarded([&] {
    const mtcs::SweepConfig cfg = parse_sweep_config(config_json);
    const mtcs::SweepResult result = mtcs::run_sweep(cfg);

    std::ofstream os(csv_path);
    if (!os) throw mtcs::IoError(std::string("cannot open CSV for writing: ") + csv_path);
    mtcs::write_csv(os, cfg.var, result.records);
    if (!os) throw mtcs::IoError("CSV write failed");

    if (summary_json) {
      json points = json::array();
      for (const auto& p : result.summary)
        points.push_back(json{{"value", p.value},
                              {"realized_value", p.realized_value},
                              {"trials", p.trials},
                              {"mean_error", p.mean_error},
                              {"std_error", p.std_error},
                              {"min_error", p.min_error},
                              {"max_error", p.max_error},
                              {"mean_psnr", p.mean_psnr}});
      *summary_json =
          dup_string(json{{"sweep", mtcs::to_string(cfg.var)}, {"points", points}}.dump(2));
    }
  });
}

}  // extern "C"
