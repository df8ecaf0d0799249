/*
 * mtcs — multilinear tensor compressed sensing.
 *
 * C interface to a toolkit that reconstructs N-th order tensors from
 * multi-way compressive measurements with a direct (non-iterative)
 * formula, stabilized by a truncated pseudo-inverse.  All objects are
 * opaque handles; every fallible call returns an mtcs_status and leaves a
 * human-readable message in mtcs_last_error() (thread-local).
 *
 * Tensors on disk use the TEN1 format: magic "TEN1", u32 little-endian
 * order N, N x u64 little-endian dims, then prod(dims) f64 little-endian
 * values, first index fastest.  Measurement sets are directories holding
 * one TEN1 file per measurement plus a manifest.json with
 * {format_version, mode, seed, kinds, dims, ranks}.
 */
#ifndef MTCS_H
#define MTCS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MTCS_API __declspec(dllexport)
#else
#define MTCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mtcs_status {
  MTCS_OK = 0,
  MTCS_ERR_INVALID_ARGUMENT = 1,
  MTCS_ERR_SHAPE_MISMATCH = 2,
  MTCS_ERR_IO = 3,
  MTCS_ERR_NUMERICAL = 4,
} mtcs_status;

typedef enum mtcs_kind {
  MTCS_KIND_GAUSSIAN = 0,
  MTCS_KIND_BERNOULLI = 1,
  MTCS_KIND_IDENTITY = 2,
} mtcs_kind;

typedef struct mtcs_tensor mtcs_tensor;
typedef struct mtcs_ensemble mtcs_ensemble;
typedef struct mtcs_measurements mtcs_measurements;

MTCS_API const char* mtcs_version(void);

/* Message describing the last failure on the calling thread. */
MTCS_API const char* mtcs_last_error(void);

/* Frees strings returned through char** output parameters. */
MTCS_API void mtcs_string_free(char* s);

/* ---- dense tensors ---------------------------------------------------- */

/* data may be NULL for a zero-filled tensor; otherwise it must hold
 * prod(dims) doubles in first-index-fastest order. */
MTCS_API mtcs_status mtcs_tensor_create(uint32_t order, const uint64_t* dims,
                                        const double* data, mtcs_tensor** out);
MTCS_API void mtcs_tensor_destroy(mtcs_tensor* t);

MTCS_API uint32_t mtcs_tensor_order(const mtcs_tensor* t);
MTCS_API uint64_t mtcs_tensor_dim(const mtcs_tensor* t, uint32_t mode);
MTCS_API uint64_t mtcs_tensor_size(const mtcs_tensor* t);
MTCS_API const double* mtcs_tensor_data(const mtcs_tensor* t);

MTCS_API mtcs_status mtcs_tensor_read(const char* path, mtcs_tensor** out);
MTCS_API mtcs_status mtcs_tensor_write(const mtcs_tensor* t, const char* path);

MTCS_API mtcs_status mtcs_tensor_frobenius_norm(const mtcs_tensor* t, double* out);

/* PSNR in dB: 20 log10(max(ref) / ||test - ref||_F); +infinity on an exact
 * match. Fails with MTCS_ERR_NUMERICAL when max(ref) <= 0. */
MTCS_API mtcs_status mtcs_psnr(const mtcs_tensor* ref, const mtcs_tensor* test,
                               double* psnr_db);

/* ---- synthetic signals ------------------------------------------------ */

/* X = X0 + epsilon * E with ||E||_F = 1; X0 is the reconstruction of a
 * seeded random Tucker model with the given multilinear ranks.  When
 * normalize is nonzero the result is rescaled to ||X||_F = 1 and
 * achieved_epsilon reports the model error after rescaling.  core_decay in
 * (0, 1] damps the core spectrum (1 = no damping).  x0 may be NULL. */
MTCS_API mtcs_status mtcs_signal_generate(uint32_t order, const uint64_t* dims,
                                          const uint64_t* ranks, double epsilon,
                                          uint64_t seed, int normalize, double core_decay,
                                          mtcs_tensor** x, mtcs_tensor** x0,
                                          double* achieved_epsilon);

/* Same pipeline, but X0 is the best multilinear-rank fit of a supplied
 * tensor (alternating least squares refinement of the truncated HOSVD,
 * stopped at a relative fit change of als_tol or after als_max_iters
 * sweeps; pass 0 / 0.0 for the defaults 50 and 1e-8). */
MTCS_API mtcs_status mtcs_signal_from_tensor(const mtcs_tensor* base,
                                             const uint64_t* ranks, double epsilon,
                                             uint64_t seed, int normalize,
                                             int als_max_iters, double als_tol,
                                             mtcs_tensor** x, mtcs_tensor** x0,
                                             double* achieved_epsilon);

/* ---- sensing and measurement ------------------------------------------ */

/* One sensing matrix per mode, kind[n] applied at rank ranks[n].  Gaussian
 * entries are unnormalized standard normals, Bernoulli entries +-1; both are
 * deterministic in (seed, mode).  Identity requires ranks[n] == dims[n]. */
MTCS_API mtcs_status mtcs_ensemble_create(uint32_t order, const uint64_t* ranks,
                                          const uint64_t* dims, const mtcs_kind* kinds,
                                          uint64_t seed, mtcs_ensemble** out);
MTCS_API void mtcs_ensemble_destroy(mtcs_ensemble* e);

/* Full multi-way measurements Z^(n) (all modes projected except n) plus the
 * core W (all modes projected). */
MTCS_API mtcs_status mtcs_measure_multiway(const mtcs_tensor* x, const mtcs_ensemble* e,
                                           mtcs_measurements** out);

/* Linear projections in modes 1 and 2 only (order-3 signals); the mode-3
 * entry of the ensemble acts as the synthetic matrix of the two-mode
 * reconstruction pipeline (identity for the common hyperspectral case). */
MTCS_API mtcs_status mtcs_measure_two_mode(const mtcs_tensor* x, const mtcs_ensemble* e,
                                           mtcs_measurements** out);

MTCS_API void mtcs_measurements_destroy(mtcs_measurements* m);

MTCS_API mtcs_status mtcs_measurements_save(const mtcs_measurements* m, const char* dir);
MTCS_API mtcs_status mtcs_measurements_load(const char* dir, mtcs_measurements** out);

/* ---- reconstruction ---------------------------------------------------- */

/* Direct reconstruction with a fixed truncation threshold tau (tau = 0 uses
 * the plain pseudo-inverse).  Two-mode measurements run the assembly
 * pipeline first.  report_json (optional) receives a JSON object
 * {tau, truncation_counts, sigma_spectra, wall_ms, warnings}; free it with
 * mtcs_string_free. */
MTCS_API mtcs_status mtcs_reconstruct_fixed(const mtcs_measurements* m, double tau,
                                            mtcs_tensor** xhat, char** report_json);

/* Same, with tau chosen from a model-error estimate via the rough bound
 * tau ~ epsilon * ||Phi1|| * ||Phi2||. */
MTCS_API mtcs_status mtcs_reconstruct_auto(const mtcs_measurements* m, double epsilon,
                                           mtcs_tensor** xhat, char** report_json);

/* ---- sampling ratio ----------------------------------------------------- */

/* delta = 2 (R/I) - (R/I)^2. */
MTCS_API mtcs_status mtcs_sampling_ratio(uint64_t rank, uint64_t dim, double* delta);
/* Nearest R with mtcs_sampling_ratio(R, I) ~ delta; also reports the ratio
 * realized by the rounded rank. */
MTCS_API mtcs_status mtcs_rank_for_ratio(uint64_t dim, double delta, uint64_t* rank,
                                         double* realized);

/* ---- Monte Carlo bench -------------------------------------------------- */

/* Runs a sweep described by a JSON config and writes the per-trial CSV
 * (schema: sweep_var,value,trial,seed,error,psnr_db,tau,sigma_min_modes,
 * wall_ms) to csv_path.  Config object:
 *   {
 *     "sweep":  "tau" | "epsilon" | "delta",
 *     "grid":   [..strictly increasing..],
 *     "trials": K,
 *     "seed":   base seed,
 *     "signal": {"dims": [...], "ranks": [...], "epsilon": E,
 *                 "seed": S (default: base seed), "normalize": true,
 *                 "core_decay": 1.0},
 *     "kinds":  ["gaussian" | "bernoulli" | "identity", ...],
 *     "policy": {"tau": T} or {"auto_epsilon": E}   (default tau = 0)
 *   }
 * summary_json (optional) receives per-point statistics; free with
 * mtcs_string_free. */
MTCS_API mtcs_status mtcs_bench_run(const char* config_json, const char* csv_path,
                                    char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* MTCS_H */
