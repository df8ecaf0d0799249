// Command-line front end for the mtcs shared library.  Subcommands:
//   gen          synthesize a noisy low-multilinear-rank signal (TEN1 file)
//   sense        take multi-way or two-mode compressive measurements
//   reconstruct  run the direct reconstruction on a measurement directory
//   psnr         compare two TEN1 tensors
//   bench        Monte Carlo sweeps over tau / epsilon / delta, CSV output
//
// Exit codes: 0 success, 1 usage error, 2 runtime/numerical failure.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mtcs.h"

using nlohmann::json;

namespace {

constexpr int kExitRuntime = 2;

struct TensorDeleter {
  void operator()(mtcs_tensor* t) const { mtcs_tensor_destroy(t); }
};
struct EnsembleDeleter {
  void operator()(mtcs_ensemble* e) const { mtcs_ensemble_destroy(e); }
};
struct MeasurementsDeleter {
  void operator()(mtcs_measurements* m) const { mtcs_measurements_destroy(m); }
};

using TensorPtr = std::unique_ptr<mtcs_tensor, TensorDeleter>;
using EnsemblePtr = std::unique_ptr<mtcs_ensemble, EnsembleDeleter>;
using MeasurementsPtr = std::unique_ptr<mtcs_measurements, MeasurementsDeleter>;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "error: " << context << ": " << mtcs_last_error() << "\n";
  std::exit(kExitRuntime);
}

void check(mtcs_status rc, const std::string& context) {
  if (rc != MTCS_OK) die(context);
}

TensorPtr read_tensor(const std::string& path) {
  mtcs_tensor* t = nullptr;
  check(mtcs_tensor_read(path.c_str(), &t), "reading " + path);
  return TensorPtr(t);
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

mtcs_kind parse_kind(const std::string& name) {
  if (name == "gaussian") return MTCS_KIND_GAUSSIAN;
  if (name == "bernoulli") return MTCS_KIND_BERNOULLI;
  if (name == "identity") return MTCS_KIND_IDENTITY;
  throw CLI::ValidationError("--kind", "must be gaussian or bernoulli");
}

const char* kind_name(mtcs_kind k) {
  switch (k) {
    case MTCS_KIND_GAUSSIAN: return "gaussian";
    case MTCS_KIND_BERNOULLI: return "bernoulli";
    case MTCS_KIND_IDENTITY: return "identity";
  }
  return "unknown";
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto first = spec.find(':');
  const auto second = spec.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw CLI::ValidationError("--grid", "expected a:b:step");
  try {
    const double a = std::stod(spec.substr(0, first));
    const double b = std::stod(spec.substr(first + 1, second - first - 1));
    const double step = std::stod(spec.substr(second + 1));
    if (!(step > 0.0) || b < a)
      throw CLI::ValidationError("--grid", "requires b >= a and step > 0");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
      const double v = a + step * i;
      if (v > b + step * 1e-9) break;
      grid.push_back(v);
    }
    return grid;
  } catch (const std::invalid_argument&) {
    throw CLI::ValidationError("--grid", "expected numeric a:b:step");
  }
}

// ---- gen ---------------------------------------------------------------

struct GenArgs {
  std::vector<std::uint64_t> dims, ranks;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string out_x0;
  double decay = 1.0;
  bool no_normalize = false;
  std::string input;  // base the signal on a supplied tensor instead
  int als_max_iters = 50;
  double als_tol = 1e-8;
};

int run_gen(const GenArgs& a) {
  mtcs_tensor* x = nullptr;
  mtcs_tensor* x0 = nullptr;
  double achieved = 0.0;
  mtcs_tensor** x0_out = a.out_x0.empty() ? nullptr : &x0;
  if (a.input.empty()) {
    if (a.dims.empty()) {
      std::cerr << "error: gen requires --dims (or --input)\n";
      return 1;
    }
    if (a.ranks.size() != a.dims.size())
      throw CLI::ValidationError("--ranks", "need one rank per dimension");
    check(mtcs_signal_generate(static_cast<uint32_t>(a.dims.size()), a.dims.data(),
                               a.ranks.data(), a.epsilon, a.seed, a.no_normalize ? 0 : 1,
                               a.decay, &x, x0_out, &achieved),
          "generating signal");
  } else {
    TensorPtr base = read_tensor(a.input);
    if (a.ranks.size() != mtcs_tensor_order(base.get()))
      throw CLI::ValidationError("--ranks", "need one rank per tensor mode");
    check(mtcs_signal_from_tensor(base.get(), a.ranks.data(), a.epsilon, a.seed,
                                  a.no_normalize ? 0 : 1, a.als_max_iters, a.als_tol, &x,
                                  x0_out, &achieved),
          "fitting signal model");
  }
  TensorPtr xp(x), x0p(x0);
  check(mtcs_tensor_write(x, a.out.c_str()), "writing " + a.out);
  if (!a.out_x0.empty()) check(mtcs_tensor_write(x0, a.out_x0.c_str()), "writing " + a.out_x0);
  std::cout << "wrote " << a.out << " (achieved epsilon = " << fmt(achieved) << ")\n";
  return 0;
}

// ---- sense -------------------------------------------------------------

struct SenseArgs {
  std::string input;
  std::vector<std::uint64_t> ranks;
  std::string kind = "gaussian";
  std::string mode = "multiway";
  std::uint64_t r3 = 0;
  bool r3_given = false;
  std::uint64_t seed = 0;
  std::string out;
};

int run_sense(const SenseArgs& a) {
  TensorPtr x = read_tensor(a.input);
  const uint32_t order = mtcs_tensor_order(x.get());
  std::vector<std::uint64_t> dims(order);
  for (uint32_t n = 0; n < order; ++n) dims[n] = mtcs_tensor_dim(x.get(), n);

  const mtcs_kind base_kind = parse_kind(a.kind);
  std::vector<std::uint64_t> ranks = a.ranks;
  std::vector<mtcs_kind> kinds(order, base_kind);

  const bool two_mode = a.mode == "two-mode";
  if (!two_mode && a.mode != "multiway")
    throw CLI::ValidationError("--mode", "must be multiway or two-mode");

  if (two_mode) {
    if (order != 3) {
      std::cerr << "error: two-mode sensing requires an order-3 tensor\n";
      return kExitRuntime;
    }
    if (ranks.size() != 2)
      throw CLI::ValidationError("--ranks", "two-mode sensing takes exactly r1,r2");
    // The mode-3 matrix is synthetic: identity unless an explicit rank asks
    // for a Gaussian compression of the third mode.
    ranks.push_back(a.r3_given ? a.r3 : dims[2]);
    kinds[2] = a.r3_given ? MTCS_KIND_GAUSSIAN : MTCS_KIND_IDENTITY;
  } else if (ranks.size() != order) {
    throw CLI::ValidationError("--ranks", "need one rank per tensor mode");
  }

  mtcs_ensemble* e = nullptr;
  check(mtcs_ensemble_create(order, ranks.data(), dims.data(), kinds.data(), a.seed, &e),
        "creating sensing ensemble");
  EnsemblePtr ep(e);

  mtcs_measurements* m = nullptr;
  if (two_mode)
    check(mtcs_measure_two_mode(x.get(), e, &m), "taking two-mode measurements");
  else
    check(mtcs_measure_multiway(x.get(), e, &m), "taking multi-way measurements");
  MeasurementsPtr mp(m);

  check(mtcs_measurements_save(m, a.out.c_str()), "writing " + a.out);
  std::cout << "wrote " << a.out << " (" << a.mode << ", kinds:";
  for (auto k : kinds) std::cout << ' ' << kind_name(k);
  std::cout << ")\n";
  return 0;
}

// ---- reconstruct -------------------------------------------------------

struct ReconstructArgs {
  std::string meas;
  double tau = 0.0;
  double auto_epsilon = 0.0;
  bool auto_given = false;
  std::string out;
  std::string report;
};

int run_reconstruct(const ReconstructArgs& a) {
  mtcs_measurements* m = nullptr;
  check(mtcs_measurements_load(a.meas.c_str(), &m), "loading " + a.meas);
  MeasurementsPtr mp(m);

  mtcs_tensor* xhat = nullptr;
  char* report_json = nullptr;
  if (a.auto_given)
    check(mtcs_reconstruct_auto(m, a.auto_epsilon, &xhat, &report_json), "reconstructing");
  else
    check(mtcs_reconstruct_fixed(m, a.tau, &xhat, &report_json), "reconstructing");
  TensorPtr xp(xhat);

  check(mtcs_tensor_write(xhat, a.out.c_str()), "writing " + a.out);

  const json report = json::parse(report_json);
  mtcs_string_free(report_json);
  if (!a.report.empty()) {
    std::ofstream os(a.report);
    if (!os) {
      std::cerr << "error: cannot write " << a.report << "\n";
      return kExitRuntime;
    }
    os << report.dump(2) << "\n";
  }
  std::cout << "wrote " << a.out << " (tau = " << fmt(report.at("tau").get<double>())
            << ", " << fmt(report.at("wall_ms").get<double>()) << " ms)\n";
  for (const auto& w : report.at("warnings"))
    std::cerr << "warning: " << w.get<std::string>() << "\n";
  return 0;
}

// ---- psnr --------------------------------------------------------------

int run_psnr(const std::string& ref_path, const std::string& test_path) {
  TensorPtr ref = read_tensor(ref_path);
  TensorPtr test = read_tensor(test_path);
  double db = 0.0;
  check(mtcs_psnr(ref.get(), test.get(), &db), "computing PSNR");
  std::cout << fmt(db) << "\n";
  return 0;
}

// ---- bench -------------------------------------------------------------

struct BenchArgs {
  std::string sweep;
  std::string grid;
  int trials = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string config;
  std::string out;
};

int run_bench(const BenchArgs& a) {
  json cfg = json::object();
  if (!a.config.empty()) {
    std::ifstream is(a.config);
    if (!is) {
      std::cerr << "error: cannot open config " << a.config << "\n";
      return kExitRuntime;
    }
    try {
      is >> cfg;
    } catch (const json::exception& e) {
      std::cerr << "error: malformed config " << a.config << ": " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  if (!a.sweep.empty()) cfg["sweep"] = a.sweep;
  if (!a.grid.empty()) cfg["grid"] = parse_grid(a.grid);
  if (a.trials > 0) cfg["trials"] = a.trials;
  if (a.seed_given) cfg["seed"] = a.seed;

  char* summary = nullptr;
  check(mtcs_bench_run(cfg.dump().c_str(), a.out.c_str(), &summary), "running sweep");
  const json s = json::parse(summary);
  mtcs_string_free(summary);

  for (const auto& p : s.at("points")) {
    std::cout << s.at("sweep").get<std::string>() << " = "
              << fmt(p.at("value").get<double>());
    if (p.at("realized_value").get<double>() != p.at("value").get<double>())
      std::cout << " (realized " << fmt(p.at("realized_value").get<double>()) << ")";
    std::cout << ": trials = " << p.at("trials").get<int>()
              << ", mean_error = " << fmt(p.at("mean_error").get<double>())
              << ", std_error = " << fmt(p.at("std_error").get<double>())
              << ", mean_psnr = " << fmt(p.at("mean_psnr").get<double>()) << "\n";
  }
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilinear compressed sensing toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a synthetic noisy signal");
  CLI::Option* dims_opt =
      cmd_gen->add_option("--dims", gen.dims, "signal dimensions d1,d2[,d3,...]")
          ->delimiter(',');
  cmd_gen->add_option("--ranks", gen.ranks, "multilinear ranks r1,r2[,r3,...]")
      ->required()
      ->delimiter(',');
  cmd_gen->add_option("--epsilon", gen.epsilon, "model error of the added noise");
  cmd_gen->add_option("--seed", gen.seed, "RNG seed");
  cmd_gen->add_option("--out", gen.out, "output TEN1 file")->required();
  cmd_gen->add_option("--out-x0", gen.out_x0, "also write the noise-free signal");
  CLI::Option* decay_opt =
      cmd_gen->add_option("--decay", gen.decay, "core spectrum decay in (0,1], 1 = none");
  cmd_gen->add_flag("--no-normalize", gen.no_normalize, "skip ||X||_F = 1 rescaling");
  CLI::Option* input_opt = cmd_gen->add_option(
      "--input", gen.input, "base X0 on the best low-rank fit of this tensor");
  input_opt->excludes(dims_opt);
  input_opt->excludes(decay_opt);
  cmd_gen->add_option("--als-max-iters", gen.als_max_iters, "fit sweeps (with --input)");
  cmd_gen->add_option("--als-tol", gen.als_tol, "relative fit-change tolerance");

  SenseArgs sense;
  CLI::App* cmd_sense = app.add_subcommand("sense", "take compressive measurements");
  cmd_sense->add_option("--input", sense.input, "input TEN1 file")->required();
  cmd_sense->add_option("--ranks", sense.ranks, "sensing ranks")->required()->delimiter(',');
  cmd_sense->add_option("--kind", sense.kind, "gaussian|bernoulli");
  cmd_sense->add_option("--mode", sense.mode, "multiway|two-mode");
  CLI::Option* r3_opt =
      cmd_sense->add_option("--r3", sense.r3, "synthetic mode-3 rank (two-mode only)");
  cmd_sense->add_option("--seed", sense.seed, "RNG seed");
  cmd_sense->add_option("--out", sense.out, "output measurement directory")->required();

  ReconstructArgs rec;
  CLI::App* cmd_rec = app.add_subcommand("reconstruct", "direct reconstruction");
  cmd_rec->add_option("--meas", rec.meas, "measurement directory")->required();
  CLI::Option* tau_opt = cmd_rec->add_option("--tau", rec.tau, "truncation threshold");
  CLI::Option* auto_opt = cmd_rec->add_option("--auto-epsilon", rec.auto_epsilon,
                                              "derive tau from a model-error estimate");
  tau_opt->excludes(auto_opt);
  auto_opt->excludes(tau_opt);
  cmd_rec->add_option("--out", rec.out, "output TEN1 file")->required();
  cmd_rec->add_option("--report", rec.report, "write the JSON reconstruction report");

  std::string psnr_ref, psnr_test;
  CLI::App* cmd_psnr = app.add_subcommand("psnr", "PSNR between two tensors");
  cmd_psnr->add_option("--ref", psnr_ref, "reference TEN1 file")->required();
  cmd_psnr->add_option("--test", psnr_test, "test TEN1 file")->required();

  BenchArgs bench;
  CLI::App* cmd_bench = app.add_subcommand("bench", "Monte Carlo sweep");
  cmd_bench->add_option("--sweep", bench.sweep, "tau|epsilon|delta");
  cmd_bench->add_option("--grid", bench.grid, "grid as a:b:step");
  cmd_bench->add_option("--trials", bench.trials, "trials per grid point");
  CLI::Option* seed_opt = cmd_bench->add_option("--seed", bench.seed, "base seed");
  cmd_bench->add_option("--config", bench.config, "JSON config file");
  cmd_bench->add_option("--out", bench.out, "output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  sense.r3_given = r3_opt->count() > 0;
  rec.auto_given = auto_opt->count() > 0;
  bench.seed_given = seed_opt->count() > 0;

  try {
    if (cmd_gen->parsed()) return run_gen(gen);
    if (cmd_sense->parsed()) return run_sense(sense);
    if (cmd_rec->parsed()) return run_reconstruct(rec);
    if (cmd_psnr->parsed()) return run_psnr(psnr_ref, psnr_test);
    if (cmd_bench->parsed()) return run_bench(bench);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 1;
}
