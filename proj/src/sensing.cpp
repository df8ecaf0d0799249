#include "sensing.hpp"

#include <Eigen/LU>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "tensor_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mtcs {

std::string to_string(SensingKind kind) {
  switch (kind) {
    case SensingKind::Gaussian: return "gaussian";
    case SensingKind::Bernoulli: return "bernoulli";
    case SensingKind::Identity: return "identity";
    case SensingKind::Custom: return "custom";
  }
  throw std::invalid_argument("unknown sensing kind");
}

SensingKind sensing_kind_from_string(const std::string& name) {
  if (name == "gaussian") return SensingKind::Gaussian;
  if (name == "bernoulli") return SensingKind::Bernoulli;
  if (name == "identity") return SensingKind::Identity;
  if (name == "custom") return SensingKind::Custom;
  throw std::invalid_argument("unknown sensing kind: " + name);
}

Matrix gen_sensing(SensingKind kind, std::size_t rows, std::size_t cols,
                   std::uint64_t seed, std::uint64_t mode_tag) {
  if (rows == 0 || cols == 0)
    throw std::invalid_argument("gen_sensing: matrix extents must be positive");
  if (rows > cols)
    throw std::invalid_argument("gen_sensing: requires R <= I");

  switch (kind) {
    case SensingKind::Identity:
      if (rows != cols) throw std::invalid_argument("gen_sensing: identity requires R = I");
      return Matrix::Identity(rows, cols);
    case SensingKind::Gaussian: {
      KeyedRng rng = KeyedRng(seed).fork(rng_tag::kSensing).fork(mode_tag);
      Matrix m(rows, cols);
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.next_gaussian();
      return m;
    }
    case SensingKind::Bernoulli: {
      KeyedRng rng = KeyedRng(seed).fork(rng_tag::kSensing).fork(mode_tag);
      Matrix m(rows, cols);
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = rng.next_sign();
      return m;
    }
    case SensingKind::Custom:
      throw std::invalid_argument("gen_sensing: custom matrices are caller-supplied");
  }
  throw std::invalid_argument("unknown sensing kind");
}

SensingEnsemble make_ensemble(const std::vector<SensingKind>& kinds,
                              const std::vector<std::size_t>& ranks,
                              const std::vector<std::size_t>& dims, std::uint64_t seed) {
  if (kinds.size() != dims.size() || ranks.size() != dims.size())
    throw ShapeError("make_ensemble: kinds/ranks/dims arity mismatch");
  SensingEnsemble e;
  e.seed = seed;
  e.kinds = kinds;
  e.matrices.reserve(dims.size());
  for (std::size_t n = 0; n < dims.size(); ++n)
    e.matrices.push_back(gen_sensing(kinds[n], ranks[n], dims[n], seed, n));
  return e;
}

SensingEnsemble custom_ensemble(std::vector<Matrix> matrices, std::uint64_t seed) {
  SensingEnsemble e;
  e.seed = seed;
  e.kinds.assign(matrices.size(), SensingKind::Custom);
  e.matrices = std::move(matrices);
  return e;
}

void validate(const SensingEnsemble& e, const std::vector<std::size_t>& dims) {
  if (e.matrices.size() != dims.size())
    throw ShapeError("ensemble has wrong number of sensing matrices");
  if (e.kinds.size() != e.matrices.size())
    throw ShapeError("ensemble kinds/matrices arity mismatch");
  for (std::size_t n = 0; n < dims.size(); ++n) {
    const Matrix& phi = e.matrices[n];
    if (static_cast<std::size_t>(phi.cols()) != dims[n])
      throw ShapeError("sensing matrix " + std::to_string(n) +
                       " columns do not match signal dimension");
    if (phi.rows() < 1 || phi.rows() > phi.cols())
      throw ShapeError("sensing matrix " + std::to_string(n) + " must have 1 <= R <= I");
    if (e.kinds[n] == SensingKind::Identity &&
        !phi.isApprox(Matrix::Identity(phi.rows(), phi.cols())))
      throw ShapeError("identity-kind sensing matrix is not the identity");
  }
}

std::vector<std::size_t> signal_dims(const MeasurementSet& m) {
  std::vector<std::size_t> dims(m.Z.size());
  for (std::size_t n = 0; n < m.Z.size(); ++n) dims[n] = m.Z[n].dim(n);
  return dims;
}

std::vector<std::size_t> sensing_ranks(const MeasurementSet& m) { return m.W.dims(); }

MeasurementSet multiway_measure(const DenseTensor& x, const SensingEnsemble& e) {
  validate(e, x.dims());
  const std::size_t order = x.order();
  MeasurementSet out;
  out.seed = e.seed;
  out.kinds = e.kinds;
  out.Z.reserve(order);
  for (std::size_t n = 0; n < order; ++n) {
    DenseTensor z = x;
    for (std::size_t m = 0; m < order; ++m)
      if (m != n) z = mode_product(z, e.matrices[m], m);
    out.Z.push_back(std::move(z));
  }
  out.W = mode_product(out.Z[0], e.matrices[0], 0);
  return out;
}

TwoModeMeasurements two_mode_measure(const DenseTensor& x, const Matrix& phi1,
                                     const Matrix& phi2) {
  if (x.order() != 3) throw ShapeError("two_mode_measure: signal must have order 3");
  if (static_cast<std::size_t>(phi1.cols()) != x.dim(0) ||
      static_cast<std::size_t>(phi2.cols()) != x.dim(1))
    throw ShapeError("two_mode_measure: sensing matrix columns do not match signal");
  return {phi1 * unfold(x, 0), phi2 * unfold(x, 1), x.dims()};
}

MeasurementSet assemble_from_two_mode(const TwoModeMeasurements& y, const Matrix& phi1,
                                      const Matrix& phi2, const Matrix& phi3) {
  if (y.dims.size() != 3) throw ShapeError("assemble_from_two_mode: dims must have order 3");
  const std::size_t i1 = y.dims[0], i2 = y.dims[1], i3 = y.dims[2];
  const std::size_t r1 = static_cast<std::size_t>(phi1.rows());
  const std::size_t r2 = static_cast<std::size_t>(phi2.rows());
  if (static_cast<std::size_t>(phi1.cols()) != i1 ||
      static_cast<std::size_t>(phi2.cols()) != i2 ||
      static_cast<std::size_t>(phi3.cols()) != i3)
    throw ShapeError("assemble_from_two_mode: sensing matrix columns do not match dims");
  if (static_cast<std::size_t>(y.Y1.rows()) != r1 ||
      static_cast<std::size_t>(y.Y1.cols()) != i2 * i3 ||
      static_cast<std::size_t>(y.Y2.rows()) != r2 ||
      static_cast<std::size_t>(y.Y2.cols()) != i1 * i3)
    throw ShapeError("assemble_from_two_mode: projection shapes do not match dims");

  // Y1 is the mode-1 unfolding of X x_1 Phi1 and Y2 the mode-2 unfolding of
  // X x_2 Phi2.  Folding them back lets the Kronecker-structured products
  // run as plain mode products: identical in exact arithmetic, but without
  // materializing Phi^T kron I.
  const DenseTensor y1_t = fold(y.Y1, 0, {r1, i2, i3});  // X x_1 Phi1
  const DenseTensor y2_t = fold(y.Y2, 1, {i1, r2, i3});  // X x_2 Phi2

  MeasurementSet out;
  out.Z.reserve(3);
  out.Z.push_back(mode_product(y2_t, phi3, 2));  // (Z1)_(2) = Y2 (Phi3^T kron I)
  out.Z.push_back(mode_product(y1_t, phi3, 2));  // (Z2)_(1) = Y1 (Phi3^T kron I)
  out.Z.push_back(mode_product(y1_t, phi2, 1));  // (Z3)_(1) = Y1 (I kron Phi2^T)

  out.W = mode_product(out.Z[2], phi3, 2);
  const DenseTensor w_check = mode_product(out.Z[0], phi1, 0);
  const double w_norm = frobenius_norm(out.W);
  const double diff = frobenius_distance(out.W, w_check);
  if (diff > 1e-10 * std::max(w_norm, 1e-300))
    throw NumericalError("assemble_from_two_mode: W consistency cross-check failed; "
                         "measurements and sensing matrices disagree");
  out.kinds.assign(3, SensingKind::Custom);
  return out;
}

Matrix recover_block_z12(const Matrix& z2, const Matrix& z11, const Matrix& phi1,
                         const Matrix& phi2) {
  const Eigen::Index r = phi1.rows();
  const Eigen::Index i = phi1.cols();
  if (phi2.rows() != r || phi2.cols() != i)
    throw ShapeError("recover_block_z12: Phi1 and Phi2 must share shape R x I");
  if (z2.rows() != i || z2.cols() != r)
    throw ShapeError("recover_block_z12: Z2 must be I x R");
  if (z11.rows() != r || z11.cols() != i - r)
    throw ShapeError("recover_block_z12: Z11 must be R x (I - R)");

  const Matrix phi11 = phi1.leftCols(i - r);
  const Matrix phi12 = phi1.rightCols(r);

  const SvdFactors f = svd(phi12);
  const double smin = f.S(f.S.size() - 1);
  if (smin <= 0.0 || f.S(0) / smin > 1e12)
    throw NumericalError("recover_block_z12: Phi12 block is ill-conditioned; "
                         "re-draw the sensing matrix");

  const Matrix rhs = phi2 * z2 - z11 * phi11.transpose();
  // Solve X Phi12^T = rhs for X.
  return phi12.partialPivLu().solve(rhs.transpose()).transpose();
}

double sampling_ratio(std::size_t rank, std::size_t dim) {
  if (rank == 0 || rank > dim)
    throw std::invalid_argument("sampling_ratio: requires 0 < R <= I");
  const double ratio = static_cast<double>(rank) / static_cast<double>(dim);
  return 2.0 * ratio - ratio * ratio;
}

std::size_t rank_for_sampling_ratio(std::size_t dim, double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("rank_for_sampling_ratio: requires 0 < delta <= 1");
  const double r = static_cast<double>(dim) * (1.0 - std::sqrt(1.0 - delta));
  const long long rounded = std::llround(r);
  return static_cast<std::size_t>(
      std::clamp<long long>(rounded, 1, static_cast<long long>(dim)));
}

namespace {

constexpr int kFormatVersion = 1;

json manifest_json(const std::string& mode, std::uint64_t seed,
                   const std::vector<SensingKind>& kinds,
                   const std::vector<std::size_t>& dims,
                   const std::vector<std::size_t>& ranks) {
  json kinds_json = json::array();
  for (SensingKind k : kinds) kinds_json.push_back(to_string(k));
  return json{{"format_version", kFormatVersion},
              {"mode", mode},
              {"seed", seed},
              {"kinds", kinds_json},
              {"dims", dims},
              {"ranks", ranks}};
}

void write_manifest(const fs::path& dir, const json& manifest) {
  std::ofstream os(dir / "manifest.json");
  if (!os) throw IoError("cannot write manifest in " + dir.string());
  os << manifest.dump(2) << "\n";
}

void write_custom_matrices(const fs::path& dir, const SensingEnsemble& e) {
  for (std::size_t n = 0; n < e.matrices.size(); ++n)
    if (e.kinds[n] == SensingKind::Custom)
      write_ten1_file(tensor_from_matrix(e.matrices[n]),
                      (dir / ("phi_" + std::to_string(n + 1) + ".ten")).string());
}

SensingEnsemble rebuild_ensemble(const fs::path& dir, std::uint64_t seed,
                                 const std::vector<SensingKind>& kinds,
                                 const std::vector<std::size_t>& ranks,
                                 const std::vector<std::size_t>& dims) {
  SensingEnsemble e;
  e.seed = seed;
  e.kinds = kinds;
  for (std::size_t n = 0; n < kinds.size(); ++n) {
    if (kinds[n] == SensingKind::Custom) {
      const fs::path path = dir / ("phi_" + std::to_string(n + 1) + ".ten");
      e.matrices.push_back(matrix_from_tensor(read_ten1_file(path.string())));
    } else {
      e.matrices.push_back(gen_sensing(kinds[n], ranks[n], dims[n], seed, n));
    }
  }
  return e;
}

}  // namespace

void save_measurement_dir(const std::string& dir_name, const MeasurementSet& m,
                          const SensingEnsemble& e) {
  const fs::path dir(dir_name);
  fs::create_directories(dir);
  const auto dims = signal_dims(m);
  validate(e, dims);
  for (std::size_t n = 0; n < m.Z.size(); ++n)
    write_ten1_file(m.Z[n], (dir / ("z_" + std::to_string(n + 1) + ".ten")).string());
  write_ten1_file(m.W, (dir / "w.ten").string());
  write_custom_matrices(dir, e);
  write_manifest(dir, manifest_json("multiway", e.seed, e.kinds, dims, sensing_ranks(m)));
}

void save_measurement_dir(const std::string& dir_name, const TwoModeMeasurements& y,
                          const SensingEnsemble& e) {
  const fs::path dir(dir_name);
  fs::create_directories(dir);
  validate(e, y.dims);
  if (e.matrices.size() != 3)
    throw ShapeError("two-mode measurements require a 3-mode ensemble");
  write_ten1_file(tensor_from_matrix(y.Y1), (dir / "y_1.ten").string());
  write_ten1_file(tensor_from_matrix(y.Y2), (dir / "y_2.ten").string());
  write_custom_matrices(dir, e);
  std::vector<std::size_t> ranks(3);
  for (std::size_t n = 0; n < 3; ++n)
    ranks[n] = static_cast<std::size_t>(e.matrices[n].rows());
  write_manifest(dir, manifest_json("two_mode", e.seed, e.kinds, y.dims, ranks));
}

StoredMeasurements load_measurement_dir(const std::string& dir_name) {
  const fs::path dir(dir_name);
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("cannot open manifest in " + dir.string());
  json manifest;
  try {
    is >> manifest;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  try {
    if (manifest.at("format_version").get<int>() != kFormatVersion)
      throw IoError("unsupported measurement format version");
    StoredMeasurements out;
    const std::string mode = manifest.at("mode").get<std::string>();
    const std::uint64_t seed = manifest.at("seed").get<std::uint64_t>();
    out.dims = manifest.at("dims").get<std::vector<std::size_t>>();
    out.ranks = manifest.at("ranks").get<std::vector<std::size_t>>();
    std::vector<SensingKind> kinds;
    for (const auto& k : manifest.at("kinds"))
      kinds.push_back(sensing_kind_from_string(k.get<std::string>()));
    out.ensemble = rebuild_ensemble(dir, seed, kinds, out.ranks, out.dims);

    if (mode == "multiway") {
      out.two_mode = false;
      out.set.seed = seed;
      out.set.kinds = kinds;
      for (std::size_t n = 0; n < out.dims.size(); ++n)
        out.set.Z.push_back(
            read_ten1_file((dir / ("z_" + std::to_string(n + 1) + ".ten")).string()));
      out.set.W = read_ten1_file((dir / "w.ten").string());
    } else if (mode == "two_mode") {
      out.two_mode = true;
      out.projections.Y1 = matrix_from_tensor(read_ten1_file((dir / "y_1.ten").string()));
      out.projections.Y2 = matrix_from_tensor(read_ten1_file((dir / "y_2.ten").string()));
      out.projections.dims = out.dims;
    } else {
      throw IoError("unknown measurement mode: " + mode);
    }
    return out;
  } catch (const json::exception& e) {
    throw IoError("manifest in " + dir.string() + " is missing fields: " + e.what());
  }
}

}  // namespace mtcs
