#include "tucker.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace mtcs {

void validate(const TuckerModel& model) {
  const std::size_t order = model.core.order();
  if (model.factors.size() != order)
    throw ShapeError("tucker: factor count does not match core order");
  if (model.orthonormal.size() != order)
    throw ShapeError("tucker: orthonormal flag count does not match core order");
  for (std::size_t n = 0; n < order; ++n) {
    if (static_cast<std::size_t>(model.factors[n].cols()) != model.core.dim(n))
      throw ShapeError("tucker: factor " + std::to_string(n) +
                       " columns do not match core dimension");
    if (model.factors[n].rows() == 0)
      throw ShapeError("tucker: factor " + std::to_string(n) + " has no rows");
  }
}

DenseTensor tucker_reconstruct(const TuckerModel& model) {
  validate(model);
  DenseTensor out = model.core;
  for (std::size_t n = 0; n < model.factors.size(); ++n)
    out = mode_product(out, model.factors[n], n);
  return out;
}

namespace {

void check_ranks(const DenseTensor& t, const std::vector<std::size_t>& ranks) {
  if (ranks.size() != t.order()) throw ShapeError("ranks arity does not match tensor order");
  for (std::size_t n = 0; n < ranks.size(); ++n)
    if (ranks[n] == 0 || ranks[n] > t.dim(n))
      throw ShapeError("rank " + std::to_string(n) + " must lie in [1, dim]");
}

DenseTensor project_core(const DenseTensor& t, const std::vector<Matrix>& factors) {
  DenseTensor core = t;
  for (std::size_t n = 0; n < factors.size(); ++n)
    core = mode_product(core, factors[n].transpose(), n);
  return core;
}

}  // namespace

TuckerModel hosvd(const DenseTensor& t, const std::vector<std::size_t>& ranks) {
  check_ranks(t, ranks);
  const std::size_t order = t.order();
  std::vector<Matrix> factors(order);
  for (std::size_t n = 0; n < order; ++n)
    factors[n] = svd(unfold(t, n)).U.leftCols(static_cast<Eigen::Index>(ranks[n]));
  return {project_core(t, factors), std::move(factors),
          std::vector<bool>(order, true)};
}

TuckerModel tucker_als(const DenseTensor& t, const std::vector<std::size_t>& ranks,
                       const AlsOptions& opts, AlsTrace* trace) {
  check_ranks(t, ranks);
  if (opts.max_iters < 0) throw std::invalid_argument("tucker_als: max_iters must be >= 0");
  const std::size_t order = t.order();

  TuckerModel model = hosvd(t, ranks);

  // With orthonormal factors, err^2 = ||t||^2 - ||core||^2.
  const double t_norm2 = frobenius_norm(t) * frobenius_norm(t);
  auto fit_error = [&](const DenseTensor& core) {
    const double c = frobenius_norm(core);
    return std::sqrt(std::max(0.0, t_norm2 - c * c));
  };

  double prev = fit_error(model.core);
  if (trace) {
    trace->fit_errors = {prev};
    trace->iterations = 0;
    trace->converged = false;
  }

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    for (std::size_t n = 0; n < order; ++n) {
      // Contract every mode but n, then refresh factor n from the leading
      // left singular vectors of the result.
      DenseTensor partial = t;
      for (std::size_t m = 0; m < order; ++m)
        if (m != n) partial = mode_product(partial, model.factors[m].transpose(), m);
      model.factors[n] =
          svd(unfold(partial, n)).U.leftCols(static_cast<Eigen::Index>(ranks[n]));
    }
    model.core = project_core(t, model.factors);

    const double err = fit_error(model.core);
    if (trace) {
      trace->fit_errors.push_back(err);
      trace->iterations = iter;
    }
    if (std::abs(prev - err) <= opts.tol * std::max(prev, 1e-300)) {
      if (trace) trace->converged = true;
      break;
    }
    prev = err;
  }
  return model;
}

Matrix best_rank_matrix(const Matrix& m, std::size_t rank) {
  const Eigen::Index r = static_cast<Eigen::Index>(rank);
  if (r < 1 || r > std::min(m.rows(), m.cols()))
    throw std::invalid_argument("best_rank_matrix: rank out of range");
  const SvdFactors f = svd(m);
  return f.U.leftCols(r) * f.S.head(r).asDiagonal() * f.V.leftCols(r).transpose();
}

}  // namespace mtcs
