#include "linalg.hpp"

#include <Eigen/SVD>

#include <limits>
#include <string>

#include "errors.hpp"

namespace mtcs {

SvdFactors svd(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("svd: matrix has non-finite entries");
  if (m.size() == 0) return {Matrix(m.rows(), 0), Vector(0), Matrix(m.cols(), 0)};

  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() == Eigen::Success)
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};

  // Divide-and-conquer failed; fall back to the slower one-sided Jacobi.
  Eigen::JacobiSVD<Matrix> jac(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (jac.info() != Eigen::Success)
    throw NumericalError("svd: backend did not converge (status " +
                         std::to_string(static_cast<int>(jac.info())) + ")");
  return {jac.matrixU(), jac.singularValues(), jac.matrixV()};
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const SvdFactors f = svd(m);
  return f.S.size() > 0 ? f.S(0) : 0.0;
}

double zero_cutoff(const Vector& s, Eigen::Index rows, Eigen::Index cols) {
  if (s.size() == 0) return 0.0;
  return s(0) * static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon();
}

Eigen::Index kept_rank(const Vector& s, Eigen::Index rows, Eigen::Index cols, double tau) {
  const double threshold = std::max(tau, zero_cutoff(s, rows, cols));
  Eigen::Index kept = 0;
  while (kept < s.size() && s(kept) > threshold) ++kept;  // strict: ties dropped
  return kept;
}

Matrix truncated_pinv(const SvdFactors& f, Eigen::Index rows, Eigen::Index cols, double tau) {
  if (tau < 0.0) throw std::invalid_argument("truncated_pinv: tau must be non-negative");
  const Eigen::Index kept = kept_rank(f.S, rows, cols, tau);
  if (kept == 0) return Matrix::Zero(cols, rows);
  return f.V.leftCols(kept) * f.S.head(kept).cwiseInverse().asDiagonal() *
         f.U.leftCols(kept).transpose();
}

Matrix truncated_pinv(const Matrix& m, double tau) {
  return truncated_pinv(svd(m), m.rows(), m.cols(), tau);
}

PinvPropertyReport pinv_properties_check(const Matrix& m, double tau) {
  const SvdFactors f = svd(m);
  const Matrix pinv = truncated_pinv(f, m.rows(), m.cols(), tau);

  PinvPropertyReport report;
  report.kept = kept_rank(f.S, m.rows(), m.cols(), tau);
  report.reconstruct_residual = spectral_norm(m * pinv * m - m);
  report.star_residual = spectral_norm(pinv * m * pinv - pinv);
  report.norm_w_wstar = spectral_norm(m * pinv);
  report.norm_wstar_w = spectral_norm(pinv * m);
  return report;
}

}  // namespace mtcs
