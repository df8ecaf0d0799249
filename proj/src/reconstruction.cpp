#include "reconstruction.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace mtcs {

TruncationPolicy TruncationPolicy::fixed_tau(double tau) {
  if (tau < 0.0) throw std::invalid_argument("truncation policy: tau must be >= 0");
  TruncationPolicy p;
  p.tau = tau;
  return p;
}

TruncationPolicy TruncationPolicy::auto_epsilon(double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("truncation policy: auto mode requires epsilon > 0");
  TruncationPolicy p;
  p.auto_mode = true;
  p.epsilon = epsilon;
  return p;
}

std::vector<double> sigma_min_per_mode(const ReconstructionReport& report,
                                       const std::vector<std::size_t>& ranks) {
  if (ranks.size() != report.w_spectra.size())
    throw ShapeError("sigma_min_per_mode: ranks arity mismatch");
  std::vector<double> out(ranks.size(), 0.0);
  for (std::size_t n = 0; n < ranks.size(); ++n) {
    const Vector& s = report.w_spectra[n];
    const Eigen::Index r = static_cast<Eigen::Index>(ranks[n]);
    out[n] = (r >= 1 && r <= s.size()) ? s(r - 1) : 0.0;
  }
  return out;
}

ReconstructionReport reconstruct(const MeasurementSet& m, const SensingEnsemble& e,
                                 const TruncationPolicy& policy) {
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t order = m.W.order();
  if (m.Z.size() != order)
    throw ShapeError("reconstruct: measurement count does not match tensor order");
  if (e.matrices.size() != order)
    throw ShapeError("reconstruct: ensemble arity does not match tensor order");
  for (std::size_t n = 0; n < order; ++n) {
    const DenseTensor& z = m.Z[n];
    if (z.order() != order) throw ShapeError("reconstruct: Z measurement has wrong order");
    for (std::size_t k = 0; k < order; ++k) {
      const std::size_t expected =
          (k == n) ? static_cast<std::size_t>(e.matrices[n].cols()) : m.W.dim(k);
      if (z.dim(k) != expected)
        throw ShapeError("reconstruct: Z[" + std::to_string(n) + "] shape mismatch");
    }
    if (static_cast<std::size_t>(e.matrices[n].rows()) != m.W.dim(n))
      throw ShapeError("reconstruct: W shape does not match ensemble ranks");
  }

  ReconstructionReport report;
  report.tau_used = policy.auto_mode
                        ? tau0_rough(policy.epsilon, e.matrices[0], e.matrices[1])
                        : policy.tau;

  DenseTensor xhat = m.W;
  for (std::size_t n = 0; n < order; ++n) {
    const Matrix wn = unfold(m.W, n);
    const SvdFactors f = svd(wn);
    const Eigen::Index kept = kept_rank(f.S, wn.rows(), wn.cols(), report.tau_used);
    report.w_spectra.push_back(f.S);
    report.truncation_counts.push_back(f.S.size() - kept);
    if (report.tau_used == 0.0 && kept < std::min(wn.rows(), wn.cols()))
      report.warnings.push_back("W_(" + std::to_string(n + 1) +
                                ") is numerically rank-deficient at tau = 0");
    // Identity sensing with nothing truncated makes Z_n W_(n)^{*tau} the
    // identity (Z_n = W_(n), full row rank), so the mode product is a no-op.
    if (e.kinds.size() == order && e.kinds[n] == SensingKind::Identity &&
        kept == wn.rows())
      continue;
    const Matrix pinv = truncated_pinv(f, wn.rows(), wn.cols(), report.tau_used);
    xhat = mode_product(xhat, unfold(m.Z[n], n) * pinv, n);
  }
  report.reconstruction = std::move(xhat);

  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

ReconstructionReport reconstruct_two_mode(const TwoModeMeasurements& y,
                                          const Matrix& phi1, const Matrix& phi2,
                                          const Matrix& phi3,
                                          const TruncationPolicy& policy) {
  MeasurementSet m = assemble_from_two_mode(y, phi1, phi2, phi3);
  return reconstruct(m, custom_ensemble({phi1, phi2, phi3}), policy);
}

double tau0(double epsilon, double a, double c) {
  if (epsilon < 0.0) throw std::invalid_argument("tau0: epsilon must be >= 0");
  if (!(a > 0.0)) throw std::invalid_argument("tau0: constant a must be positive");
  if (c < 0.0) throw std::invalid_argument("tau0: constant c must be >= 0");
  return epsilon * std::sqrt(c / a);
}

double tau0_rough(double epsilon, const Matrix& phi1, const Matrix& phi2) {
  if (epsilon < 0.0) throw std::invalid_argument("tau0_rough: epsilon must be >= 0");
  return epsilon * spectral_norm(phi1) * spectral_norm(phi2);
}

BoundReport bound_constants(const TuckerModel& x0_model, const SensingEnsemble& e) {
  validate(x0_model);
  const std::size_t order = x0_model.core.order();
  if (order != 2 && order != 3)
    throw std::invalid_argument("bound_constants: defined for orders 2 and 3 only");
  if (e.matrices.size() != order)
    throw ShapeError("bound_constants: ensemble arity does not match model");
  if (order == 3) {
    const Matrix& phi3 = e.matrices[2];
    if (phi3.rows() != phi3.cols() ||
        !phi3.isApprox(Matrix::Identity(phi3.rows(), phi3.cols())))
      throw std::invalid_argument(
          "bound_constants: the order-3 bound requires identity sensing in mode 3");
  }
  for (std::size_t n = 0; n < 2; ++n) {
    if (!x0_model.orthonormal[n])
      throw std::invalid_argument("bound_constants: model factors must be orthonormal");
    const Matrix& u = x0_model.factors[n];
    if ((u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm() > 1e-8)
      throw std::invalid_argument(
          "bound_constants: factor flagged orthonormal is not orthonormal");
  }

  double norm_a[2], norm_aphi[2], norm_phi[2];
  for (std::size_t n = 0; n < 2; ++n) {
    const Matrix& u = x0_model.factors[n];
    const Matrix& phi = e.matrices[n];
    if (phi.cols() != u.rows())
      throw ShapeError("bound_constants: sensing matrix does not match factor");
    const Matrix phi_u = phi * u;  // R_n x R_n
    Eigen::FullPivLU<Matrix> lu(phi_u);
    if (!lu.isInvertible())
      throw NumericalError("bound_constants: Phi_n U_n is singular (degenerate draw)");
    const Matrix a_n = u * lu.inverse();  // U_n (Phi_n U_n)^{-1}
    norm_a[n] = spectral_norm(a_n);
    norm_aphi[n] = spectral_norm(a_n * phi);
    norm_phi[n] = spectral_norm(phi);
  }

  BoundReport r;
  r.a = norm_a[0] * norm_a[1];
  if (order == 3) {
    const double r1 = static_cast<double>(x0_model.core.dim(0));
    const double r2 = static_cast<double>(x0_model.core.dim(1));
    const double i3 = static_cast<double>(x0_model.factors[2].rows());
    r.a *= std::sqrt(r1) + std::sqrt(r2) + std::sqrt(i3);
  }
  r.b = 1.0 + norm_aphi[0] * norm_aphi[1] +
        norm_a[0] * (1.0 + norm_aphi[1]) * norm_phi[0] +
        norm_a[1] * (1.0 + norm_aphi[0]) * norm_phi[1];
  r.c = (1.0 + norm_aphi[0]) * (1.0 + norm_aphi[1]) * norm_phi[0] * norm_phi[1];
  return r;
}

BoundReport error_bound(const BoundReport& constants, std::vector<double> sigma_min_modes,
                        double tau, double epsilon) {
  if (tau < 0.0 || epsilon < 0.0)
    throw std::invalid_argument("error_bound: tau and epsilon must be >= 0");
  if (sigma_min_modes.size() < 2)
    throw std::invalid_argument("error_bound: need per-mode sigma for at least 2 modes");

  BoundReport r = constants;
  r.sigma_min_per_mode = std::move(sigma_min_modes);
  r.tau_used = tau;
  r.epsilon = epsilon;

  const double sigma_r = std::min(r.sigma_min_per_mode[0], r.sigma_min_per_mode[1]);
  r.sigma_bar = *std::max_element(r.sigma_min_per_mode.begin(), r.sigma_min_per_mode.end());
  r.sigma_under = *std::min_element(r.sigma_min_per_mode.begin(), r.sigma_min_per_mode.end());

  if (tau <= r.sigma_under) {
    if (sigma_r <= 0.0)
      throw NumericalError("error_bound: sigma_R = 0 in the low-tau branch (W is "
                           "rank-deficient)");
    r.branch = BoundBranch::LowTau;
    r.bound_value = r.candidate_low = r.b * epsilon + r.c * epsilon * epsilon / sigma_r;
    r.candidate_high = 0.0;
  } else if (tau > r.sigma_bar) {
    r.branch = BoundBranch::HighTau;
    r.bound_value = r.candidate_high =
        r.a * tau + r.b * epsilon + r.c * epsilon * epsilon / tau;
    r.candidate_low = 0.0;
  } else {
    // No bound is claimed between sigma_under and sigma_bar; report both
    // plug-in values without claiming either.
    r.branch = BoundBranch::Gap;
    r.candidate_low =
        sigma_r > 0.0 ? r.b * epsilon + r.c * epsilon * epsilon / sigma_r : 0.0;
    r.candidate_high = r.a * tau + r.b * epsilon + r.c * epsilon * epsilon / tau;
    r.bound_value = std::max(r.candidate_low, r.candidate_high);
  }
  return r;
}

std::pair<DenseTensor, double> projection_residual(const DenseTensor& w, double tau) {
  if (w.order() != 3) throw ShapeError("projection_residual: tensor must have order 3");
  DenseTensor projected = w;
  for (std::size_t n = 0; n < 3; ++n) {
    const Matrix wn = unfold(w, n);
    const Matrix projector = wn * truncated_pinv(wn, tau);  // R_n x R_n
    projected = mode_product(projected, projector, n);
  }
  DenseTensor h = add_scaled(projected, -1.0, w);
  const double norm = frobenius_norm(h);
  return {std::move(h), norm};
}

}  // namespace mtcs
