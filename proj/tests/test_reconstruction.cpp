#include <doctest.h>

#include <cstring>

#include "bench.hpp"
#include "errors.hpp"
#include "helpers.hpp"
#include "linalg.hpp"
#include "reconstruction.hpp"
#include "tucker.hpp"

using namespace mtcs;
using test::random_matrix;
using test::random_tensor;

namespace {

DenseTensor exact_rank_signal(const std::vector<std::size_t>& dims,
                              const std::vector<std::size_t>& ranks, std::uint64_t seed) {
  return tucker_reconstruct(random_tucker(dims, ranks, seed));
}

}  // namespace

TEST_CASE("exact recovery of a multilinear-rank-(3,4,5) tensor at tau = 0") {
  const DenseTensor x = exact_rank_signal({20, 25, 30}, {3, 4, 5}, 601);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {3, 4, 5},
      {20, 25, 30}, 607);
  const MeasurementSet m = multiway_measure(x, e);
  const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::fixed_tau(0.0));
  CHECK(relative_error(r.reconstruction, x) < 1e-10);
  CHECK(r.warnings.empty());
  for (auto count : r.truncation_counts) CHECK(count == 0);
}

TEST_CASE("identity sensing reproduces the signal exactly") {
  const DenseTensor x = random_tensor({4, 5, 3}, 613);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Identity, SensingKind::Identity, SensingKind::Identity}, {4, 5, 3},
      {4, 5, 3}, 0);
  const MeasurementSet m = multiway_measure(x, e);
  const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::fixed_tau(0.0));
  CHECK(relative_error(r.reconstruction, x) < 1e-12);
}

TEST_CASE("SVD-aligned sensing reconstructs the truncated SVD") {
  const std::size_t rank = 5;
  const Matrix x = random_matrix(30, 24, 617);
  const SvdFactors f = svd(x);
  const SensingEnsemble e = custom_ensemble(
      {f.U.leftCols(rank).transpose(), f.V.leftCols(rank).transpose()});
  const DenseTensor xt = tensor_from_matrix(x);
  const MeasurementSet m = multiway_measure(xt, e);
  const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::fixed_tau(0.0));
  const Matrix want = best_rank_matrix(x, rank);
  CHECK((matrix_from_tensor(r.reconstruction) - want).norm() < 1e-10 * want.norm());
}

TEST_CASE("reconstruction at tau below every sigma_R matches tau = 0 bitwise-close") {
  const DenseTensor x = exact_rank_signal({12, 11, 10}, {3, 3, 3}, 619);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {3, 3, 3},
      {12, 11, 10}, 631);
  const MeasurementSet m = multiway_measure(x, e);

  const ReconstructionReport at_zero = reconstruct(m, e, TruncationPolicy::fixed_tau(0.0));
  const auto sigma = sigma_min_per_mode(at_zero, sensing_ranks(m));
  const double below = 0.9 * *std::min_element(sigma.begin(), sigma.end());
  const ReconstructionReport at_tau = reconstruct(m, e, TruncationPolicy::fixed_tau(below));
  CHECK(frobenius_distance(at_zero.reconstruction, at_tau.reconstruction) <=
        1e-12 * frobenius_norm(at_zero.reconstruction));
}

TEST_CASE("increasing tau never increases retained ranks") {
  const DenseTensor x = random_tensor({8, 9, 7}, 641);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {4, 4, 4},
      {8, 9, 7}, 643);
  const MeasurementSet m = multiway_measure(x, e);

  std::vector<Eigen::Index> prev_kept(3, 100);
  for (double tau : {0.0, 0.01, 0.1, 1.0, 10.0}) {
    const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::fixed_tau(tau));
    for (std::size_t n = 0; n < 3; ++n) {
      const Eigen::Index kept = r.w_spectra[n].size() - r.truncation_counts[n];
      CHECK(kept <= prev_kept[n]);
      prev_kept[n] = kept;
    }
  }
}

TEST_CASE("truncation counts match the spectrum") {
  const DenseTensor x = random_tensor({6, 6, 6}, 647);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {3, 3, 3},
      {6, 6, 6}, 653);
  const MeasurementSet m = multiway_measure(x, e);
  const double tau = 0.5;
  const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::fixed_tau(tau));
  for (std::size_t n = 0; n < 3; ++n) {
    Eigen::Index dropped = 0;
    for (Eigen::Index i = 0; i < r.w_spectra[n].size(); ++i)
      if (r.w_spectra[n](i) <= tau) ++dropped;
    CHECK(r.truncation_counts[n] == dropped);
  }
}

TEST_CASE("rank-deficient W at tau = 0 warns instead of failing") {
  // Signal of multilinear rank (2,2,2) sensed at ranks (3,3,3): the core W
  // cannot reach full rank.
  const DenseTensor x = exact_rank_signal({10, 10, 10}, {2, 2, 2}, 659);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {3, 3, 3},
      {10, 10, 10}, 661);
  const MeasurementSet m = multiway_measure(x, e);
  const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::fixed_tau(0.0));
  CHECK(!r.warnings.empty());
  // The truncated pseudo-inverse still recovers the rank-2 signal exactly.
  CHECK(relative_error(r.reconstruction, x) < 1e-9);
}

TEST_CASE("two-mode pipeline equals the direct multiway reconstruction") {
  const DenseTensor x = exact_rank_signal({20, 25, 30}, {3, 4, 5}, 673);
  const Matrix phi1 = gen_sensing(SensingKind::Gaussian, 3, 20, 677, 0);
  const Matrix phi2 = gen_sensing(SensingKind::Gaussian, 4, 25, 677, 1);
  const Matrix phi3 = gen_sensing(SensingKind::Gaussian, 5, 30, 677, 2);

  const ReconstructionReport via_alg1 = reconstruct_two_mode(
      two_mode_measure(x, phi1, phi2), phi1, phi2, phi3, TruncationPolicy::fixed_tau(0.0));
  CHECK(relative_error(via_alg1.reconstruction, x) < 1e-9);

  const MeasurementSet direct = multiway_measure(x, custom_ensemble({phi1, phi2, phi3}));
  const ReconstructionReport via_direct =
      reconstruct(direct, custom_ensemble({phi1, phi2, phi3}),
                  TruncationPolicy::fixed_tau(0.0));
  CHECK(relative_error(via_alg1.reconstruction, via_direct.reconstruction) < 1e-10);
}

TEST_CASE("two-mode pipeline with identity matrices is exact and deterministic") {
  const DenseTensor x = random_tensor({4, 5, 6}, 683);
  const Matrix i1 = Matrix::Identity(4, 4);
  const Matrix i2 = Matrix::Identity(5, 5);
  const Matrix i3 = Matrix::Identity(6, 6);
  const TwoModeMeasurements y = two_mode_measure(x, i1, i2);

  const ReconstructionReport a = reconstruct_two_mode(y, i1, i2, i3, TruncationPolicy::fixed_tau(0.0));
  const ReconstructionReport b = reconstruct_two_mode(y, i1, i2, i3, TruncationPolicy::fixed_tau(0.0));
  CHECK(relative_error(a.reconstruction, x) < 1e-12);
  CHECK(std::memcmp(a.reconstruction.data(), b.reconstruction.data(),
                    sizeof(double) * x.size()) == 0);
}

TEST_CASE("tau0 and its rough overestimate") {
  CHECK(tau0(0.1, 4.0, 1.0) == doctest::Approx(0.05));
  CHECK(tau0(0.0, 2.0, 3.0) == 0.0);
  CHECK_THROWS_AS(tau0(0.1, 0.0, 1.0), std::invalid_argument);

  // Orthonormal-row matrices have unit spectral norm, so the rough estimate
  // collapses to epsilon.
  const Matrix q1 = Matrix::Identity(3, 8);
  const Matrix q2 = Matrix::Identity(4, 9);
  CHECK(tau0_rough(0.25, q1, q2) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("bound constants with SVD-aligned sensing give a=1, b=6, c=4") {
  const std::size_t rank = 4;
  const Matrix x0 = random_matrix(12, 1, 691) * random_matrix(1, 10, 701);
  // Build an orthonormal-factor model of a random rank-4 matrix.
  const Matrix base = random_matrix(12, rank, 709) * random_matrix(rank, 10, 719);
  const TuckerModel model = hosvd(tensor_from_matrix(base), {rank, rank});
  const SensingEnsemble aligned = custom_ensemble(
      {model.factors[0].transpose(), model.factors[1].transpose()});

  const BoundReport r = bound_constants(model, aligned);
  CHECK(r.a == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.b == doctest::Approx(6.0).epsilon(1e-10));
  CHECK(r.c == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("bound constants are homogeneous in the sensing scale") {
  const TuckerModel model =
      hosvd(tensor_from_matrix(random_matrix(10, 2, 727) * random_matrix(2, 9, 733)), {2, 2});
  const Matrix phi1 = random_matrix(2, 10, 739);
  const Matrix phi2 = random_matrix(2, 9, 743);
  const double s = 3.0;

  const BoundReport base = bound_constants(model, custom_ensemble({phi1, phi2}));
  const BoundReport scaled = bound_constants(model, custom_ensemble({s * phi1, s * phi2}));
  // A_n = U_n (Phi_n U_n)^{-1} scales by 1/s, so ||A_n Phi_n|| is invariant,
  // c picks up s^2 through ||Phi1|| ||Phi2|| and a drops by s^2.  The
  // measurement core W scales by s^2, so thresholds live on an s^2 scale:
  // tau0 scales by s^2 and the bound value is scale-invariant.
  CHECK(scaled.c / base.c == doctest::Approx(s * s).epsilon(1e-9));
  CHECK(scaled.a / base.a == doctest::Approx(1.0 / (s * s)).epsilon(1e-9));
  CHECK(scaled.b == doctest::Approx(base.b).epsilon(1e-9));

  const double eps = 0.1;
  const double t_base = tau0(eps, base.a, base.c);
  const double t_scaled = tau0(eps, scaled.a, scaled.c);
  CHECK(t_scaled / t_base == doctest::Approx(s * s).epsilon(1e-9));

  // Bound values agree when tau is measured on the matching scale.
  const std::vector<double> sigma = {1e-8, 1e-8};
  const double b0 = error_bound(base, sigma, t_base, eps).bound_value;
  const double b1 = error_bound(scaled, sigma, t_scaled, eps).bound_value;
  CHECK(b0 == doctest::Approx(b1).epsilon(1e-9));
}

TEST_CASE("bound constants reject the unproved cases") {
  const TuckerModel model3 = random_tucker({6, 6, 4}, {2, 2, 4}, 751);
  const SensingEnsemble no_identity = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {2, 2, 4},
      {6, 6, 4}, 757);
  CHECK_THROWS_AS(bound_constants(model3, no_identity), std::invalid_argument);

  TuckerModel oblique = random_tucker({6, 6}, {2, 2}, 761);
  oblique.orthonormal = {false, false};
  const SensingEnsemble e2 = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian}, {2, 2}, {6, 6}, 769);
  CHECK_THROWS_AS(bound_constants(oblique, e2), std::invalid_argument);
}

TEST_CASE("error bound plug-in examples") {
  BoundReport constants;
  constants.a = constants.b = constants.c = 1.0;

  const BoundReport low = error_bound(constants, {1.0, 1.0}, 0.0, 0.1);
  CHECK(low.branch == BoundBranch::LowTau);
  CHECK(low.bound_value == doctest::Approx(0.11));

  const BoundReport high = error_bound(constants, {0.01, 0.01}, 0.2, 0.1);
  CHECK(high.branch == BoundBranch::HighTau);
  CHECK(high.bound_value == doctest::Approx(0.35));

  CHECK_THROWS_AS(error_bound(constants, {0.0, 0.0}, 0.0, 0.1), NumericalError);
}

TEST_CASE("high-tau bound is minimized at tau0") {
  BoundReport constants;
  constants.a = 2.0;
  constants.b = 1.0;
  constants.c = 8.0;
  const double eps = 0.05;
  const double t0 = tau0(eps, constants.a, constants.c);
  const std::vector<double> sigma = {1e-6, 1e-6};  // force the high branch
  const double at_t0 = error_bound(constants, sigma, t0, eps).bound_value;
  CHECK(error_bound(constants, sigma, t0 * 1.2, eps).bound_value > at_t0);
  CHECK(error_bound(constants, sigma, t0 * 0.8, eps).bound_value > at_t0);
  // Stationarity: a - c eps^2 / tau0^2 = 0.
  CHECK(constants.a - constants.c * eps * eps / (t0 * t0) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gap branch reports both candidates and claims neither") {
  BoundReport constants;
  constants.a = constants.b = constants.c = 1.0;
  const BoundReport gap = error_bound(constants, {0.5, 0.2, 0.05}, 0.3, 0.1);
  CHECK(gap.branch == BoundBranch::Gap);
  CHECK(gap.sigma_under == doctest::Approx(0.05));
  CHECK(gap.sigma_bar == doctest::Approx(0.5));
  CHECK(gap.candidate_low > 0.0);
  CHECK(gap.candidate_high > 0.0);
  CHECK(gap.bound_value == std::max(gap.candidate_low, gap.candidate_high));
}

TEST_CASE("projection residual vanishes below the smallest singular value") {
  const DenseTensor w = random_tensor({4, 5, 3}, 773);
  const auto [h, norm] = projection_residual(w, 0.0);
  CHECK(norm <= 1e-10 * frobenius_norm(w));
  CHECK(h.dims() == w.dims());
}

TEST_CASE("projection residual above the spectrum equals the tensor norm") {
  const DenseTensor w = random_tensor({3, 4, 3}, 787);
  double sigma_max = 0.0;
  for (std::size_t n = 0; n < 3; ++n)
    sigma_max = std::max(sigma_max, spectral_norm(unfold(w, n)));
  const double tau = 2.0 * sigma_max;
  const auto [h, norm] = projection_residual(w, tau);
  CHECK(norm == doctest::Approx(frobenius_norm(w)).epsilon(1e-12));
  // The contract bound (sqrt(R1)+sqrt(R2)+sqrt(R3)) tau must cover it.
  const double bound = (std::sqrt(3.0) + std::sqrt(4.0) + std::sqrt(3.0)) * tau;
  CHECK(norm <= bound);
}

TEST_CASE("projection residual bound holds on seeded draws straddling tau") {
  for (std::uint64_t seed : {797ULL, 809ULL, 811ULL}) {
    const DenseTensor w = random_tensor({5, 4, 6}, seed);
    std::vector<double> sigma_min(3);
    for (std::size_t n = 0; n < 3; ++n) {
      const Vector s = svd(unfold(w, n)).S;
      sigma_min[n] = s(s.size() - 1);
    }
    const double bar = *std::max_element(sigma_min.begin(), sigma_min.end());
    const double under = *std::min_element(sigma_min.begin(), sigma_min.end());

    const auto below = projection_residual(w, under * (1 - 1e-12));
    CHECK(below.second <= 1e-10 * frobenius_norm(w));

    for (double factor : {1.0001, 1.5, 3.0, 10.0}) {
      const double tau = bar * factor;
      const auto above = projection_residual(w, tau);
      const double bound = (std::sqrt(5.0) + std::sqrt(4.0) + std::sqrt(6.0)) * tau;
      CHECK(above.second <= bound);
    }
  }
}

TEST_CASE("auto policy uses the rough tau0 estimate") {
  const DenseTensor x = exact_rank_signal({10, 9, 8}, {2, 2, 2}, 821);
  const SensingEnsemble e = make_ensemble(
      {SensingKind::Gaussian, SensingKind::Gaussian, SensingKind::Gaussian}, {2, 2, 2},
      {10, 9, 8}, 823);
  const MeasurementSet m = multiway_measure(x, e);
  const double eps = 1e-3;
  const ReconstructionReport r = reconstruct(m, e, TruncationPolicy::auto_epsilon(eps));
  CHECK(r.tau_used ==
        doctest::Approx(tau0_rough(eps, e.matrices[0], e.matrices[1])).epsilon(1e-12));
  CHECK_THROWS_AS(TruncationPolicy::auto_epsilon(0.0), std::invalid_argument);
  CHECK_THROWS_AS(TruncationPolicy::fixed_tau(-0.5), std::invalid_argument);
}
