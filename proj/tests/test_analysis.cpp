#include <doctest.h>

#include <icefill/analysis.hpp>
#include <icefill/channel.hpp>
#include <icefill/design.hpp>
#include <icefill/estimate.hpp>
#include <icefill/kernels.hpp>
#include <icefill/rng.hpp>
#include <icefill/types.hpp>

#include <cmath>
#include <complex>
#include <vector>

using icefill::AllocationMethod;
using icefill::Kernel;
using icefill::MatC;
using icefill::ObservationMatrix;
using icefill::PilotAllocation;
using icefill::PowerAllocation;
using icefill::Rng;
using icefill::VecC;
using icefill::VecD;
using Cx = std::complex<double>;

namespace {

VecD vec(std::initializer_list<double> v) {
  VecD out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

PowerAllocation powers(std::initializer_list<double> v) {
  PowerAllocation alloc;
  alloc.powers = vec(v);
  return alloc;
}

PilotAllocation counts(std::initializer_list<int> v) {
  PilotAllocation alloc;
  alloc.counts.assign(v.begin(), v.end());
  return alloc;
}

Kernel random_psd_kernel(Rng& rng, int m, double ridge = 0.0) {
  MatC a(m, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < m; ++r) a(r, c) = rng.cgaussian();
  MatC psd = a * a.adjoint();
  psd.diagonal().array() += ridge;
  return icefill::perfect_kernel(psd);
}

}  // namespace

// ------------------------------------------------------- closed-form lemmas

TEST_CASE("mse_waterfilling: worked example and limits") {
  const VecD lam = vec({2.0, 1.0});
  CHECK(icefill::mse_waterfilling(lam, powers({1.75, 1.25}), 1.0) ==
        doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(icefill::mse_waterfilling(lam, powers({0.0, 0.0}), 1.0) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(icefill::mse_waterfilling(lam, powers({1e14, 1e14}), 1.0) ==
        doctest::Approx(0.0).epsilon(1e-10));
  CHECK_THROWS_AS((void)icefill::mse_waterfilling(lam, powers({1.0}), 1.0),
                  icefill::InvalidInputError);
}

TEST_CASE("mse_icefilling: worked example equals the final working trace") {
  const VecD lam = vec({2.0, 1.0});
  CHECK(icefill::mse_icefilling(lam, counts({2, 1}), 1.0) ==
        doctest::Approx(0.9).epsilon(1e-12));
  CHECK(icefill::mse_icefilling(lam, counts({0, 0}), 1.0) ==
        doctest::Approx(3.0).epsilon(1e-12));

  // The slot-by-slot recursion's final working eigenvalues sum to the same
  // number the closed form gives.
  const auto basis = icefill::evd_hermitian(
      icefill::perfect_kernel(MatC(vec({2.0, 1.0}).cast<Cx>().asDiagonal())));
  const auto iced = icefill::ice_fill(basis, 1.0, 3);
  CHECK(iced.trajectory.back().sum() == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("integer allocation never beats the continuous one on matched instances") {
  Rng rng(404);
  for (int i = 0; i < 200; ++i) {
    const int k = 1 + static_cast<int>(rng.uniform() * 6.0);
    VecD lam(k);
    for (int j = 0; j < k; ++j) lam[j] = 0.05 + 5.0 * rng.uniform();
    const double sigma2 = 0.1 + 2.0 * rng.uniform();
    const int q = 1 + static_cast<int>(rng.uniform() * 24.0);

    const auto wf = icefill::water_fill(lam, sigma2, static_cast<double>(q));
    const auto basis = icefill::evd_hermitian(
        icefill::perfect_kernel(MatC(lam.cast<Cx>().asDiagonal())));
    const auto iced = icefill::ice_fill(basis, sigma2, q);

    const double d_wf = icefill::mse_waterfilling(lam, wf, sigma2);
    VecD sorted = lam;
    std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<>());
    const double d_if = icefill::mse_icefilling(sorted, iced.allocation, sigma2);
    CHECK(d_if >= d_wf - 1e-12);
  }
}

TEST_CASE("mse_gap_bound: worked example bounds the realized gap") {
  const VecD lam = vec({2.0, 1.0});
  const double bound = icefill::mse_gap_bound(lam, powers({1.75, 1.25}), 1.0);
  CHECK(bound == doctest::Approx(4.0 / (4.5 * 2.5) + 1.0 / (2.25 * 1.25)).epsilon(1e-12));
  const double realized = 0.9 - 8.0 / 9.0;
  CHECK(realized <= bound);
}

TEST_CASE("mse_gap_bound: refuses allocations with any power at or below 1") {
  const VecD lam = vec({2.0, 1.0});
  // Q=2 waterfill puts 0.75 on the weak mode: bound regime does not apply.
  const auto alloc = icefill::water_fill(lam, 1.0, 2.0);
  CHECK(alloc.powers[1] < 1.0);
  CHECK_THROWS_AS((void)icefill::mse_gap_bound(lam, alloc, 1.0),
                  icefill::BoundNotApplicableError);
}

TEST_CASE("single-mode budgets quantize exactly: zero wf/if gap") {
  const VecD lam = vec({3.0});
  const int q = 7;
  const auto wf = icefill::water_fill(lam, 1.0, static_cast<double>(q));
  CHECK(wf.powers[0] == doctest::Approx(7.0).epsilon(1e-12));
  const double d_wf = icefill::mse_waterfilling(lam, wf, 1.0);
  const double d_if = icefill::mse_icefilling(lam, counts({7}), 1.0);
  CHECK(d_wf == doctest::Approx(d_if).epsilon(1e-12));
}

TEST_CASE("mse_random: worked example and edge cases") {
  CHECK(icefill::mse_random(vec({2.0, 1.0}), 4, 2, 1.0) ==
        doctest::Approx(11.0 / 15.0).epsilon(1e-12));
  CHECK(icefill::mse_random(vec({2.0, 1.0}), 0, 2, 1.0) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)icefill::mse_random(vec({1.0}), -1, 2, 1.0),
                  icefill::InvalidInputError);
}

TEST_CASE("random designs trail the integer design when M >> K") {
  Rng rng(505);
  for (int i = 0; i < 100; ++i) {
    const int k = 1 + static_cast<int>(rng.uniform() * 3.0);
    const int m = 4 * k + static_cast<int>(rng.uniform() * 8.0);
    VecD lam(k);
    for (int j = 0; j < k; ++j) lam[j] = 0.2 + 4.0 * rng.uniform();
    std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
    const double sigma2 = 0.2 + rng.uniform();
    const int q = 2 * m;

    const auto basis = icefill::evd_hermitian(
        icefill::perfect_kernel(MatC(lam.cast<Cx>().asDiagonal())));
    const auto iced = icefill::ice_fill(basis, sigma2, q);
    const double d_if = icefill::mse_icefilling(lam, iced.allocation, sigma2);
    const double d_rnd = icefill::mse_random(lam, q, m, sigma2);
    CHECK(d_rnd > d_if);
  }
}

// ----------------------------------------------------- mismatched-kernel MSE

TEST_CASE("mse_mismatched: scalar example gives 11/16") {
  ObservationMatrix obs;
  obs.matrix = MatC::Ones(1, 1);
  obs.mode = icefill::ObservationMode::unit_norm_columns;
  Kernel used, truth;
  used.matrix = MatC::Constant(1, 1, Cx{3.0, 0.0});
  used.label = icefill::KernelLabel::perfect;
  truth.matrix = MatC::Constant(1, 1, Cx{2.0, 0.0});
  truth.label = icefill::KernelLabel::perfect;
  CHECK(icefill::mse_mismatched(obs, used, truth, 1.0) ==
        doctest::Approx(11.0 / 16.0).epsilon(1e-12));
  // Matched scalar for comparison: posterior variance 2/3.
  CHECK(icefill::mse_mismatched(obs, truth, truth, 1.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("mse_mismatched: matched kernel reduces to the posterior trace") {
  Rng rng(606);
  const Kernel k = random_psd_kernel(rng, 5);
  const auto obs = icefill::random_matrix(5, 3, icefill::RandomMode::gaussian_unit_norm, rng);
  const double sigma2 = 0.7;
  const icefill::MmseWeight weight(obs, k, sigma2);
  CHECK(icefill::mse_mismatched(obs, k, k, sigma2) ==
        doctest::Approx(weight.posterior_trace()).epsilon(1e-8));
}

TEST_CASE("mse_mismatched: empirical MSE with the wrong kernel matches the formula") {
  Rng rng(707);
  const Kernel truth = random_psd_kernel(rng, 3);
  const Kernel used = random_psd_kernel(rng, 3, 0.3);
  const auto obs = icefill::random_matrix(3, 4, icefill::RandomMode::phase_only, rng);
  const double sigma2 = 0.8;
  const double predicted = icefill::mse_mismatched(obs, used, truth, sigma2);

  const auto basis = icefill::evd_hermitian(truth);
  const icefill::MmseWeight weight(obs, used, sigma2);
  double acc = 0.0;
  const int trials = 3000;
  for (int t = 0; t < trials; ++t) {
    Rng trial_rng(9000 + static_cast<std::uint64_t>(t));
    const VecC h = icefill::draw_gaussian_channel(basis, trial_rng);
    const VecC y = icefill::receive_pilots(obs, h, sigma2, trial_rng);
    acc += (icefill::mmse_estimate(weight, y).posterior_mean - h).squaredNorm();
  }
  CHECK(acc / trials == doctest::Approx(predicted).epsilon(0.03));
}

TEST_CASE("mse_mismatched_gram: scalar example through the Gram path") {
  Kernel used, truth;
  used.matrix = MatC::Constant(1, 1, Cx{3.0, 0.0});
  used.label = icefill::KernelLabel::statistical;
  truth.matrix = MatC::Constant(1, 1, Cx{2.0, 0.0});
  truth.label = icefill::KernelLabel::perfect;
  const MatC gram = MatC::Ones(1, 1);
  CHECK(icefill::mse_mismatched_gram(gram, used, truth, 1.0) ==
        doctest::Approx(11.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("mse_mismatched_gram: zero Gram returns the true prior trace") {
  Rng rng(808);
  const Kernel truth = random_psd_kernel(rng, 4);
  const Kernel used = random_psd_kernel(rng, 4, 0.5);
  const double trace = truth.matrix.trace().real();
  CHECK(icefill::mse_mismatched_gram(MatC::Zero(4, 4), used, truth, 0.9) ==
        doctest::Approx(trace).epsilon(1e-10));
}

TEST_CASE("mse_mismatched and mse_mismatched_gram agree on random inputs") {
  Rng rng(909);
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 3 + rep % 4;
    const int q = 1 + rep % 6;
    const Kernel truth = random_psd_kernel(rng, m);
    const Kernel used = random_psd_kernel(rng, m, 0.2);
    const auto obs = icefill::random_matrix(m, q, icefill::RandomMode::gaussian_unit_norm, rng);
    const double sigma2 = 0.3 + 0.2 * rep;
    const double direct = icefill::mse_mismatched(obs, used, truth, sigma2);
    const MatC gram = obs.matrix * obs.matrix.adjoint();
    const double via_gram = icefill::mse_mismatched_gram(gram, used, truth, sigma2);
    CHECK(direct == doctest::Approx(via_gram).epsilon(1e-8));
  }
}

// ------------------------------------------------- statistical-kernel closed form

TEST_CASE("mse_statistical: worked K=1 example gives 0.4793") {
  const VecD padded = vec({2.0, 0.0});
  const double got =
      icefill::mse_statistical(AllocationMethod::waterfill, padded, 0.5, 1.0, 2);
  CHECK(got == doctest::Approx(13.25 / 30.25 + 0.05 / 1.21).epsilon(1e-12));
}

TEST_CASE("mse_statistical: zero kernel error reduces to the perfect-kernel lemmas") {
  const VecD lam = vec({3.0, 2.0, 0.5});
  const double sigma2 = 0.6;
  const int q = 9;
  const auto wf = icefill::water_fill(lam, sigma2, static_cast<double>(q));
  CHECK(icefill::mse_statistical(AllocationMethod::waterfill, lam, 0.0, sigma2, q) ==
        doctest::Approx(icefill::mse_waterfilling(lam, wf, sigma2)).epsilon(1e-12));

  const auto basis = icefill::evd_hermitian(
      icefill::perfect_kernel(MatC(lam.cast<Cx>().asDiagonal())));
  const auto iced = icefill::ice_fill(basis, sigma2, q);
  CHECK(icefill::mse_statistical(AllocationMethod::icefill, lam, 0.0, sigma2, q) ==
        doctest::Approx(icefill::mse_icefilling(lam, iced.allocation, sigma2)).epsilon(1e-12));

  CHECK(icefill::mse_statistical(AllocationMethod::random, lam, 0.0, sigma2, q) ==
        doctest::Approx(icefill::mse_random(lam, q, 3, sigma2)).epsilon(1e-12));
}

TEST_CASE("mse_statistical: agrees with the Gram form for wf/if/rnd designs") {
  // True kernel diag(lambda); believed kernel adds sigma_h2 on the diagonal.
  // The designed Gram is then diagonal in the same basis: psi values for wf,
  // integer counts for if, and (Q/M) I for rnd.
  const VecD lam = vec({2.0, 1.0, 0.4, 0.0});
  const double sigma_h2 = 0.3;
  const double sigma2 = 0.7;
  const int q = 12;
  const int m = 4;

  Kernel truth;
  truth.matrix = lam.cast<Cx>().asDiagonal();
  truth.label = icefill::KernelLabel::perfect;
  const Kernel used = icefill::statistical_kernel(truth, sigma_h2);

  const VecD shifted = (lam.array() + sigma_h2).matrix();

  SUBCASE("waterfill") {
    const auto alloc = icefill::water_fill(shifted, sigma2, static_cast<double>(q));
    MatC gram = MatC::Zero(m, m);
    gram.diagonal() = alloc.powers.cast<Cx>();
    CHECK(icefill::mse_statistical(AllocationMethod::waterfill, lam, sigma_h2, sigma2, q) ==
          doctest::Approx(icefill::mse_mismatched_gram(gram, used, truth, sigma2))
              .epsilon(1e-8));
  }
  SUBCASE("icefill") {
    const auto basis = icefill::evd_hermitian(used);
    const auto iced = icefill::ice_fill(basis, sigma2, q);
    MatC gram = MatC::Zero(m, m);
    for (int k = 0; k < m; ++k) {
      gram(k, k) = static_cast<double>(iced.allocation.counts[static_cast<std::size_t>(k)]);
    }
    CHECK(icefill::mse_statistical(AllocationMethod::icefill, lam, sigma_h2, sigma2, q) ==
          doctest::Approx(icefill::mse_mismatched_gram(gram, used, truth, sigma2))
              .epsilon(1e-8));
  }
  SUBCASE("random, idealized Gram") {
    const MatC gram = (static_cast<double>(q) / m) * MatC::Identity(m, m);
    CHECK(icefill::mse_statistical(AllocationMethod::random, lam, sigma_h2, sigma2, q) ==
          doctest::Approx(icefill::mse_mismatched_gram(gram, used, truth, sigma2))
              .epsilon(1e-8));
  }
}

TEST_CASE("mse_statistical: close to an actual random design at large Q/M") {
  const VecD lam = vec({2.0, 1.0, 0.5, 0.0});
  const double sigma_h2 = 0.25;
  const double sigma2 = 1.0;
  const int m = 4;
  const int q = 128;  // Q/M = 32

  Kernel truth;
  truth.matrix = lam.cast<Cx>().asDiagonal();
  truth.label = icefill::KernelLabel::perfect;
  const Kernel used = icefill::statistical_kernel(truth, sigma_h2);

  Rng rng(1111);
  const auto obs = icefill::random_matrix(m, q, icefill::RandomMode::phase_only, rng);
  const double actual = icefill::mse_mismatched(obs, used, truth, sigma2);
  const double formula =
      icefill::mse_statistical(AllocationMethod::random, lam, sigma_h2, sigma2, q);
  CHECK(formula == doctest::Approx(actual).epsilon(0.05));
}

TEST_CASE("mse_statistical: kernel error never helps") {
  const VecD lam = vec({3.0, 1.2, 0.8, 0.0, 0.0});
  const double sigma2 = 0.5;
  const int q = 10;
  const VecD positive = lam.head(3);
  const auto wf = icefill::water_fill(positive, sigma2, static_cast<double>(q));
  const double matched = icefill::mse_waterfilling(positive, wf, sigma2);
  for (double sigma_h2 : {0.05, 0.2, 1.0, 5.0}) {
    const double mismatched =
        icefill::mse_statistical(AllocationMethod::waterfill, lam, sigma_h2, sigma2, q);
    CHECK(mismatched >= matched - 1e-12);
  }
}

TEST_CASE("mse_statistical: input validation") {
  CHECK_THROWS_AS(
      (void)icefill::mse_statistical(AllocationMethod::waterfill, VecD(), 0.1, 1.0, 2),
      icefill::InvalidInputError);
  CHECK_THROWS_AS((void)icefill::mse_statistical(AllocationMethod::waterfill, vec({1.0}),
                                                 0.1, 1.0, 0),
                  icefill::InvalidInputError);
  CHECK_THROWS_AS((void)icefill::mse_statistical(AllocationMethod::waterfill, vec({1.0}),
                                                 -0.1, 1.0, 2),
                  icefill::InvalidInputError);
}

// ------------------------------------------------------------- rank forcing

TEST_CASE("mse_rank_forced: beats the unforced allocation on the K=1 example") {
  const double forced = icefill::mse_rank_forced(vec({2.0}), 0.5, 1.0, 2);
  // p = Q = 2 on the single true mode; term with shifted s = 2.5.
  CHECK(forced == doctest::Approx(14.5 / 36.0).epsilon(1e-12));
  const double unforced =
      icefill::mse_statistical(AllocationMethod::waterfill, vec({2.0, 0.0}), 0.5, 1.0, 2);
  CHECK(forced < unforced);
}

TEST_CASE("mse_rank_forced: zero kernel error reduces to the waterfilling MSE") {
  const VecD lam = vec({3.0, 1.0});
  const auto wf = icefill::water_fill(lam, 1.0, 6.0);
  CHECK(icefill::mse_rank_forced(lam, 0.0, 1.0, 6) ==
        doctest::Approx(icefill::mse_waterfilling(lam, wf, 1.0)).epsilon(1e-12));
}

TEST_CASE("mse_rank_forced: monotone nonincreasing in the slot budget") {
  double prev = 1e300;
  for (int q : {2, 4, 8, 16, 32, 64}) {
    const double val = icefill::mse_rank_forced(vec({2.0}), 0.5, 1.0, q);
    CHECK(val <= prev + 1e-15);
    prev = val;
  }
}

// ------------------------------------------------------------- quantization

TEST_CASE("verify_quantization: worked example and the K=1 exact case") {
  CHECK(icefill::verify_quantization(counts({2, 1}), powers({1.75, 1.25})) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(icefill::verify_quantization(counts({5}), powers({5.0})) == 0.0);
  CHECK_THROWS_AS((void)icefill::verify_quantization(counts({1}), powers({1.0, 0.0})),
                  icefill::InvalidInputError);
}

TEST_CASE("integer and continuous allocations stay within one slot everywhere") {
  Rng rng(1212);
  for (int i = 0; i < 300; ++i) {
    const int k = 1 + static_cast<int>(rng.uniform() * 5.0);
    VecD lam(k);
    for (int j = 0; j < k; ++j) lam[j] = 0.05 + 4.0 * rng.uniform();
    std::sort(lam.data(), lam.data() + lam.size(), std::greater<>());
    const double sigma2 = 0.1 + 1.5 * rng.uniform();
    const int q = 1 + static_cast<int>(rng.uniform() * 40.0);

    const auto wf = icefill::water_fill(lam, sigma2, static_cast<double>(q));
    const auto basis = icefill::evd_hermitian(
        icefill::perfect_kernel(MatC(lam.cast<Cx>().asDiagonal())));
    const auto iced = icefill::ice_fill(basis, sigma2, q);
    CHECK(icefill::verify_quantization(iced.allocation, wf) < 1.0);
  }
}

TEST_CASE("ice observation factors as eigenvectors times a slot-count switch") {
  // W W^H reconstructed from the design equals U diag(counts) U^H.
  Rng rng(1313);
  const Kernel k = random_psd_kernel(rng, 5);
  const auto basis = icefill::evd_hermitian(k);
  const auto iced = icefill::ice_fill(basis, 0.9, 7);
  const MatC lhs = iced.observation.matrix * iced.observation.matrix.adjoint();
  VecD diag(basis.rank());
  for (int j = 0; j < basis.rank(); ++j) {
    diag[j] = static_cast<double>(iced.allocation.counts[static_cast<std::size_t>(j)]);
  }
  const MatC rhs = basis.vectors * diag.cast<Cx>().asDiagonal() * basis.vectors.adjoint();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
}

// ------------------------------------------------------------- scaling fits

TEST_CASE("asymptotic_mse: waterfilling MSE decays like 1/Q") {
  const VecD lam = vec({4.5, 1.5, 1.1, 0.6});
  const std::vector<int> grid = {64, 128, 256, 512, 1024, 2048, 4096};
  const auto report =
      icefill::asymptotic_mse(AllocationMethod::waterfill, lam, -1.0, 1.0, grid, 4);
  CHECK(report.slope == doctest::Approx(-1.0).epsilon(0.1));
  REQUIRE(report.deltas.size() == 7);
  for (Eigen::Index i = 1; i < report.deltas.size(); ++i) {
    CHECK(report.deltas[i] < report.deltas[i - 1]);
  }
}

TEST_CASE("asymptotic_mse: random-design prefactor grows with the array size") {
  // Lemma-level contrast: the random design's MSE prefactor scales with M
  // while the integer design's does not.
  const VecD lam = vec({2.0, 1.0});
  const std::vector<int> grid = {4096, 8192, 16384, 32768, 65536};
  const auto rnd_small =
      icefill::asymptotic_mse(AllocationMethod::random, lam, -1.0, 1.0, grid, 8);
  const auto rnd_large =
      icefill::asymptotic_mse(AllocationMethod::random, lam, -1.0, 1.0, grid, 32);
  CHECK(rnd_large.prefactor / rnd_small.prefactor == doctest::Approx(4.0).epsilon(0.05));
  // Directly at the deepest grid point the 4x array pays 4x the MSE.
  CHECK(rnd_large.deltas[4] / rnd_small.deltas[4] == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("asymptotic_mse: huge kernel error approaches sigma2 M^2/Q") {
  // With overwhelming kernel uncertainty the believed spectrum is flat, the
  // allocation splits evenly, and the MSE tends to sigma2 M^2 / Q.
  const int m = 8;
  const int q = 64;
  VecD lam = VecD::Zero(m);
  lam[0] = 2.0;
  lam[1] = 1.0;
  lam[2] = 0.5;
  lam[3] = 0.25;
  const double sigma2 = 1.0;
  const double got =
      icefill::mse_statistical(AllocationMethod::waterfill, lam, 1e6, sigma2, q);
  const double want = sigma2 * static_cast<double>(m) * m / q;
  CHECK(got == doctest::Approx(want).epsilon(0.01));
}

TEST_CASE("asymptotic_mse: input validation") {
  const VecD lam = vec({1.0});
  CHECK_THROWS_AS((void)icefill::asymptotic_mse(AllocationMethod::waterfill, lam, -1.0, 1.0,
                                                {1, 2, 3, 4}, 1),
                  icefill::InvalidInputError);
  CHECK_THROWS_AS((void)icefill::asymptotic_mse(AllocationMethod::waterfill, lam, -1.0, 1.0,
                                                {1, 2, 3, 4, 0}, 1),
                  icefill::InvalidInputError);
}
