#ifndef ICEFILL_ANALYSIS_HPP
#define ICEFILL_ANALYSIS_HPP

#include <vector>

#include "icefill/types.hpp"

// Closed-form MSE expressions and asymptotic verifiers. These are the
// analytic oracles the Monte-Carlo side is checked against.
namespace icefill {

/// MSE of the continuous (water-filling) allocation:
/// sum_k lambda_k sigma2 / (p_k lambda_k + sigma2).
[[nodiscard]] double mse_waterfilling(const VecD& eigenvalues, const PowerAllocation& alloc,
                                      double sigma2);

/// MSE of the integer (ice-filling) allocation:
/// sum_k lambda_k sigma2 / (n_k lambda_k + sigma2).
[[nodiscard]] double mse_icefilling(const VecD& eigenvalues, const PilotAllocation& alloc,
                                    double sigma2);

/// Upper bound on |mse_waterfilling - mse_icefilling| from the unit
/// quantization error: sum_k lambda_k^2 sigma2 /
/// ((p_k lambda_k + sigma2)((p_k - 1) lambda_k + sigma2)).
/// Valid only when every power exceeds 1; otherwise throws
/// BoundNotApplicableError.
[[nodiscard]] double mse_gap_bound(const VecD& eigenvalues, const PowerAllocation& alloc,
                                   double sigma2);

/// Expected MSE of an unstructured (random) observation matrix:
/// sum_k lambda_k sigma2 / ((Q/M) lambda_k + sigma2).
[[nodiscard]] double mse_random(const VecD& eigenvalues, int num_slots, int dim, double sigma2);

/// Exact MSE of the Bayesian estimator designed against used_kernel while
/// the channel actually has covariance true_kernel:
/// Tr((Pi^H W^H - I) Sigma_true (W Pi - I)) + sigma2 Tr(Pi^H Pi)
/// with Pi = (W^H Sigma_used W + sigma2 I)^{-1} W^H Sigma_used.
[[nodiscard]] double mse_mismatched(const ObservationMatrix& obs, const Kernel& used_kernel,
                                    const Kernel& true_kernel, double sigma2);

/// Same quantity written as a function of the Gram matrix G = W W^H alone,
/// through the operators
///   B     = Sigma_used^{-1} + G / sigma2
///   Omega = G/sigma2 - (G/sigma2^2) B^{-1} G
///   Xi    = G/sigma2^2 - 2 (G/sigma2^3) B^{-1} G + (G/sigma2^4) (B^{-1} G)^2
/// Requires an invertible used kernel (white noise added by the statistical
/// kernel guarantees this). Throws NumericError when the inversion fails.
[[nodiscard]] double mse_mismatched_gram(const MatC& gram, const Kernel& used_kernel,
                                         const Kernel& true_kernel, double sigma2);

enum class AllocationMethod { waterfill, icefill, random };

/// Closed-form MSE under the white-error statistical kernel
/// Sigma + sigma_h2 I, for designs computed from that kernel:
///   sum_m sigma2 (lambda_m sigma2 + psi_m (lambda_m + sigma_h2)^2)
///         / (psi_m (lambda_m + sigma_h2) + sigma2)^2
/// where psi is the method's allocation over the shifted spectrum
/// (continuous powers, integer counts, or the flat Q/M). eigenvalues must be
/// the true spectrum padded with zeros to the ambient dimension.
[[nodiscard]] double mse_statistical(AllocationMethod method, const VecD& eigenvalues_padded,
                                     double sigma_h2, double sigma2, int num_slots);

/// Variant of the statistical-kernel MSE when allocation is forced to the
/// true rank-K support: powers come from perfect-kernel water-filling over
/// the unshifted top-K spectrum.
[[nodiscard]] double mse_rank_forced(const VecD& eigenvalues_topk, double sigma_h2, double sigma2,
                                     int num_slots);

/// max_k |n_k - p_k| between matched integer and continuous allocations.
/// The quantization theorem asserts this is < 1.
[[nodiscard]] double verify_quantization(const PilotAllocation& pilot,
                                         const PowerAllocation& power);

struct ScalingReport {
  double slope = 0.0;      ///< OLS slope of ln(delta) vs ln(Q)
  double prefactor = 0.0;  ///< exp(intercept)
  VecD deltas;             ///< the fitted ordinates
};

/// Ordinary least-squares log-log fit of an MSE formula over a Q grid
/// (at least 5 points). method picks the formula; sigma_h2 < 0 means the
/// perfect-kernel Lemmas, otherwise the statistical-kernel form.
[[nodiscard]] ScalingReport asymptotic_mse(AllocationMethod method, const VecD& eigenvalues,
                                           double sigma_h2, double sigma2,
                                           const std::vector<int>& q_grid, int dim);

}  // namespace icefill

#endif
