#ifndef ICEFILL_DESIGN_HPP
#define ICEFILL_DESIGN_HPP

#include <vector>

#include "icefill/rng.hpp"
#include "icefill/types.hpp"

// Observation-matrix designers: continuous water-filling over kernel
// eigendirections, its greedy per-slot quantization (ice-filling), a
// phase-only majorization-minimization design, and reference baselines.
namespace icefill {

/// Water-filling power allocation: p_k = max(beta - sigma2/lambda_k, 0) with
/// sum p_k = total_power. The water level beta is found by bisection run for
/// a fixed 200 halvings (resolution far below 1e-12 * total_power), so equal
/// inputs give bit-equal outputs. Throws InvalidInputError for an empty
/// spectrum, non-positive sigma2, or non-positive budget.
[[nodiscard]] PowerAllocation water_fill(const VecD& eigenvalues, double sigma2,
                                         double total_power);

/// Ideal observation matrix U_K [diag(sqrt(p)) 0]: column k <= K is
/// sqrt(p_k) u_k, remaining columns zero. ||W||_F^2 equals the power budget.
/// When num_slots < rank, only the first num_slots scaled eigenvectors fit;
/// callers wanting the full allocation must provide num_slots >= rank.
[[nodiscard]] ObservationMatrix water_fill_matrix(const EigenBasis& basis,
                                                  const PowerAllocation& alloc, int num_slots);

/// Greedy per-slot design. Holds one run of the sequential algorithm:
/// observation matrix, integer pilot allocation, and the working-eigenvalue
/// trajectory (trajectory[t][k] = lambda_k after t slots) for property checks.
struct IceFillResult {
  ObservationMatrix observation;
  PilotAllocation allocation;
  std::vector<VecD> trajectory;
};

/// Per slot, pick the currently largest working eigenvalue (ties -> smallest
/// index), emit its eigenvector, and squeeze that eigenvalue by
/// lambda <- lambda sigma2 / (lambda + sigma2). Internally tracked as "ice
/// levels" sigma2/lambda that rise by exactly 1 per assignment.
/// Throws InvalidInputError for sigma2 <= 0 or num_slots < 1.
[[nodiscard]] IceFillResult ice_fill(const EigenBasis& basis, double sigma2, int num_slots);

/// Bayesian posterior covariance after observing through w:
/// Sigma - (Sigma w w^H Sigma) / (w^H Sigma w + sigma2).
/// Throws InvalidInputError for a zero direction or sigma2 <= 0.
[[nodiscard]] Kernel posterior_kernel_update(const Kernel& prior, const VecC& w, double sigma2);

/// ln det(I_Q + W^H Sigma W / sigma2) in nats, via Cholesky of the Q x Q
/// Gram matrix. Throws NumericError if the factorization fails.
[[nodiscard]] double mutual_information(const ObservationMatrix& obs, const Kernel& kernel,
                                        double sigma2);

/// One-slot information gain ln(1 + w^H Sigma_t w / sigma2).
[[nodiscard]] double mi_increment(const Kernel& posterior, const VecC& w, double sigma2);

struct MmOptions {
  int max_iter = 200;
  double rel_tol = 1e-6;
};

/// Phase-only design outcome. iterations[t] is the inner-loop count for slot
/// t; objectives[t] the inner objective w^H Sigma_t w after each iteration
/// (non-decreasing); converged[t] is false when the slot hit max_iter before
/// meeting rel_tol.
struct MmDesignResult {
  ObservationMatrix observation;
  std::vector<int> iterations;
  std::vector<VecD> objectives;
  std::vector<bool> converged;
};

/// Majorization-minimization design under the per-entry modulus constraint
/// |w_m| = 1/sqrt(M). Per slot: random unit-modulus start, iterate
/// w <- (1/sqrt(M)) exp(j arg((X - lambda_max I + Sigma_t) w)) with
/// X = Tr(lambda_max I - Sigma_t) I until the objective's relative change
/// drops below rel_tol or max_iter is hit, then downdate the posterior.
[[nodiscard]] MmDesignResult mm_design(const Kernel& kernel, double sigma2, int num_slots,
                                       Rng& rng, const MmOptions& opts = {});

enum class RandomMode { gaussian_unit_norm, phase_only };

/// Unstructured baselines: CN(0, 1/M) entries with unit-normalized columns,
/// or i.i.d. phases at fixed modulus 1/sqrt(M).
[[nodiscard]] ObservationMatrix random_matrix(int dim, int num_slots, RandomMode mode, Rng& rng);

/// First num_slots eigenvectors; beyond the kernel rank, columns continue
/// with an orthonormal completion of the basis.
/// Throws InvalidInputError when num_slots exceeds the ambient dimension.
[[nodiscard]] ObservationMatrix top_q_matrix(const EigenBasis& basis, int num_slots);

/// Unitary DFT matrix with unit-norm columns (square, num_slots = dim).
[[nodiscard]] ObservationMatrix dft_matrix(int dim);

}  // namespace icefill

#endif
