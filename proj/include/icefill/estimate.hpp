#ifndef ICEFILL_ESTIMATE_HPP
#define ICEFILL_ESTIMATE_HPP

#include "icefill/types.hpp"

// Channel estimators consuming received pilots.
namespace icefill {

/// Precomputed MMSE operator for a fixed (W, prior, sigma2) triple. The
/// per-trial work then reduces to one M x Q matrix-vector product. The
/// posterior trace is a property of the triple, not of y, so it is stored.
class MmseWeight {
 public:
  /// Factors W^H Sigma W + sigma2 I (Hermitian positive definite for
  /// sigma2 > 0) and forms the weight Sigma W applied to its inverse.
  /// Throws InvalidInputError on dimension mismatch or sigma2 <= 0,
  /// NumericError if the factorization loses positive definiteness.
  MmseWeight(const ObservationMatrix& obs, const Kernel& prior, double sigma2);

  /// Posterior mean for one pilot vector.
  [[nodiscard]] VecC apply(const VecC& y) const;

  /// Trace of the posterior covariance (the Bayesian MSE of this triple).
  [[nodiscard]] double posterior_trace() const { return posterior_trace_; }

  [[nodiscard]] int dim() const { return static_cast<int>(weight_.rows()); }
  [[nodiscard]] int num_slots() const { return static_cast<int>(weight_.cols()); }

 private:
  MatC weight_;  // Sigma W (W^H Sigma W + sigma2 I)^{-1}, M x Q
  double posterior_trace_ = 0.0;
};

/// Bayesian posterior-mean estimate. squared_error is filled when the true
/// channel is supplied (pass nullptr when unavailable).
[[nodiscard]] EstimateResult mmse_estimate(const ObservationMatrix& obs, const Kernel& prior,
                                           double sigma2, const VecC& y,
                                           const VecC* truth = nullptr);

/// Same, reusing a cached weight across trials.
[[nodiscard]] EstimateResult mmse_estimate(const MmseWeight& weight, const VecC& y,
                                           const VecC* truth = nullptr);

/// Least squares on a square observation: (W^H)^{-1} y (computed by a
/// pivoted solve). Throws InvalidInputError when W is not square or is rank
/// deficient.
[[nodiscard]] VecC ls_estimate(const ObservationMatrix& obs, const VecC& y);

/// Greedy orthogonal matching pursuit against a dictionary sensed through
/// W^H. Selects `sparsity` atoms by maximal residual correlation,
/// least-squares refits on the selected set, and returns
/// dictionary x coefficients. Throws InvalidInputError when sparsity exceeds
/// the pilot count or is negative.
[[nodiscard]] VecC omp_estimate(const ObservationMatrix& obs, const MatC& dictionary,
                                const VecC& y, int sparsity);

}  // namespace icefill

#endif
