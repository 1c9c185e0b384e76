#include "icefill/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace icefill {

MmseWeight::MmseWeight(const ObservationMatrix& obs, const Kernel& prior, double sigma2) {
  if (obs.dim() != prior.dim()) {
    throw InvalidInputError("MmseWeight: observation/kernel dimension mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("MmseWeight: noise variance must be positive");
  }
  const MatC sigma_w = prior.matrix * obs.matrix;             // M x Q
  MatC system = obs.matrix.adjoint() * sigma_w;               // Q x Q
  system = 0.5 * (system + system.adjoint());
  system.diagonal().array() += sigma2;
  Eigen::LLT<MatC> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericError("MmseWeight: Gram system lost positive definiteness");
  }
  // weight = Sigma W (W^H Sigma W + sigma2 I)^{-1}; solving on the adjoint
  // keeps a single Hermitian factorization.
  const MatC solved = llt.solve(sigma_w.adjoint());           // Q x M
  weight_ = solved.adjoint();
  // Tr(Sigma - weight W^H Sigma) = Tr(Sigma) - <Sigma W, weight>.
  posterior_trace_ = std::real(prior.matrix.trace()) -
                     std::real((weight_.conjugate().cwiseProduct(sigma_w)).sum());
  if (!std::isfinite(posterior_trace_)) {
    throw NumericError("MmseWeight: non-finite posterior trace");
  }
}

VecC MmseWeight::apply(const VecC& y) const {
  if (y.size() != weight_.cols()) {
    throw InvalidInputError("MmseWeight: pilot vector length mismatch");
  }
  return weight_ * y;
}

EstimateResult mmse_estimate(const ObservationMatrix& obs, const Kernel& prior, double sigma2,
                             const VecC& y, const VecC* truth) {
  const MmseWeight weight(obs, prior, sigma2);
  return mmse_estimate(weight, y, truth);
}

EstimateResult mmse_estimate(const MmseWeight& weight, const VecC& y, const VecC* truth) {
  EstimateResult result;
  result.posterior_mean = weight.apply(y);
  result.posterior_trace = weight.posterior_trace();
  if (truth != nullptr) {
    if (truth->size() != result.posterior_mean.size()) {
      throw InvalidInputError("mmse_estimate: truth vector length mismatch");
    }
    result.squared_error = (*truth - result.posterior_mean).squaredNorm();
  }
  return result;
}

VecC ls_estimate(const ObservationMatrix& obs, const VecC& y) {
  if (obs.dim() != obs.num_slots()) {
    throw InvalidInputError("ls_estimate: observation matrix must be square");
  }
  if (y.size() != obs.num_slots()) {
    throw InvalidInputError("ls_estimate: pilot vector length mismatch");
  }
  Eigen::ColPivHouseholderQR<MatC> qr(obs.matrix.adjoint());
  if (qr.rank() < obs.dim()) {
    throw InvalidInputError("ls_estimate: observation matrix is rank deficient");
  }
  return qr.solve(y);
}

VecC omp_estimate(const ObservationMatrix& obs, const MatC& dictionary, const VecC& y,
                  int sparsity) {
  if (dictionary.rows() != obs.dim()) {
    throw InvalidInputError("omp_estimate: dictionary/observation dimension mismatch");
  }
  if (y.size() != obs.num_slots()) {
    throw InvalidInputError("omp_estimate: pilot vector length mismatch");
  }
  if (sparsity < 0 || sparsity > obs.num_slots()) {
    throw InvalidInputError("omp_estimate: sparsity must lie in [0, num_slots]");
  }
  const int num_atoms = static_cast<int>(dictionary.cols());
  if (sparsity > num_atoms) {
    throw InvalidInputError("omp_estimate: sparsity exceeds dictionary size");
  }
  VecC estimate = VecC::Zero(obs.dim());
  if (sparsity == 0) {
    return estimate;
  }
  const MatC sensed = obs.matrix.adjoint() * dictionary;  // Q x D
  std::vector<int> support;
  support.reserve(static_cast<std::size_t>(sparsity));
  std::vector<bool> picked(static_cast<std::size_t>(num_atoms), false);
  VecC residual = y;
  VecC coeffs;
  MatC subdict;
  for (int s = 0; s < sparsity; ++s) {
    int best = -1;
    double best_corr = -1.0;
    for (int d = 0; d < num_atoms; ++d) {
      if (picked[static_cast<std::size_t>(d)]) {
        continue;
      }
      const double corr = std::abs(sensed.col(d).dot(residual));
      if (corr > best_corr) {
        best_corr = corr;
        best = d;
      }
    }
    if (best < 0) {
      break;
    }
    picked[static_cast<std::size_t>(best)] = true;
    support.push_back(best);
    subdict.resize(sensed.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j) {
      subdict.col(static_cast<Eigen::Index>(j)) = sensed.col(support[j]);
    }
    // Minimum-norm least squares: coherent dictionaries make the selected
    // atoms nearly dependent, and a plain triangular solve would blow up.
    Eigen::CompleteOrthogonalDecomposition<MatC> cod(subdict);
    coeffs = cod.solve(y);
    if (!coeffs.allFinite()) {
      throw NumericError("omp_estimate: ill-conditioned least-squares refit");
    }
    residual = y - subdict * coeffs;
  }
  for (std::size_t j = 0; j < support.size(); ++j) {
    estimate += dictionary.col(support[j]) * coeffs[static_cast<Eigen::Index>(j)];
  }
  return estimate;
}

}  // namespace icefill
