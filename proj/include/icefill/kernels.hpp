#ifndef ICEFILL_KERNELS_HPP
#define ICEFILL_KERNELS_HPP

#include <vector>

#include "icefill/types.hpp"

// Prior covariance kernels for a uniform planar array and their
// eigendecomposition. All functions are pure; all returned kernels satisfy
// the Kernel invariants (Hermitian, PSD up to -1e-8 relative, real
// non-negative diagonal).
namespace icefill {

/// Eigendecomposition of a Hermitian PSD kernel, truncated to eigenvalues
/// above rank_tol * lambda_max and sorted descending. Deterministic:
/// ties keep ascending original order and each eigenvector's
/// largest-magnitude entry is rotated to be real-positive.
/// Throws InvalidInputError when the matrix departs from Hermitian by more
/// than 1e-10 * max|entry|.
[[nodiscard]] EigenBasis evd_hermitian(const Kernel& kernel, double rank_tol = 1e-10);

/// True kernel corrupted by white estimation error: Sigma + sigma_h2 * I.
[[nodiscard]] Kernel statistical_kernel(const Kernel& true_kernel, double sigma_h2);

/// Separable exponential correlation kernel. Each 1-D factor has entry
/// exp(-eta1^2 (2 pi d / lambda)^2 (m_i - m_j)^2) over centered antenna
/// indices; the UPA kernel is the Kronecker product (x factor) x (y factor).
[[nodiscard]] Kernel exponential_kernel(const UpaGeometry& geom, double eta1);

/// Separable isotropic-scattering kernel. Each 1-D factor has entry
/// J0(eta2 (2 pi d / lambda) |m_i - m_j|); Kronecker product as above.
[[nodiscard]] Kernel bessel_kernel(const UpaGeometry& geom, double eta2);

/// Sample covariance (1/N) sum h_n h_n^H of channel draws.
/// Throws InvalidInputError when samples is empty or lengths disagree.
[[nodiscard]] Kernel sample_covariance(const std::vector<VecC>& samples);

/// Mark an externally supplied covariance as the ground-truth prior.
[[nodiscard]] Kernel perfect_kernel(MatC covariance);

}  // namespace icefill

#endif
