#include "icefill/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "icefill/bessel.hpp"
#include "icefill/simd.hpp"

namespace icefill {

const char* to_string(KernelLabel label) {
  switch (label) {
    case KernelLabel::perfect: return "perfect";
    case KernelLabel::statistical: return "statistical";
    case KernelLabel::exponential: return "exponential";
    case KernelLabel::bessel: return "bessel";
    case KernelLabel::sample: return "sample";
  }
  return "unknown";
}

MatC EigenBasis::reconstruct() const {
  return vectors * values.asDiagonal() * vectors.adjoint();
}

EigenBasis evd_hermitian(const Kernel& kernel, double rank_tol) {
  const MatC& sigma = kernel.matrix;
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw InvalidInputError("evd_hermitian: kernel matrix must be square and non-empty");
  }
  const double scale = sigma.cwiseAbs().maxCoeff();
  const double departure = (sigma - sigma.adjoint()).cwiseAbs().maxCoeff();
  if (departure > 1e-10 * std::max(scale, 1e-300)) {
    throw InvalidInputError("evd_hermitian: matrix is not Hermitian within tolerance");
  }

  // Symmetrize before decomposing so the solver sees an exactly Hermitian
  // input regardless of least-significant-bit drift.
  const MatC sym = 0.5 * (sigma + sigma.adjoint());
  Eigen::SelfAdjointEigenSolver<MatC> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericError("evd_hermitian: eigendecomposition failed to converge");
  }

  const int m = static_cast<int>(sigma.rows());
  const VecD& raw_values = solver.eigenvalues();  // ascending
  const MatC& raw_vectors = solver.eigenvectors();

  // Descending order; a stable sort on the reversed ascending order keeps
  // equal eigenvalues in their original (ascending-index) positions.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return raw_values[a] > raw_values[b]; });

  const double lambda_max = raw_values[order[0]];
  int rank = 0;
  while (rank < m && raw_values[order[rank]] > rank_tol * lambda_max &&
         raw_values[order[rank]] > 0.0) {
    ++rank;
  }

  EigenBasis basis;
  basis.ambient_dim = m;
  basis.values.resize(rank);
  basis.vectors.resize(m, rank);
  for (int k = 0; k < rank; ++k) {
    basis.values[k] = raw_values[order[k]];
    VecC column = raw_vectors.col(order[k]);
    // Deterministic phase: rotate the largest-magnitude entry (first such
    // entry on ties) to the positive real axis.
    int pivot = 0;
    double best = -1.0;
    for (int i = 0; i < m; ++i) {
      const double mag = std::abs(column[i]);
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (best > 0.0) {
      column *= std::conj(column[pivot]) / best;
    }
    basis.vectors.col(k) = column;
  }
  return basis;
}

Kernel statistical_kernel(const Kernel& true_kernel, double sigma_h2) {
  if (sigma_h2 < 0.0) {
    throw InvalidInputError("statistical_kernel: error variance must be >= 0");
  }
  Kernel out;
  out.matrix = true_kernel.matrix;
  out.matrix.diagonal().array() += sigma_h2;
  out.label = KernelLabel::statistical;
  return out;
}

namespace {

// Both separable kernels share the Toeplitz per-axis structure: the entry
// depends only on |m_i - m_j|, so each factor is built from its first row.
template <typename F>
Eigen::MatrixXd toeplitz_factor(int n, F&& entry) {
  Eigen::VectorXd row(n);
  for (int k = 0; k < n; ++k) row[k] = entry(static_cast<double>(k));
  Eigen::MatrixXd fac(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      fac(i, j) = row[std::abs(i - j)];
    }
  }
  return fac;
}

// Kronecker product (x factor) x (y factor) under x-major antenna indexing
// m = ix*My + iy.
Kernel kron_kernel(const Eigen::MatrixXd& fx, const Eigen::MatrixXd& fy, KernelLabel label) {
  const int nx = static_cast<int>(fx.rows());
  const int ny = static_cast<int>(fy.rows());
  Kernel out;
  out.label = label;
  out.matrix.resize(nx * ny, nx * ny);
  for (int ix = 0; ix < nx; ++ix) {
    for (int jx = 0; jx < nx; ++jx) {
      out.matrix.block(ix * ny, jx * ny, ny, ny) = (fx(ix, jx) * fy).cast<cxd>();
    }
  }
  return out;
}

}  // namespace

Kernel exponential_kernel(const UpaGeometry& geom, double eta1) {
  geom.validate();
  if (!(eta1 > 0.0)) {
    throw InvalidInputError("exponential_kernel: eta1 must be positive");
  }
  const double w = 2.0 * 3.141592653589793238462643383279502884 * geom.spacing_wavelengths();
  const double c = eta1 * eta1 * w * w;
  auto entry = [c](double dm) { return std::exp(-c * dm * dm); };
  return kron_kernel(toeplitz_factor(geom.mx, entry), toeplitz_factor(geom.my, entry),
                     KernelLabel::exponential);
}

Kernel bessel_kernel(const UpaGeometry& geom, double eta2) {
  geom.validate();
  if (!(eta2 > 0.0)) {
    throw InvalidInputError("bessel_kernel: eta2 must be positive");
  }
  const double w = 2.0 * 3.141592653589793238462643383279502884 * geom.spacing_wavelengths();
  auto entry = [eta2, w](double dm) { return bessel_j0(eta2 * w * dm); };
  return kron_kernel(toeplitz_factor(geom.mx, entry), toeplitz_factor(geom.my, entry),
                     KernelLabel::bessel);
}

Kernel sample_covariance(const std::vector<VecC>& samples) {
  if (samples.empty()) {
    throw InvalidInputError("sample_covariance: need at least one sample");
  }
  const auto m = samples.front().size();
  Kernel out;
  out.label = KernelLabel::sample;
  out.matrix = MatC::Zero(m, m);
  for (const VecC& h : samples) {
    if (h.size() != m) {
      throw InvalidInputError("sample_covariance: samples have inconsistent lengths");
    }
    // Accumulate h h^H; the column-major layout matches Eigen's.
    simd::herk_rank1(static_cast<std::size_t>(m), h.data(), out.matrix.data());
  }
  out.matrix /= static_cast<double>(samples.size());
  return out;
}

Kernel perfect_kernel(MatC covariance) {
  Kernel out;
  out.matrix = std::move(covariance);
  out.label = KernelLabel::perfect;
  return out;
}

}  // namespace icefill
