#include "icefill/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "icefill/simd.hpp"

namespace icefill {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

[[nodiscard]] double budget_at_level(const VecD& levels, double beta) {
  double total = 0.0;
  for (int k = 0; k < levels.size(); ++k) {
    total += std::max(beta - levels[k], 0.0);
  }
  return total;
}

}  // namespace

PowerAllocation water_fill(const VecD& eigenvalues, double sigma2, double total_power) {
  if (eigenvalues.size() == 0) {
    throw InvalidInputError("water_fill: empty spectrum");
  }
  if (eigenvalues.minCoeff() <= 0.0) {
    throw InvalidInputError("water_fill: eigenvalues must be positive");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("water_fill: noise variance must be positive");
  }
  if (total_power <= 0.0) {
    throw InvalidInputError("water_fill: power budget must be positive");
  }
  const VecD levels = (sigma2 / eigenvalues.array()).matrix();
  double lo = levels.minCoeff();
  double hi = levels.maxCoeff() + total_power;
  // Fixed halving count instead of an early-exit test: equal inputs take the
  // same branch sequence on every platform, and 200 halvings push the bracket
  // far below any meaningful resolution.
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (budget_at_level(levels, mid) < total_power) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  PowerAllocation alloc;
  alloc.water_level = 0.5 * (lo + hi);
  alloc.powers = (alloc.water_level - levels.array()).max(0.0).matrix();
  return alloc;
}

ObservationMatrix water_fill_matrix(const EigenBasis& basis, const PowerAllocation& alloc,
                                    int num_slots) {
  if (alloc.powers.size() != basis.rank()) {
    throw InvalidInputError("water_fill_matrix: allocation/basis rank mismatch");
  }
  if (num_slots < 1) {
    throw InvalidInputError("water_fill_matrix: num_slots must be >= 1");
  }
  ObservationMatrix obs;
  obs.mode = ObservationMode::scaled_eigen;
  obs.matrix = MatC::Zero(basis.ambient_dim, num_slots);
  const int used = std::min<int>(basis.rank(), num_slots);
  for (int k = 0; k < used; ++k) {
    obs.matrix.col(k) = basis.vectors.col(k) * std::sqrt(alloc.powers[k]);
  }
  return obs;
}

IceFillResult ice_fill(const EigenBasis& basis, double sigma2, int num_slots) {
  if (sigma2 <= 0.0) {
    throw InvalidInputError("ice_fill: noise variance must be positive");
  }
  if (num_slots < 1) {
    throw InvalidInputError("ice_fill: num_slots must be >= 1");
  }
  const int rank = basis.rank();
  if (rank == 0) {
    throw InvalidInputError("ice_fill: empty eigenbasis");
  }
  IceFillResult result;
  result.observation.mode = ObservationMode::unit_norm_columns;
  result.observation.matrix.resize(basis.ambient_dim, num_slots);
  result.observation.selected_index.resize(num_slots);
  result.allocation.counts.assign(static_cast<std::size_t>(rank), 0);
  result.allocation.selection_order.reserve(static_cast<std::size_t>(num_slots));
  result.trajectory.reserve(static_cast<std::size_t>(num_slots) + 1);

  // Work on ice levels sigma2/lambda_k: one slot on direction k raises its
  // level by exactly 1 (the lambda <- lambda*sigma2/(lambda+sigma2) squeeze),
  // so the trajectory stays free of accumulated rounding.
  VecD levels = (sigma2 / basis.values.array()).matrix();
  result.trajectory.emplace_back((sigma2 / levels.array()).matrix());
  for (int t = 0; t < num_slots; ++t) {
    int pick = 0;
    for (int k = 1; k < rank; ++k) {
      if (levels[k] < levels[pick]) {
        pick = k;
      }
    }
    result.observation.matrix.col(t) = basis.vectors.col(pick);
    result.observation.selected_index[t] = pick;
    result.allocation.selection_order.push_back(pick);
    ++result.allocation.counts[static_cast<std::size_t>(pick)];
    levels[pick] += 1.0;
    result.trajectory.emplace_back((sigma2 / levels.array()).matrix());
  }
  result.allocation.ice_levels = levels;
  return result;
}

Kernel posterior_kernel_update(const Kernel& prior, const VecC& w, double sigma2) {
  if (w.size() != prior.dim()) {
    throw InvalidInputError("posterior_kernel_update: direction/kernel dimension mismatch");
  }
  if (w.squaredNorm() == 0.0) {
    throw InvalidInputError("posterior_kernel_update: zero direction");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("posterior_kernel_update: noise variance must be positive");
  }
  const VecC v = prior.matrix * w;
  const double denom = std::real(w.dot(v)) + sigma2;
  Kernel posterior;
  posterior.label = prior.label;
  posterior.matrix = prior.matrix - (v * v.adjoint()) / denom;
  return posterior;
}

double mutual_information(const ObservationMatrix& obs, const Kernel& kernel, double sigma2) {
  if (obs.dim() != kernel.dim()) {
    throw InvalidInputError("mutual_information: observation/kernel dimension mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mutual_information: noise variance must be positive");
  }
  const int q = obs.num_slots();
  MatC gram = obs.matrix.adjoint() * kernel.matrix * obs.matrix / sigma2;
  gram += MatC::Identity(q, q);
  // ln det via Cholesky of the Hermitian positive-definite Q x Q system.
  Eigen::LLT<MatC> llt(0.5 * (gram + gram.adjoint()));
  if (llt.info() != Eigen::Success) {
    throw NumericError("mutual_information: Cholesky factorization failed");
  }
  double nats = 0.0;
  for (int i = 0; i < q; ++i) {
    nats += 2.0 * std::log(std::real(llt.matrixLLT()(i, i)));
  }
  if (!std::isfinite(nats)) {
    throw NumericError("mutual_information: non-finite determinant");
  }
  return nats;
}

double mi_increment(const Kernel& posterior, const VecC& w, double sigma2) {
  if (w.size() != posterior.dim()) {
    throw InvalidInputError("mi_increment: direction/kernel dimension mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mi_increment: noise variance must be positive");
  }
  const double gain = std::real(w.dot(posterior.matrix * w));
  return std::log1p(std::max(gain, 0.0) / sigma2);
}

MmDesignResult mm_design(const Kernel& kernel, double sigma2, int num_slots, Rng& rng,
                         const MmOptions& opts) {
  const int m = kernel.dim();
  if (m < 1) {
    throw InvalidInputError("mm_design: empty kernel");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mm_design: noise variance must be positive");
  }
  if (num_slots < 1) {
    throw InvalidInputError("mm_design: num_slots must be >= 1");
  }
  if (opts.max_iter < 1 || opts.rel_tol < 0.0) {
    throw InvalidInputError("mm_design: bad iteration options");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  MmDesignResult result;
  result.observation.mode = ObservationMode::unit_modulus_entries;
  result.observation.matrix.resize(m, num_slots);
  result.iterations.reserve(static_cast<std::size_t>(num_slots));
  result.objectives.reserve(static_cast<std::size_t>(num_slots));
  result.converged.reserve(static_cast<std::size_t>(num_slots));

  Kernel posterior = kernel;
  VecC w(m);
  VecC update(m);
  std::vector<double> trace;
  for (int t = 0; t < num_slots; ++t) {
    Eigen::SelfAdjointEigenSolver<MatC> es(posterior.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw NumericError("mm_design: eigenvalue computation failed");
    }
    const double lambda_max = es.eigenvalues().maxCoeff();
    // Majorizer shift: X = Tr(lambda_max I - Sigma_t) I collapses to the
    // scalar tr(X) - lambda_max multiplying the current iterate.
    const double shift =
        static_cast<double>(m) * lambda_max - std::real(posterior.matrix.trace()) - lambda_max;
    for (int i = 0; i < m; ++i) {
      w[i] = std::polar(scale, rng.uniform(-kPi, kPi));
    }
    double objective = std::real(w.dot(posterior.matrix * w));
    trace.clear();
    bool converged = false;
    while (static_cast<int>(trace.size()) < opts.max_iter) {
      update = posterior.matrix * w;
      update += shift * w;
      simd::unit_phase(static_cast<std::size_t>(m), update.data(), scale, w.data());
      const double next = std::real(w.dot(posterior.matrix * w));
      trace.push_back(next);
      const double change = std::abs(next - objective);
      objective = next;
      if (change <= opts.rel_tol * std::max(std::abs(next), 1e-300)) {
        converged = true;
        break;
      }
    }
    result.observation.matrix.col(t) = w;
    result.iterations.push_back(static_cast<int>(trace.size()));
    result.objectives.push_back(Eigen::Map<const VecD>(trace.data(),
                                                       static_cast<Eigen::Index>(trace.size())));
    result.converged.push_back(converged);
    posterior = posterior_kernel_update(posterior, w, sigma2);
  }
  return result;
}

ObservationMatrix random_matrix(int dim, int num_slots, RandomMode mode, Rng& rng) {
  if (dim < 1 || num_slots < 1) {
    throw InvalidInputError("random_matrix: dimensions must be >= 1");
  }
  ObservationMatrix obs;
  obs.matrix.resize(dim, num_slots);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  if (mode == RandomMode::gaussian_unit_norm) {
    obs.mode = ObservationMode::unit_norm_columns;
    for (int q = 0; q < num_slots; ++q) {
      for (int i = 0; i < dim; ++i) {
        obs.matrix(i, q) = scale * rng.cgaussian();
      }
      obs.matrix.col(q).normalize();
    }
  } else {
    obs.mode = ObservationMode::unit_modulus_entries;
    for (int q = 0; q < num_slots; ++q) {
      for (int i = 0; i < dim; ++i) {
        obs.matrix(i, q) = std::polar(scale, rng.uniform(-kPi, kPi));
      }
    }
  }
  return obs;
}

ObservationMatrix top_q_matrix(const EigenBasis& basis, int num_slots) {
  const int m = basis.ambient_dim;
  const int rank = basis.rank();
  if (num_slots < 1) {
    throw InvalidInputError("top_q_matrix: num_slots must be >= 1");
  }
  if (num_slots > m) {
    throw InvalidInputError("top_q_matrix: num_slots exceeds the ambient dimension");
  }
  if (rank > 0 && basis.vectors.rows() != m) {
    throw InvalidInputError("top_q_matrix: basis dimensions disagree");
  }
  ObservationMatrix obs;
  obs.mode = ObservationMode::unit_norm_columns;
  obs.matrix.resize(m, num_slots);
  const int direct = std::min(rank, num_slots);
  obs.matrix.leftCols(direct) = basis.vectors.leftCols(direct);
  if (num_slots > rank) {
    // Continue past the kernel rank with an orthonormal completion; the QR of
    // the eigenvector block leaves exactly that completion in its trailing
    // unitary columns.
    MatC full = MatC::Identity(m, m);
    if (rank > 0) {
      Eigen::HouseholderQR<MatC> qr(basis.vectors);
      full = qr.householderQ() * MatC::Identity(m, m);
    }
    obs.matrix.rightCols(num_slots - rank) = full.middleCols(rank, num_slots - rank);
  }
  obs.selected_index.resize(static_cast<std::size_t>(num_slots));
  for (int q = 0; q < num_slots; ++q) {
    obs.selected_index[static_cast<std::size_t>(q)] = q < rank ? q : -1;
  }
  return obs;
}

ObservationMatrix dft_matrix(int dim) {
  if (dim < 1) {
    throw InvalidInputError("dft_matrix: dimension must be >= 1");
  }
  ObservationMatrix obs;
  obs.mode = ObservationMode::unit_norm_columns;
  obs.matrix.resize(dim, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int q = 0; q < dim; ++q) {
    for (int i = 0; i < dim; ++i) {
      const double angle = -2.0 * kPi * static_cast<double>(i) * static_cast<double>(q) /
                           static_cast<double>(dim);
      obs.matrix(i, q) = std::polar(scale, angle);
    }
  }
  return obs;
}

}  // namespace icefill
