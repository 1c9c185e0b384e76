#include "icefill/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Cholesky>

#include "icefill/design.hpp"

namespace icefill {

namespace {

// Integer greedy allocation over a positive spectrum, tracked as inverse
// working gains that rise by 1 per assigned slot (ties -> smallest index).
// Same recursion the matrix-level designer runs, minus the eigenvectors.
[[nodiscard]] std::vector<int> greedy_counts(const VecD& spectrum, double sigma2, int num_slots) {
  const int k = static_cast<int>(spectrum.size());
  VecD levels = (sigma2 / spectrum.array()).matrix();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int t = 0; t < num_slots; ++t) {
    int pick = 0;
    for (int j = 1; j < k; ++j) {
      if (levels[j] < levels[pick]) {
        pick = j;
      }
    }
    ++counts[static_cast<std::size_t>(pick)];
    levels[pick] += 1.0;
  }
  return counts;
}

// One term of the imperfect-kernel MSE closed form:
// sigma2 (lambda sigma2 + psi s^2) / (psi s + sigma2)^2 with s the shifted
// eigenvalue lambda + sigma_h2.
[[nodiscard]] double statistical_term(double lambda, double shifted, double psi, double sigma2) {
  const double denom = psi * shifted + sigma2;
  return sigma2 * (lambda * sigma2 + psi * shifted * shifted) / (denom * denom);
}

}  // namespace

double mse_waterfilling(const VecD& eigenvalues, const PowerAllocation& alloc, double sigma2) {
  if (eigenvalues.size() != alloc.powers.size()) {
    throw InvalidInputError("mse_waterfilling: spectrum/allocation length mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mse_waterfilling: noise variance must be positive");
  }
  double total = 0.0;
  for (int k = 0; k < eigenvalues.size(); ++k) {
    total += eigenvalues[k] * sigma2 / (alloc.powers[k] * eigenvalues[k] + sigma2);
  }
  return total;
}

double mse_icefilling(const VecD& eigenvalues, const PilotAllocation& alloc, double sigma2) {
  if (static_cast<std::size_t>(eigenvalues.size()) != alloc.counts.size()) {
    throw InvalidInputError("mse_icefilling: spectrum/allocation length mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mse_icefilling: noise variance must be positive");
  }
  double total = 0.0;
  for (int k = 0; k < eigenvalues.size(); ++k) {
    const double n = static_cast<double>(alloc.counts[static_cast<std::size_t>(k)]);
    total += eigenvalues[k] * sigma2 / (n * eigenvalues[k] + sigma2);
  }
  return total;
}

double mse_gap_bound(const VecD& eigenvalues, const PowerAllocation& alloc, double sigma2) {
  if (eigenvalues.size() != alloc.powers.size()) {
    throw InvalidInputError("mse_gap_bound: spectrum/allocation length mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mse_gap_bound: noise variance must be positive");
  }
  double total = 0.0;
  for (int k = 0; k < eigenvalues.size(); ++k) {
    const double p = alloc.powers[k];
    if (p <= 1.0) {
      throw BoundNotApplicableError("mse_gap_bound: requires every power > 1");
    }
    const double lambda = eigenvalues[k];
    total += lambda * lambda * sigma2 /
             ((p * lambda + sigma2) * ((p - 1.0) * lambda + sigma2));
  }
  return total;
}

double mse_random(const VecD& eigenvalues, int num_slots, int dim, double sigma2) {
  if (num_slots < 0 || dim < 1) {
    throw InvalidInputError("mse_random: bad dimensions");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mse_random: noise variance must be positive");
  }
  const double flat = static_cast<double>(num_slots) / static_cast<double>(dim);
  double total = 0.0;
  for (int k = 0; k < eigenvalues.size(); ++k) {
    total += eigenvalues[k] * sigma2 / (flat * eigenvalues[k] + sigma2);
  }
  return total;
}

double mse_mismatched(const ObservationMatrix& obs, const Kernel& used_kernel,
                      const Kernel& true_kernel, double sigma2) {
  if (obs.dim() != used_kernel.dim() || obs.dim() != true_kernel.dim()) {
    throw InvalidInputError("mse_mismatched: dimension mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mse_mismatched: noise variance must be positive");
  }
  const MatC wsig = obs.matrix.adjoint() * used_kernel.matrix;  // Q x M
  MatC system = wsig * obs.matrix;
  system = 0.5 * (system + system.adjoint());
  system.diagonal().array() += sigma2;
  Eigen::LLT<MatC> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericError("mse_mismatched: Gram system factorization failed");
  }
  const MatC pi = llt.solve(wsig);                              // Q x M
  MatC residual_map = obs.matrix * pi;                          // W Pi - I
  residual_map.diagonal().array() -= 1.0;
  const double signal_part =
      std::real((residual_map.adjoint() * true_kernel.matrix * residual_map).trace());
  const double noise_part = sigma2 * pi.squaredNorm();
  return signal_part + noise_part;
}

double mse_mismatched_gram(const MatC& gram, const Kernel& used_kernel,
                           const Kernel& true_kernel, double sigma2) {
  const int m = used_kernel.dim();
  if (gram.rows() != m || gram.cols() != m || true_kernel.dim() != m) {
    throw InvalidInputError("mse_mismatched_gram: dimension mismatch");
  }
  if (sigma2 <= 0.0) {
    throw InvalidInputError("mse_mismatched_gram: noise variance must be positive");
  }
  Eigen::LLT<MatC> used_llt(used_kernel.matrix);
  if (used_llt.info() != Eigen::Success) {
    throw NumericError("mse_mismatched_gram: used kernel is not invertible");
  }
  const double s2 = sigma2;
  const double s4 = s2 * s2;
  MatC b = used_llt.solve(MatC::Identity(m, m));
  b += gram / s2;
  Eigen::LLT<MatC> b_llt(0.5 * (b + b.adjoint()));
  if (b_llt.info() != Eigen::Success) {
    throw NumericError("mse_mismatched_gram: operator B is not positive definite");
  }
  const MatC binv_g = b_llt.solve(gram);                        // B^{-1} G
  const MatC g_binv_g = gram * binv_g;
  const MatC omega = gram / s2 - g_binv_g / s4;
  const MatC xi = gram / s4 - 2.0 * g_binv_g / (s4 * s2) + (g_binv_g * binv_g) / (s4 * s4);
  MatC shaping = used_kernel.matrix * omega;                    // Sigma_used Omega - I
  shaping.diagonal().array() -= 1.0;
  const double signal_part =
      std::real((shaping * true_kernel.matrix * shaping.adjoint()).trace());
  const double noise_part =
      s2 * std::real((used_kernel.matrix * xi * used_kernel.matrix).trace());
  return signal_part + noise_part;
}

double mse_statistical(AllocationMethod method, const VecD& eigenvalues_padded, double sigma_h2,
                       double sigma2, int num_slots) {
  const int m = static_cast<int>(eigenvalues_padded.size());
  if (m < 1) {
    throw InvalidInputError("mse_statistical: empty spectrum");
  }
  if (num_slots <= 0) {
    throw InvalidInputError("mse_statistical: num_slots must be positive");
  }
  if (sigma_h2 < 0.0 || sigma2 <= 0.0) {
    throw InvalidInputError("mse_statistical: variances out of range");
  }
  const VecD shifted = (eigenvalues_padded.array() + sigma_h2).matrix();
  VecD psi = VecD::Zero(m);
  if (method == AllocationMethod::random) {
    psi.setConstant(static_cast<double>(num_slots) / static_cast<double>(m));
  } else {
    // Allocations optimize the kernel the designer believes in, i.e. the
    // shifted spectrum. Directions with zero shifted eigenvalue carry no
    // believed energy and receive nothing.
    std::vector<int> active;
    active.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      if (shifted[i] > 0.0) {
        active.push_back(i);
      }
    }
    if (active.empty()) {
      throw InvalidInputError("mse_statistical: spectrum is identically zero");
    }
    VecD believed(static_cast<Eigen::Index>(active.size()));
    for (std::size_t j = 0; j < active.size(); ++j) {
      believed[static_cast<Eigen::Index>(j)] = shifted[active[j]];
    }
    if (method == AllocationMethod::waterfill) {
      const PowerAllocation alloc =
          water_fill(believed, sigma2, static_cast<double>(num_slots));
      for (std::size_t j = 0; j < active.size(); ++j) {
        psi[active[j]] = alloc.powers[static_cast<Eigen::Index>(j)];
      }
    } else {
      const std::vector<int> counts = greedy_counts(believed, sigma2, num_slots);
      for (std::size_t j = 0; j < active.size(); ++j) {
        psi[active[j]] = static_cast<double>(counts[j]);
      }
    }
  }
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    total += statistical_term(eigenvalues_padded[i], shifted[i], psi[i], sigma2);
  }
  return total;
}

double mse_rank_forced(const VecD& eigenvalues_topk, double sigma_h2, double sigma2,
                       int num_slots) {
  if (eigenvalues_topk.size() == 0) {
    throw InvalidInputError("mse_rank_forced: empty spectrum");
  }
  if (eigenvalues_topk.minCoeff() <= 0.0) {
    throw InvalidInputError("mse_rank_forced: top-K spectrum must be positive");
  }
  if (num_slots <= 0) {
    throw InvalidInputError("mse_rank_forced: num_slots must be positive");
  }
  if (sigma_h2 < 0.0 || sigma2 <= 0.0) {
    throw InvalidInputError("mse_rank_forced: variances out of range");
  }
  const PowerAllocation alloc =
      water_fill(eigenvalues_topk, sigma2, static_cast<double>(num_slots));
  double total = 0.0;
  for (int k = 0; k < eigenvalues_topk.size(); ++k) {
    total += statistical_term(eigenvalues_topk[k], eigenvalues_topk[k] + sigma_h2,
                              alloc.powers[k], sigma2);
  }
  return total;
}

double verify_quantization(const PilotAllocation& pilot, const PowerAllocation& power) {
  if (pilot.counts.size() != static_cast<std::size_t>(power.powers.size())) {
    throw InvalidInputError("verify_quantization: allocation length mismatch");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < pilot.counts.size(); ++k) {
    worst = std::max(worst, std::abs(static_cast<double>(pilot.counts[k]) -
                                     power.powers[static_cast<Eigen::Index>(k)]));
  }
  return worst;
}

ScalingReport asymptotic_mse(AllocationMethod method, const VecD& eigenvalues, double sigma_h2,
                             double sigma2, const std::vector<int>& q_grid, int dim) {
  if (q_grid.size() < 5) {
    throw InvalidInputError("asymptotic_mse: need at least 5 grid points");
  }
  if (dim < 1) {
    throw InvalidInputError("asymptotic_mse: bad ambient dimension");
  }
  VecD padded = eigenvalues;
  if (padded.size() < dim) {
    padded.conservativeResize(dim);
    padded.tail(dim - eigenvalues.size()).setZero();
  }
  ScalingReport report;
  report.deltas.resize(static_cast<Eigen::Index>(q_grid.size()));
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const int q = q_grid[i];
    if (q < 1) {
      throw InvalidInputError("asymptotic_mse: grid entries must be positive");
    }
    double delta = 0.0;
    if (sigma_h2 < 0.0) {
      switch (method) {
        case AllocationMethod::waterfill: {
          const PowerAllocation alloc =
              water_fill(eigenvalues, sigma2, static_cast<double>(q));
          delta = mse_waterfilling(eigenvalues, alloc, sigma2);
          break;
        }
        case AllocationMethod::icefill: {
          PilotAllocation alloc;
          alloc.counts = greedy_counts(eigenvalues, sigma2, q);
          delta = mse_icefilling(eigenvalues, alloc, sigma2);
          break;
        }
        case AllocationMethod::random:
          delta = mse_random(eigenvalues, q, dim, sigma2);
          break;
      }
    } else {
      delta = mse_statistical(method, padded, sigma_h2, sigma2, q);
    }
    report.deltas[static_cast<Eigen::Index>(i)] = delta;
  }
  // Ordinary least squares on (ln Q, ln delta).
  const auto n = static_cast<double>(q_grid.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const double x = std::log(static_cast<double>(q_grid[i]));
    const double y = std::log(report.deltas[static_cast<Eigen::Index>(i)]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  report.prefactor = std::exp((sy - report.slope * sx) / n);
  return report;
}

}  // namespace icefill
