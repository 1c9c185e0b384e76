#ifndef ICEFILL_SWEEP_HPP
#define ICEFILL_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "icefill/config.hpp"
#include "icefill/types.hpp"

// The Monte-Carlo experiment driver: one row per
// (axis value, designer, estimator) with empirical NMSE and, where one of
// the closed forms applies, the analytic MSE alongside.
namespace icefill {

struct SweepRow {
  Designer designer;
  Estimator estimator;
  SweepAxis axis = SweepAxis::snr_db;
  double axis_value = 0.0;
  double nmse_db = 0.0;                 ///< 10 log10 E(||h-hhat||^2 / ||h||^2)
  std::optional<double> analytic_mse;   ///< closed-form delta, absolute (not dB)
  int trials = 0;
  double wall_seconds = 0.0;            ///< kept out of the CSV (determinism)
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double trace = 0.0;                   ///< E||h||^2 used for the SNR mapping
};

/// Run the configured sweep. Deterministic for a fixed config: per-trial
/// streams are seeded base_seed + trial, auxiliary draws (kernel samples,
/// random designers) use tagged streams derived from base_seed.
[[nodiscard]] SweepResult run_sweep(const ExperimentConfig& config);

/// Render rows as CSV (schema comment + header + data; no wall time).
void write_sweep_csv(const std::string& path, const SweepResult& result);

/// Single-shot subcommands (see cli). Each returns the written file path.
std::string run_design_cmd(const ExperimentConfig& config, const std::string& out_path);
std::string run_estimate_cmd(const ExperimentConfig& config, const std::string& out_path);
std::string run_analyze_cmd(const ExperimentConfig& config, const std::string& out_path);

}  // namespace icefill

#endif
