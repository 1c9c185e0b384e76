#ifndef ICEFILL_CONFIG_HPP
#define ICEFILL_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icefill/types.hpp"

// Experiment configuration: a small INI-style text format (named sections of
// key = value lines, '#' comments) chosen so configs diff cleanly and
// round-trip exactly.
namespace icefill {

enum class ChannelSource { gaussian_from_kernel, clustered };
enum class KernelChoice { perfect, statistical, exponential, bessel };
enum class SweepAxis { snr_db, num_slots, spacing, sigma_h2 };
enum class Designer { wf, icefill, mm, random_gaussian, random_phase, topq, dft };
enum class Estimator { mmse, ls, omp };

[[nodiscard]] std::string to_string(ChannelSource v);
[[nodiscard]] std::string to_string(KernelChoice v);
[[nodiscard]] std::string to_string(SweepAxis v);
[[nodiscard]] std::string to_string(Designer v);
[[nodiscard]] std::string to_string(Estimator v);

struct ExperimentConfig {
  // [geometry]
  int mx = 8;
  int my = 8;
  double spacing_over_wavelength = 0.125;

  // [channel]
  ChannelSource source = ChannelSource::gaussian_from_kernel;

  // [kernel]
  KernelChoice kernel = KernelChoice::perfect;
  double sigma_h2 = 0.0;          ///< statistical kernel error
  double eta1 = 0.56;             ///< exponential kernel hyper-parameter
  double eta2 = 0.85;             ///< isotropic (Bessel) kernel hyper-parameter
  int sample_draws = 100000;      ///< draws for the clustered perfect kernel

  // [design]
  std::vector<Designer> designers{Designer::icefill};
  int num_slots = 64;             ///< pilot budget Q (fixed unless swept)
  int mm_max_iter = 200;
  double mm_rel_tol = 1e-6;

  // [estimate]
  std::vector<Estimator> estimators{Estimator::mmse};
  int omp_sparsity = 0;           ///< 0 -> kernel rank at run time

  // [sweep]
  SweepAxis axis = SweepAxis::snr_db;
  VecD grid = VecD::Zero(0);      ///< axis values (sorted)
  double snr_db = 0.0;            ///< fixed SNR when the axis is not snr_db
  int trials = 3000;
  std::uint64_t base_seed = 1;
  std::string output_path = "sweep.csv";

  // [files] -- single-shot subcommand inputs (design/estimate/analyze)
  std::string kernel_file;
  std::string observation_file;
  std::string pilot_file;
  std::string spectrum_file;
  std::string method = "if";
  double sigma2 = 1.0;

  void validate() const;  ///< throws ConfigError with a message on bad combos
};

/// Parse the INI text. Unknown keys are errors (catch typos early).
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Canonical serialization; parse(serialize(c)) == c field-for-field.
[[nodiscard]] std::string serialize_config(const ExperimentConfig& config);

}  // namespace icefill

#endif
