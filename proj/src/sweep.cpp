#include "icefill/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <utility>

#include "icefill/analysis.hpp"
#include "icefill/channel.hpp"
#include "icefill/csvio.hpp"
#include "icefill/design.hpp"
#include "icefill/estimate.hpp"
#include "icefill/kernels.hpp"
#include "icefill/rng.hpp"

namespace icefill {

namespace {

// Stream tags for auxiliary randomness. Trial streams use base_seed + trial
// directly; everything else derives so no stream is reused across purposes.
constexpr std::uint64_t kKernelSampleStream = 1000;
constexpr std::uint64_t kChannelEnergyStream = 1001;
constexpr std::uint64_t kDesignStreamBase = 2000;
constexpr int kEnergyDraws = 10000;

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

[[nodiscard]] UpaGeometry make_geometry(const ExperimentConfig& config, double spacing) {
  UpaGeometry geom;
  geom.mx = config.mx;
  geom.my = config.my;
  geom.wavelength = 1.0;
  geom.d = spacing;
  return geom;
}

// True channel kernel plus the mean channel energy that converts SNR to a
// noise variance (sigma2 = energy / 10^(snr/10)).
struct ChannelModel {
  Kernel true_kernel;
  double energy = 0.0;
};

[[nodiscard]] ChannelModel gaussian_model(const ExperimentConfig& config,
                                          const UpaGeometry& geom) {
  ChannelModel model;
  model.true_kernel = config.kernel == KernelChoice::bessel
                          ? bessel_kernel(geom, config.eta2)
                          : exponential_kernel(geom, config.eta1);
  model.energy = std::real(model.true_kernel.matrix.trace());
  return model;
}

[[nodiscard]] ChannelModel clustered_model(const ExperimentConfig& config,
                                           const UpaGeometry& geom) {
  const ClusteredChannelParams params;
  ChannelModel model;
  {
    Rng rng(derive_stream_seed(config.base_seed, kKernelSampleStream));
    std::vector<VecC> draws;
    draws.reserve(static_cast<std::size_t>(config.sample_draws));
    for (int n = 0; n < config.sample_draws; ++n) {
      draws.push_back(draw_clustered_channel(geom, params, rng));
    }
    model.true_kernel = sample_covariance(draws);
  }
  {
    Rng rng(derive_stream_seed(config.base_seed, kChannelEnergyStream));
    Kahan energy;
    for (int n = 0; n < kEnergyDraws; ++n) {
      energy.add(draw_clustered_channel(geom, params, rng).squaredNorm());
    }
    model.energy = energy.sum / kEnergyDraws;
  }
  return model;
}

[[nodiscard]] Designer designer_from_string(const std::string& name) {
  if (name == "wf") return Designer::wf;
  if (name == "if") return Designer::icefill;
  if (name == "mm") return Designer::mm;
  if (name == "random-gaussian") return Designer::random_gaussian;
  if (name == "random-phase") return Designer::random_phase;
  if (name == "topq") return Designer::topq;
  if (name == "dft") return Designer::dft;
  throw ConfigError("unknown design method: " + name);
}

struct DesignOutput {
  ObservationMatrix observation;
  std::optional<PowerAllocation> power;
  std::optional<PilotAllocation> pilot;
};

[[nodiscard]] DesignOutput run_designer(Designer designer, const Kernel& assumed,
                                        const EigenBasis& basis, double sigma2, int num_slots,
                                        const MmOptions& mm_opts, Rng& rng) {
  DesignOutput out;
  switch (designer) {
    case Designer::wf: {
      PowerAllocation alloc =
          water_fill(basis.values, sigma2, static_cast<double>(num_slots));
      out.observation = water_fill_matrix(basis, alloc, num_slots);
      out.power = std::move(alloc);
      break;
    }
    case Designer::icefill: {
      IceFillResult run = ice_fill(basis, sigma2, num_slots);
      out.observation = std::move(run.observation);
      out.pilot = std::move(run.allocation);
      break;
    }
    case Designer::mm: {
      out.observation = mm_design(assumed, sigma2, num_slots, rng, mm_opts).observation;
      break;
    }
    case Designer::random_gaussian:
      out.observation =
          random_matrix(assumed.dim(), num_slots, RandomMode::gaussian_unit_norm, rng);
      break;
    case Designer::random_phase:
      out.observation = random_matrix(assumed.dim(), num_slots, RandomMode::phase_only, rng);
      break;
    case Designer::topq:
      out.observation = top_q_matrix(basis, num_slots);
      break;
    case Designer::dft:
      if (num_slots != assumed.dim()) {
        throw InvalidInputError("dft designer requires num_slots == antenna count");
      }
      out.observation = dft_matrix(assumed.dim());
      break;
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.grid.size() == 0) {
    throw ConfigError("config: sweep grid is empty");
  }
  SweepResult result;
  const ClusteredChannelParams clustered_params;
  std::map<double, ChannelModel> clustered_cache;  // keyed by spacing

  for (Eigen::Index gi = 0; gi < config.grid.size(); ++gi) {
    const double axis_value = config.grid[gi];
    double snr_db = config.snr_db;
    int num_slots = config.num_slots;
    double spacing = config.spacing_over_wavelength;
    double sigma_h2 = config.sigma_h2;
    switch (config.axis) {
      case SweepAxis::snr_db:
        snr_db = axis_value;
        break;
      case SweepAxis::num_slots:
        num_slots = static_cast<int>(axis_value);
        break;
      case SweepAxis::spacing:
        spacing = axis_value;
        break;
      case SweepAxis::sigma_h2:
        sigma_h2 = axis_value;
        break;
    }
    const UpaGeometry geom = make_geometry(config, spacing);
    const int m = geom.size();

    ChannelModel model;
    if (config.source == ChannelSource::clustered) {
      auto it = clustered_cache.find(spacing);
      if (it == clustered_cache.end()) {
        it = clustered_cache.emplace(spacing, clustered_model(config, geom)).first;
      }
      model = it->second;
    } else {
      model = gaussian_model(config, geom);
    }

    Kernel assumed;
    bool matched = false;
    switch (config.kernel) {
      case KernelChoice::perfect:
        assumed = model.true_kernel;
        matched = true;
        break;
      case KernelChoice::statistical:
        assumed = statistical_kernel(model.true_kernel, sigma_h2);
        matched = sigma_h2 == 0.0;
        break;
      case KernelChoice::exponential:
        assumed = exponential_kernel(geom, config.eta1);
        matched = config.source == ChannelSource::gaussian_from_kernel;
        break;
      case KernelChoice::bessel:
        assumed = bessel_kernel(geom, config.eta2);
        matched = config.source == ChannelSource::gaussian_from_kernel;
        break;
    }

    const double sigma2 = model.energy / std::pow(10.0, snr_db / 10.0);
    const EigenBasis basis_true = evd_hermitian(model.true_kernel);
    const EigenBasis basis_assumed = matched ? basis_true : evd_hermitian(assumed);
    if (gi == 0) {
      result.trace = model.energy;
    }

    for (std::size_t di = 0; di < config.designers.size(); ++di) {
      const Designer designer = config.designers[di];
      const auto block_start = std::chrono::steady_clock::now();
      Rng design_rng(derive_stream_seed(
          config.base_seed,
          kDesignStreamBase + static_cast<std::uint64_t>(gi) * 64 + di));
      const MmOptions mm_opts{config.mm_max_iter, config.mm_rel_tol};
      const DesignOutput design = run_designer(designer, assumed, basis_assumed, sigma2,
                                               num_slots, mm_opts, design_rng);
      const ObservationMatrix& w = design.observation;

      // Estimators active for this designer. LS needs the square invertible
      // observation only the DFT designer provides.
      std::vector<Estimator> active;
      for (const Estimator estimator : config.estimators) {
        if (estimator == Estimator::ls && designer != Designer::dft) {
          continue;
        }
        active.push_back(estimator);
      }
      if (active.empty()) {
        continue;
      }

      std::optional<MmseWeight> weight;
      MatC dictionary;
      int sparsity = 0;
      for (const Estimator estimator : active) {
        if (estimator == Estimator::mmse && !weight.has_value()) {
          weight.emplace(w, assumed, sigma2);
        }
        if (estimator == Estimator::omp && dictionary.size() == 0) {
          dictionary = dft_matrix(m).matrix;
          sparsity = config.omp_sparsity > 0
                         ? config.omp_sparsity
                         : std::min(basis_assumed.rank(), w.num_slots());
        }
      }

      std::vector<Kahan> ratio(active.size());
      for (int trial = 0; trial < config.trials; ++trial) {
        Rng trial_rng(config.base_seed + static_cast<std::uint64_t>(trial));
        const VecC h = config.source == ChannelSource::clustered
                           ? draw_clustered_channel(geom, clustered_params, trial_rng)
                           : draw_gaussian_channel(basis_true, trial_rng);
        const VecC y = receive_pilots(w, h, sigma2, trial_rng);
        const double h_norm2 = h.squaredNorm();
        for (std::size_t ei = 0; ei < active.size(); ++ei) {
          VecC estimate;
          switch (active[ei]) {
            case Estimator::mmse:
              estimate = weight->apply(y);
              break;
            case Estimator::ls:
              estimate = ls_estimate(w, y);
              break;
            case Estimator::omp:
              estimate = omp_estimate(w, dictionary, y, sparsity);
              break;
          }
          ratio[ei].add((h - estimate).squaredNorm() / h_norm2);
        }
      }
      const double wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - block_start)
              .count();

      for (std::size_t ei = 0; ei < active.size(); ++ei) {
        SweepRow row;
        row.designer = designer;
        row.estimator = active[ei];
        row.axis = config.axis;
        row.axis_value = axis_value;
        row.nmse_db = 10.0 * std::log10(ratio[ei].sum / config.trials);
        row.trials = config.trials;
        row.wall_seconds = wall_seconds;
        if (active[ei] == Estimator::mmse) {
          if (matched) {
            switch (designer) {
              case Designer::wf:
                row.analytic_mse =
                    mse_waterfilling(basis_assumed.values, *design.power, sigma2);
                break;
              case Designer::icefill:
                row.analytic_mse =
                    mse_icefilling(basis_assumed.values, *design.pilot, sigma2);
                break;
              case Designer::random_gaussian:
              case Designer::random_phase:
                row.analytic_mse = mse_random(basis_assumed.values, num_slots, m, sigma2);
                break;
              default:
                // Exact Bayesian MSE of this specific observation matrix.
                row.analytic_mse = weight->posterior_trace();
                break;
            }
          } else {
            row.analytic_mse = mse_mismatched(w, assumed, model.true_kernel, sigma2);
          }
        } else if (active[ei] == Estimator::ls) {
          row.analytic_mse = sigma2 * m;  // unitary noise pass-through
        }
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  CsvTable table;
  table.schema_comment =
      "sweep v1: nmse_db = 10*log10(mean per-trial |h-est|^2/|h|^2); analytic_mse absolute";
  table.header = {"designer", "estimator", "axis", "axis_value",
                  "nmse_db",  "analytic_mse", "trials"};
  for (const SweepRow& row : result.rows) {
    table.rows.push_back({to_string(row.designer), to_string(row.estimator),
                          to_string(row.axis), format_double(row.axis_value),
                          format_double(row.nmse_db),
                          row.analytic_mse.has_value() ? format_double(*row.analytic_mse) : "",
                          std::to_string(row.trials)});
  }
  write_table_csv(path, table);
}

std::string run_design_cmd(const ExperimentConfig& config, const std::string& out_path) {
  if (config.kernel_file.empty()) {
    throw ConfigError("design: kernel_file is required");
  }
  MatC covariance = read_complex_matrix_csv(config.kernel_file);
  if (covariance.rows() != covariance.cols()) {
    throw InvalidInputError("design: kernel file must hold a square matrix");
  }
  const Kernel kernel = perfect_kernel(std::move(covariance));
  const EigenBasis basis = evd_hermitian(kernel);
  const Designer designer = designer_from_string(config.method);
  Rng rng(derive_stream_seed(config.base_seed, kDesignStreamBase));
  const MmOptions mm_opts{config.mm_max_iter, config.mm_rel_tol};
  const int num_slots =
      designer == Designer::dft ? kernel.dim() : config.num_slots;
  const DesignOutput design =
      run_designer(designer, kernel, basis, config.sigma2, num_slots, mm_opts, rng);
  write_complex_matrix_csv(out_path, design.observation.matrix);
  if (design.pilot.has_value()) {
    write_allocation_csv(out_path + ".alloc.csv", *design.pilot);
  }
  return out_path;
}

std::string run_estimate_cmd(const ExperimentConfig& config, const std::string& out_path) {
  if (config.kernel_file.empty() || config.observation_file.empty() ||
      config.pilot_file.empty()) {
    throw ConfigError("estimate: kernel_file, observation_file and pilot_file are required");
  }
  MatC covariance = read_complex_matrix_csv(config.kernel_file);
  if (covariance.rows() != covariance.cols()) {
    throw InvalidInputError("estimate: kernel file must hold a square matrix");
  }
  const Kernel kernel = perfect_kernel(std::move(covariance));
  ObservationMatrix obs;
  obs.matrix = read_complex_matrix_csv(config.observation_file);
  const MatC pilots = read_complex_matrix_csv(config.pilot_file);
  VecC y;
  if (pilots.cols() == 1) {
    y = pilots.col(0);
  } else if (pilots.rows() == 1) {
    y = pilots.row(0).transpose();
  } else {
    throw InvalidInputError("estimate: pilot file must hold a vector");
  }
  const EstimateResult estimate = mmse_estimate(obs, kernel, config.sigma2, y);
  write_complex_matrix_csv(out_path, estimate.posterior_mean);
  return out_path;
}

std::string run_analyze_cmd(const ExperimentConfig& config, const std::string& out_path) {
  if (config.spectrum_file.empty()) {
    throw ConfigError("analyze: spectrum_file is required");
  }
  if (config.grid.size() == 0) {
    throw ConfigError("analyze: grid must list the pilot counts to evaluate");
  }
  const VecD spectrum = read_real_vector_csv(config.spectrum_file);
  if (spectrum.size() == 0) {
    throw InvalidInputError("analyze: empty spectrum");
  }
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i] < 0.0 || (i > 0 && spectrum[i] > spectrum[i - 1])) {
      throw InvalidInputError("analyze: spectrum must be nonnegative and descending");
    }
  }
  AllocationMethod method = AllocationMethod::waterfill;
  if (config.method == "wf") {
    method = AllocationMethod::waterfill;
  } else if (config.method == "if") {
    method = AllocationMethod::icefill;
  } else if (config.method == "rnd") {
    method = AllocationMethod::random;
  } else {
    throw ConfigError("analyze: method must be wf, if, or rnd");
  }
  const int m = config.mx * config.my;
  if (static_cast<Eigen::Index>(m) < spectrum.size()) {
    throw ConfigError("analyze: geometry holds fewer antennas than spectrum entries");
  }
  VecD padded = VecD::Zero(m);
  padded.head(spectrum.size()) = spectrum;
  CsvTable table;
  table.schema_comment = "analytic mse v1";
  table.header = {"method", "q", "sigma2", "sigma_h2", "delta"};
  for (Eigen::Index i = 0; i < config.grid.size(); ++i) {
    const double value = config.grid[i];
    if (value < 1.0 || value != std::floor(value)) {
      throw ConfigError("analyze: grid entries must be positive integer pilot counts");
    }
    const double delta = mse_statistical(method, padded, config.sigma_h2, config.sigma2,
                                         static_cast<int>(value));
    table.rows.push_back({config.method, format_double(value), format_double(config.sigma2),
                          format_double(config.sigma_h2), format_double(delta)});
  }
  write_table_csv(out_path, table);
  return out_path;
}

}  // namespace icefill
