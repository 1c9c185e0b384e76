#include "icefill/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "icefill/csvio.hpp"

namespace icefill {

namespace {

[[nodiscard]] std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  const std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

[[nodiscard]] std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      items.push_back(item);
    }
  }
  return items;
}

[[nodiscard]] double parse_double_value(const std::string& value, const std::string& key) {
  double parsed = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, parsed);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: bad number for '" + key + "': " + value);
  }
  return parsed;
}

template <typename Int>
[[nodiscard]] Int parse_int_value(const std::string& value, const std::string& key) {
  Int parsed = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, parsed);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: bad integer for '" + key + "': " + value);
  }
  return parsed;
}

[[nodiscard]] ChannelSource parse_source(const std::string& value) {
  if (value == "gaussian-from-kernel") return ChannelSource::gaussian_from_kernel;
  if (value == "clustered") return ChannelSource::clustered;
  throw ConfigError("config: unknown channel source: " + value);
}

[[nodiscard]] KernelChoice parse_kernel(const std::string& value) {
  if (value == "perfect") return KernelChoice::perfect;
  if (value == "statistical") return KernelChoice::statistical;
  if (value == "exponential") return KernelChoice::exponential;
  if (value == "bessel") return KernelChoice::bessel;
  throw ConfigError("config: unknown kernel choice: " + value);
}

[[nodiscard]] SweepAxis parse_axis(const std::string& value) {
  if (value == "snr_db") return SweepAxis::snr_db;
  if (value == "num_slots") return SweepAxis::num_slots;
  if (value == "spacing") return SweepAxis::spacing;
  if (value == "sigma_h2") return SweepAxis::sigma_h2;
  throw ConfigError("config: unknown sweep axis: " + value);
}

[[nodiscard]] Designer parse_designer(const std::string& value) {
  if (value == "wf") return Designer::wf;
  if (value == "if") return Designer::icefill;
  if (value == "mm") return Designer::mm;
  if (value == "random-gaussian") return Designer::random_gaussian;
  if (value == "random-phase") return Designer::random_phase;
  if (value == "topq") return Designer::topq;
  if (value == "dft") return Designer::dft;
  throw ConfigError("config: unknown designer: " + value);
}

[[nodiscard]] Estimator parse_estimator(const std::string& value) {
  if (value == "mmse") return Estimator::mmse;
  if (value == "ls") return Estimator::ls;
  if (value == "omp") return Estimator::omp;
  throw ConfigError("config: unknown estimator: " + value);
}

}  // namespace

std::string to_string(ChannelSource v) {
  return v == ChannelSource::gaussian_from_kernel ? "gaussian-from-kernel" : "clustered";
}

std::string to_string(KernelChoice v) {
  switch (v) {
    case KernelChoice::perfect: return "perfect";
    case KernelChoice::statistical: return "statistical";
    case KernelChoice::exponential: return "exponential";
    case KernelChoice::bessel: return "bessel";
  }
  return "perfect";
}

std::string to_string(SweepAxis v) {
  switch (v) {
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::num_slots: return "num_slots";
    case SweepAxis::spacing: return "spacing";
    case SweepAxis::sigma_h2: return "sigma_h2";
  }
  return "snr_db";
}

std::string to_string(Designer v) {
  switch (v) {
    case Designer::wf: return "wf";
    case Designer::icefill: return "if";
    case Designer::mm: return "mm";
    case Designer::random_gaussian: return "random-gaussian";
    case Designer::random_phase: return "random-phase";
    case Designer::topq: return "topq";
    case Designer::dft: return "dft";
  }
  return "if";
}

std::string to_string(Estimator v) {
  switch (v) {
    case Estimator::mmse: return "mmse";
    case Estimator::ls: return "ls";
    case Estimator::omp: return "omp";
  }
  return "mmse";
}

void ExperimentConfig::validate() const {
  if (mx < 1 || my < 1) {
    throw ConfigError("config: antenna counts must be >= 1");
  }
  if (!(spacing_over_wavelength > 0.0)) {
    throw ConfigError("config: spacing/wavelength ratio must be positive");
  }
  if (sigma_h2 < 0.0) {
    throw ConfigError("config: sigma_h2 must be >= 0");
  }
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) {
    throw ConfigError("config: kernel hyper-parameters must be positive");
  }
  if (sample_draws < 1) {
    throw ConfigError("config: sample_draws must be >= 1");
  }
  if (designers.empty()) {
    throw ConfigError("config: designer list is empty");
  }
  if (estimators.empty()) {
    throw ConfigError("config: estimator list is empty");
  }
  if (num_slots < 1) {
    throw ConfigError("config: num_slots must be >= 1");
  }
  if (mm_max_iter < 1 || mm_rel_tol < 0.0) {
    throw ConfigError("config: bad MM iteration settings");
  }
  if (omp_sparsity < 0) {
    throw ConfigError("config: omp_sparsity must be >= 0");
  }
  if (trials < 1) {
    throw ConfigError("config: trials must be >= 1");
  }
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw ConfigError("config: sweep grid must be strictly ascending");
    }
  }
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    if (axis == SweepAxis::num_slots && (v < 1.0 || v != std::floor(v))) {
      throw ConfigError("config: num_slots grid entries must be positive integers");
    }
    if (axis == SweepAxis::spacing && !(v > 0.0)) {
      throw ConfigError("config: spacing grid entries must be positive");
    }
    if (axis == SweepAxis::sigma_h2 && v < 0.0) {
      throw ConfigError("config: sigma_h2 grid entries must be >= 0");
    }
  }
  const bool has_ls =
      std::find(estimators.begin(), estimators.end(), Estimator::ls) != estimators.end();
  const bool has_dft =
      std::find(designers.begin(), designers.end(), Designer::dft) != designers.end();
  if (has_ls && !has_dft) {
    throw ConfigError("config: the ls estimator needs the dft designer (square invertible W)");
  }
  if (axis == SweepAxis::sigma_h2 && kernel != KernelChoice::statistical) {
    throw ConfigError("config: sweeping sigma_h2 requires the statistical kernel");
  }
  if (sigma2 <= 0.0) {
    throw ConfigError("config: sigma2 must be positive");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  config.designers.clear();
  config.estimators.clear();
  bool designers_seen = false;
  bool estimators_seen = false;

  std::string section;
  std::stringstream stream(text);
  std::string raw;
  int line_no = 0;
  std::vector<double> grid_values;
  bool grid_seen = false;
  while (std::getline(stream, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string line = trim(raw);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
      }
      section = line.substr(1, line.size() - 2);
      if (section != "geometry" && section != "channel" && section != "kernel" &&
          section != "design" && section != "estimate" && section != "sweep" &&
          section != "files") {
        throw ConfigError("config: unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (qualified == "geometry.mx") {
      config.mx = parse_int_value<int>(value, qualified);
    } else if (qualified == "geometry.my") {
      config.my = parse_int_value<int>(value, qualified);
    } else if (qualified == "geometry.spacing_over_wavelength") {
      config.spacing_over_wavelength = parse_double_value(value, qualified);
    } else if (qualified == "channel.source") {
      config.source = parse_source(value);
    } else if (qualified == "kernel.kind") {
      config.kernel = parse_kernel(value);
    } else if (qualified == "kernel.sigma_h2") {
      config.sigma_h2 = parse_double_value(value, qualified);
    } else if (qualified == "kernel.eta1") {
      config.eta1 = parse_double_value(value, qualified);
    } else if (qualified == "kernel.eta2") {
      config.eta2 = parse_double_value(value, qualified);
    } else if (qualified == "kernel.sample_draws") {
      config.sample_draws = parse_int_value<int>(value, qualified);
    } else if (qualified == "design.designers") {
      designers_seen = true;
      for (const std::string& item : split_list(value)) {
        config.designers.push_back(parse_designer(item));
      }
    } else if (qualified == "design.num_slots") {
      config.num_slots = parse_int_value<int>(value, qualified);
    } else if (qualified == "design.mm_max_iter") {
      config.mm_max_iter = parse_int_value<int>(value, qualified);
    } else if (qualified == "design.mm_rel_tol") {
      config.mm_rel_tol = parse_double_value(value, qualified);
    } else if (qualified == "estimate.estimators") {
      estimators_seen = true;
      for (const std::string& item : split_list(value)) {
        config.estimators.push_back(parse_estimator(item));
      }
    } else if (qualified == "estimate.omp_sparsity") {
      config.omp_sparsity = parse_int_value<int>(value, qualified);
    } else if (qualified == "sweep.axis") {
      config.axis = parse_axis(value);
    } else if (qualified == "sweep.grid") {
      grid_seen = true;
      grid_values.clear();
      for (const std::string& item : split_list(value)) {
        grid_values.push_back(parse_double_value(item, qualified));
      }
    } else if (qualified == "sweep.snr_db") {
      config.snr_db = parse_double_value(value, qualified);
    } else if (qualified == "sweep.trials") {
      config.trials = parse_int_value<int>(value, qualified);
    } else if (qualified == "sweep.base_seed") {
      config.base_seed = parse_int_value<std::uint64_t>(value, qualified);
    } else if (qualified == "sweep.output_path") {
      config.output_path = value;
    } else if (qualified == "files.kernel_file") {
      config.kernel_file = value;
    } else if (qualified == "files.observation_file") {
      config.observation_file = value;
    } else if (qualified == "files.pilot_file") {
      config.pilot_file = value;
    } else if (qualified == "files.spectrum_file") {
      config.spectrum_file = value;
    } else if (qualified == "files.method") {
      config.method = value;
    } else if (qualified == "files.sigma2") {
      config.sigma2 = parse_double_value(value, qualified);
    } else {
      throw ConfigError("config: unknown key '" + qualified + "'");
    }
  }
  if (!designers_seen) {
    config.designers = {Designer::icefill};
  }
  if (!estimators_seen) {
    config.estimators = {Estimator::mmse};
  }
  if (grid_seen) {
    config.grid.resize(static_cast<Eigen::Index>(grid_values.size()));
    for (std::size_t i = 0; i < grid_values.size(); ++i) {
      config.grid[static_cast<Eigen::Index>(i)] = grid_values[i];
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config: cannot open " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "[geometry]\n";
  out << "mx = " << config.mx << '\n';
  out << "my = " << config.my << '\n';
  out << "spacing_over_wavelength = " << format_double(config.spacing_over_wavelength) << '\n';
  out << "\n[channel]\n";
  out << "source = " << to_string(config.source) << '\n';
  out << "\n[kernel]\n";
  out << "kind = " << to_string(config.kernel) << '\n';
  out << "sigma_h2 = " << format_double(config.sigma_h2) << '\n';
  out << "eta1 = " << format_double(config.eta1) << '\n';
  out << "eta2 = " << format_double(config.eta2) << '\n';
  out << "sample_draws = " << config.sample_draws << '\n';
  out << "\n[design]\n";
  out << "designers = ";
  for (std::size_t i = 0; i < config.designers.size(); ++i) {
    if (i > 0) {
      out << ", ";
    }
    out << to_string(config.designers[i]);
  }
  out << '\n';
  out << "num_slots = " << config.num_slots << '\n';
  out << "mm_max_iter = " << config.mm_max_iter << '\n';
  out << "mm_rel_tol = " << format_double(config.mm_rel_tol) << '\n';
  out << "\n[estimate]\n";
  out << "estimators = ";
  for (std::size_t i = 0; i < config.estimators.size(); ++i) {
    if (i > 0) {
      out << ", ";
    }
    out << to_string(config.estimators[i]);
  }
  out << '\n';
  out << "omp_sparsity = " << config.omp_sparsity << '\n';
  out << "\n[sweep]\n";
  out << "axis = " << to_string(config.axis) << '\n';
  out << "grid = ";
  for (Eigen::Index i = 0; i < config.grid.size(); ++i) {
    if (i > 0) {
      out << ", ";
    }
    out << format_double(config.grid[i]);
  }
  out << '\n';
  out << "snr_db = " << format_double(config.snr_db) << '\n';
  out << "trials = " << config.trials << '\n';
  out << "base_seed = " << config.base_seed << '\n';
  out << "output_path = " << config.output_path << '\n';
  out << "\n[files]\n";
  out << "kernel_file = " << config.kernel_file << '\n';
  out << "observation_file = " << config.observation_file << '\n';
  out << "pilot_file = " << config.pilot_file << '\n';
  out << "spectrum_file = " << config.spectrum_file << '\n';
  out << "method = " << config.method << '\n';
  out << "sigma2 = " << format_double(config.sigma2) << '\n';
  return out.str();
}

}  // namespace icefill
