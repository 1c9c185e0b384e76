// icefill: pilot-design and channel-estimation experiment runner.
//
//   icefill design   --config cfg.ini [--seed N] [--out W.csv]
//   icefill estimate --config cfg.ini [--seed N] [--out hhat.csv]
//   icefill analyze  --config cfg.ini [--seed N] [--out delta.csv]
//   icefill sweep    --config cfg.ini [--seed N] [--out sweep.csv]
//
// Exit codes: 0 success, 2 configuration/input error, 3 numeric failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "icefill/config.hpp"
#include "icefill/sweep.hpp"
#include "icefill/types.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args->out_path, "output file path");
  cmd->add_option("--seed", args->seed, "override [sweep] base_seed")
      ->each([args](const std::string&) { args->seed_set = true; });
}

[[nodiscard]] icefill::ExperimentConfig load(const CommonArgs& args) {
  icefill::ExperimentConfig config = icefill::load_config(args.config_path);
  if (args.seed_set) {
    config.base_seed = args.seed;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilot observation design and Bayesian channel estimation"};
  app.require_subcommand(1);

  CommonArgs design_args, estimate_args, analyze_args, sweep_args;
  CLI::App* design = app.add_subcommand("design", "write an observation matrix");
  add_common(design, &design_args);
  CLI::App* estimate = app.add_subcommand("estimate", "posterior-mean estimate from pilots");
  add_common(estimate, &estimate_args);
  CLI::App* analyze = app.add_subcommand("analyze", "closed-form MSE over a pilot grid");
  add_common(analyze, &analyze_args);
  CLI::App* sweep = app.add_subcommand("sweep", "Monte-Carlo NMSE sweep");
  add_common(sweep, &sweep_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (design->parsed()) {
      const std::string out =
          design_args.out_path.empty() ? "observation.csv" : design_args.out_path;
      const std::string written = icefill::run_design_cmd(load(design_args), out);
      std::printf("wrote %s\n", written.c_str());
    } else if (estimate->parsed()) {
      const std::string out =
          estimate_args.out_path.empty() ? "estimate.csv" : estimate_args.out_path;
      const std::string written = icefill::run_estimate_cmd(load(estimate_args), out);
      std::printf("wrote %s\n", written.c_str());
    } else if (analyze->parsed()) {
      const std::string out =
          analyze_args.out_path.empty() ? "analytic.csv" : analyze_args.out_path;
      const std::string written = icefill::run_analyze_cmd(load(analyze_args), out);
      std::printf("wrote %s\n", written.c_str());
    } else if (sweep->parsed()) {
      icefill::ExperimentConfig config = load(sweep_args);
      if (!sweep_args.out_path.empty()) {
        config.output_path = sweep_args.out_path;
      }
      const icefill::SweepResult result = icefill::run_sweep(config);
      icefill::write_sweep_csv(config.output_path, result);
      std::printf("wrote %s (%zu rows)\n", config.output_path.c_str(), result.rows.size());
    }
  } catch (const icefill::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const icefill::InvalidInputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const icefill::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
