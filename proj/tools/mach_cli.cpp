// SPDX-License-Identifier: Apache-2.0
// ------------------------------------------------------------------------
// mach — low-rank multipath channel models and covariance-based activity
// detection over OFDM time-frequency blocks.
//
// Copyright 2026 the mach authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Command line driver. Every subcommand reads one JSON config and writes
// its artifacts into --out:
//
//   gen-channels   channels.bin            trial-1 channel tensor
//   build-basis    <model>.basis           every configured basis
//   kappa          kappa.csv               approximation errors per model
//   sweep-order    kappa.csv               PCA order sweep + baselines
//   detect         trace.csv, gamma.csv    one detection run (trial 1)
//   experiment     detection.csv, summary.csv, trace.csv
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure (the
// failing module/operation is printed on standard error).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mach/basis.hpp"
#include "mach/channel_sim.hpp"
#include "mach/csv.hpp"
#include "mach/detector.hpp"
#include "mach/errors.hpp"
#include "mach/experiment_config.hpp"
#include "mach/harness.hpp"
#include "mach/rng.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment configuration")
      ->required();
  cmd->add_option("--seed", opts.seed, "override the master seed from the config");
  cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
  cmd->add_option("--threads", opts.threads, "override the worker thread count");
}

mach::ExperimentConfig load(const CommonOpts& opts) {
  mach::ExperimentConfig config = mach::load_experiment_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.threads) {
    if (*opts.threads < 1) throw mach::ConfigError("threads", "must be at least 1");
    config.threads = *opts.threads;
  }
  std::filesystem::create_directories(opts.out_dir);
  return config;
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void cmd_gen_channels(const CommonOpts& opts) {
  const mach::ExperimentConfig config = load(opts);
  const mach::ChannelSetup setup = mach::make_channel_setup(config);
  const mach::ChannelTensor tensor = mach::generate_channels(
      setup.grid, setup.pdp, setup.pulse, setup.doppler, config.population.K,
      config.population.M, mach::derive_stream(config.seed, {mach::stream_tag::kChannel, 1}),
      setup.scale, config.threads);
  const std::string path = join(opts.out_dir, "channels.bin");
  mach::write_channel_tensor(path, tensor);
  std::cout << "wrote " << path << " (L=" << tensor.L() << ", K=" << tensor.K
            << ", M=" << tensor.M << ")\n";
}

void cmd_build_basis(const CommonOpts& opts) {
  const mach::ExperimentConfig config = load(opts);
  const mach::ChannelSetup setup = mach::make_channel_setup(config);
  const mach::ChannelTensor train = mach::generate_training_channels(config, setup);
  const mach::CovarianceEstimate cov = mach::sample_covariance(train);
  for (const mach::Basis& basis : mach::build_bases(config, cov)) {
    const std::string path = join(opts.out_dir, basis.id() + ".basis");
    mach::write_basis(path, basis);
    std::cout << "wrote " << path << " (L=" << basis.L() << ", N=" << basis.order() << ")\n";
  }
}

void cmd_kappa(const CommonOpts& opts) {
  const mach::ExperimentConfig config = load(opts);
  const std::vector<mach::KappaRow> rows = mach::run_kappa_study(config);
  const std::string path = join(opts.out_dir, "kappa.csv");
  mach::write_kappa_csv(path, rows);
  for (const mach::KappaRow& row : rows) {
    std::cout << row.model_id << " N=" << row.N << " kappa=" << mach::format_double(row.kappa)
              << " epsilon=" << mach::format_double(row.epsilon) << "\n";
  }
  std::cout << "wrote " << path << "\n";
}

void cmd_sweep_order(const CommonOpts& opts, int max_order) {
  const mach::ExperimentConfig config = load(opts);
  const std::vector<mach::KappaRow> rows = mach::run_order_sweep(config, max_order);
  const std::string path = join(opts.out_dir, "kappa.csv");
  mach::write_kappa_csv(path, rows);
  std::cout << "wrote " << path << " (" << rows.size() << " rows)\n";
}

void cmd_detect(const CommonOpts& opts) {
  mach::ExperimentConfig config = load(opts);
  config.trials = 1;
  const mach::ChannelSetup setup = mach::make_channel_setup(config);

  mach::CovarianceEstimate train_cov;
  {
    const mach::ChannelTensor train = mach::generate_training_channels(config, setup);
    train_cov = mach::sample_covariance(train);
  }
  const std::vector<mach::Basis> bases = mach::build_bases(config, train_cov);
  const mach::Basis& basis = bases.front();

  const int K = config.population.K;
  const std::uint64_t seed = config.seed;
  const mach::ChannelTensor channels = mach::generate_channels(
      setup.grid, setup.pdp, setup.pulse, setup.doppler, K, config.population.M,
      mach::derive_stream(seed, {mach::stream_tag::kChannel, 1}), setup.scale, config.threads);
  const Eigen::MatrixXcd pilots = mach::generate_pilots(
      K, setup.grid.L(), mach::derive_stream(seed, {mach::stream_tag::kPilot}));
  const std::vector<int> activity = mach::generate_activity(
      K, config.population.K_act, mach::derive_stream(seed, {mach::stream_tag::kActivity, 1}));
  const Eigen::VectorXd beta = config.population.beta_vector();
  const mach::ReceivedBlock received =
      mach::synthesize_received(channels, pilots, activity, beta, config.population.noise_var,
                                mach::derive_stream(seed, {mach::stream_tag::kNoise, 1}));

  mach::DetectorConfig dc;
  dc.epochs = config.detector.epochs;
  dc.noise_var = config.population.noise_var;
  dc.constraint = config.detector.constraint == mach::ConstraintKind::kBox
                      ? mach::GammaConstraint::box(beta)
                      : mach::GammaConstraint::nonnegative();
  dc.update = {config.detector.root_mode, config.detector.d_max_factor};
  dc.rng_seed = mach::derive_stream(seed, {mach::stream_tag::kDetector, 1});
  dc.record_trace = true;

  const mach::DetectionResult result =
      mach::run_detection(mach::effective_pilots(pilots, basis.G), received.cov, dc);
  if (result.cap_hits > 0) {
    std::cerr << "warning: " << result.cap_hits
              << " coordinate step(s) ran into the search cap; consider the box constraint or "
                 "a larger d_max_factor\n";
  }

  const std::string trace_path = join(opts.out_dir, "trace.csv");
  const std::string gamma_path = join(opts.out_dir, "gamma.csv");
  mach::write_trace_csv(trace_path, result.trace);
  mach::write_gamma_csv(gamma_path, result.gamma);

  const mach::TrialMetrics metrics = mach::evaluate_metrics(activity, result.gamma);
  std::cout << "model=" << basis.id() << " epochs=" << config.detector.epochs
            << " final_cost=" << mach::format_double(result.epoch_costs.back())
            << " min_total_error=" << mach::format_double(metrics.min_total_error) << "\n";
  std::cout << "wrote " << trace_path << " and " << gamma_path << "\n";
}

void cmd_experiment(const CommonOpts& opts) {
  const mach::ExperimentConfig config = load(opts);
  const mach::ExperimentReport report = mach::run_experiment(config);
  if (report.cap_hits > 0) {
    std::cerr << "warning: " << report.cap_hits
              << " coordinate step(s) ran into the search cap; consider the box constraint or "
                 "a larger d_max_factor\n";
  }
  mach::write_detection_csv(join(opts.out_dir, "detection.csv"), report.curves);
  mach::write_summary_csv(join(opts.out_dir, "summary.csv"), report.curves);
  mach::write_trace_csv(join(opts.out_dir, "trace.csv"), report.trace);
  for (const mach::ModelCurve& curve : report.curves) {
    std::cout << curve.model_id
              << " min_total_error_mean=" << mach::format_double(curve.min_total_error_mean)
              << " std=" << mach::format_double(curve.min_total_error_std) << " trials="
              << curve.trials << "\n";
  }
  std::cout << "wrote detection.csv, summary.csv, trace.csv in " << opts.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multipath channel simulation, low-rank channel bases, and covariance-based "
               "activity detection"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  add_common(app.add_subcommand("gen-channels", "simulate and store a channel tensor"),
             gen_opts);
  CommonOpts basis_opts;
  add_common(app.add_subcommand("build-basis", "fit and store the configured bases"),
             basis_opts);
  CommonOpts kappa_opts;
  add_common(app.add_subcommand("kappa", "approximation errors of the configured models"),
             kappa_opts);
  CommonOpts sweep_opts;
  int max_order = 8;
  CLI::App* sweep = app.add_subcommand("sweep-order", "PCA approximation error versus order");
  add_common(sweep, sweep_opts);
  sweep->add_option("--max-order", max_order, "largest PCA order to sweep")
      ->check(CLI::PositiveNumber);
  CommonOpts detect_opts;
  add_common(app.add_subcommand("detect", "single seeded detection run with diagnostics"),
             detect_opts);
  CommonOpts exp_opts;
  add_common(app.add_subcommand("experiment", "full paired multi-model experiment"), exp_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand("gen-channels")) {
      cmd_gen_channels(gen_opts);
    } else if (app.got_subcommand("build-basis")) {
      cmd_build_basis(basis_opts);
    } else if (app.got_subcommand("kappa")) {
      cmd_kappa(kappa_opts);
    } else if (app.got_subcommand("sweep-order")) {
      cmd_sweep_order(sweep_opts, max_order);
    } else if (app.got_subcommand("detect")) {
      cmd_detect(detect_opts);
    } else if (app.got_subcommand("experiment")) {
      cmd_experiment(exp_opts);
    }
  } catch (const mach::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const mach::NumericalError& e) {
    std::cerr << "numerical failure in " << e.module() << "/" << e.op() << ": " << e.what()
              << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
