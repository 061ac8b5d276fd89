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
// End-to-end seeded experiments. Every random object is drawn from a
// stream derived from the master seed and a fixed tag/trial path (see
// rng.hpp), so for a fixed trial index every model sees bit-identical
// channels, pilots, activity, and noise — model comparisons are paired by
// construction, and reruns reproduce CSV artifacts byte for byte.

#ifndef MACH_HARNESS_HPP
#define MACH_HARNESS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mach/basis.hpp"
#include "mach/channel_sim.hpp"
#include "mach/detector.hpp"
#include "mach/experiment_config.hpp"

namespace mach {

// L x K pilot matrix, each column i.i.d. CN(0, I_L) scaled to ||phi||^2 = L.
Eigen::MatrixXcd generate_pilots(int K, int L, std::uint64_t seed);

// 0/1 activity vector with exactly K_act ones, uniform over subsets.
std::vector<int> generate_activity(int K, int K_act, std::uint64_t seed);

// Received pilot block across antennas and its sample covariance:
//
//   y_m = sum_k a_k sqrt(beta_k) diag(h_{k,m}) phi_k + w_m,
//   w_m i.i.d. CN(0, noise_var I_L)  (noise_var = 0 allowed: noiseless).
//
// The true simulated channels enter here; detectors only ever see them
// through the sample covariance and their basis.
struct ReceivedBlock {
  Eigen::MatrixXcd y;  // L x M
  SampleCovariance cov;
};

ReceivedBlock synthesize_received(const ChannelTensor& channels, const Eigen::MatrixXcd& pilots,
                                  const std::vector<int>& activity,
                                  const Eigen::VectorXd& beta, double noise_var,
                                  std::uint64_t seed);

// Threshold sweep of one trial. At threshold theta, user k is declared
// active iff gamma_k > theta, so
//
//   P_MD(theta) = #{active k : gamma_k <= theta} / K_act,
//   P_FA(theta) = #{inactive k : gamma_k > theta} / (K - K_act),
//
// and the total-error rate is (P_MD K_act + P_FA (K - K_act)) / K. With
// K_act = 0 the miss probability is undefined and reported as absent.
struct TrialMetrics {
  std::vector<double> thresholds;  // ascending
  std::vector<double> p_md;        // empty when !p_md_defined
  std::vector<double> p_fa;
  bool p_md_defined = true;
  double min_total_error = 0.0;  // min over the sweep of the total-error rate
};

// Empty `thresholds` selects the default grid: sorted distinct gamma
// values plus 0 (the exact ROC support).
TrialMetrics evaluate_metrics(const std::vector<int>& activity, const Eigen::VectorXd& gamma,
                              std::vector<double> thresholds = {});

// --- full experiment -------------------------------------------------------

struct ModelCurve {
  std::string model_id;            // e.g. "pca4"
  std::vector<double> thresholds;  // union grid over trials, ascending
  std::vector<double> p_md_mean;   // pointwise mean over trials
  std::vector<double> p_fa_mean;
  std::vector<double> min_errors;  // per-trial minimum total-error rates
  double min_total_error_mean = 0.0;
  double min_total_error_std = 0.0;  // sample std over trials
  int trials = 0;
};

struct ExperimentReport {
  std::vector<ModelCurve> curves;  // config order
  std::vector<TraceRow> trace;     // diagnostics of trial 1, first model
  Eigen::VectorXd trace_gamma;     // its final gamma
  long cap_hits = 0;               // summed over all runs
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// Mean and standard error of paired differences b - a (positive mean means
// a is better when lower is better).
struct PairedDifference {
  double mean = 0.0;
  double std_error = 0.0;
};

PairedDifference paired_difference(const std::vector<double>& a, const std::vector<double>& b);

// --- approximation-quality studies ------------------------------------------

struct KappaRow {
  std::string model_id;
  int N = 0;  // effective order
  double kappa = 0.0;
  double epsilon = 0.0;
};

// kappa/epsilon for every configured model. The basis is fitted on the
// training tensor (basis.train_pairs vectors, basis.train_seed); the
// errors are measured on K*M fresh vectors, or on the training tensor
// itself when basis.on_sample.
std::vector<KappaRow> run_kappa_study(const ExperimentConfig& config);

// PCA swept over orders 1..max_order plus every configured non-PCA model
// at its fixed order, on the same tensors as run_kappa_study.
std::vector<KappaRow> run_order_sweep(const ExperimentConfig& config, int max_order);

// --- pieces shared by the CLI and tests --------------------------------------

// Builds every configured basis; PCA models are fitted on `train_cov`.
std::vector<Basis> build_bases(const ExperimentConfig& config,
                               const CovarianceEstimate& train_cov);

// Channel machinery (grid, profile, pulse, Doppler) assembled from config.
struct ChannelSetup {
  BlockGrid grid;
  PowerDelayProfile pdp;
  PulseShape pulse;
  DopplerConfig doppler;
  SymbolTimeScale scale;
};

ChannelSetup make_channel_setup(const ExperimentConfig& config);

// Training tensor: train_pairs single-antenna channel draws.
ChannelTensor generate_training_channels(const ExperimentConfig& config,
                                         const ChannelSetup& setup);

}  // namespace mach

#endif  // MACH_HARNESS_HPP
