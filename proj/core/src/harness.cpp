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

#include "mach/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mach/errors.hpp"
#include "mach/rng.hpp"

namespace mach {

Eigen::MatrixXcd generate_pilots(int K, int L, std::uint64_t seed) {
  if (K < 1 || L < 1) throw std::invalid_argument("need K >= 1 and L >= 1");
  Eigen::MatrixXcd phi(L, K);
  const double root_l = std::sqrt(static_cast<double>(L));
  for (int k = 0; k < K; ++k) {
    Rng rng(derive_stream(seed, {static_cast<std::uint64_t>(k)}));
    for (int l = 0; l < L; ++l) phi(l, k) = rng.cnormal();
    phi.col(k) *= root_l / phi.col(k).norm();
  }
  return phi;
}

std::vector<int> generate_activity(int K, int K_act, std::uint64_t seed) {
  if (K < 1) throw std::invalid_argument("need K >= 1");
  if (K_act < 0 || K_act > K) throw std::invalid_argument("need 0 <= K_act <= K");
  Rng rng(seed);
  const std::vector<int> perm = random_permutation(K, rng);
  std::vector<int> activity(static_cast<std::size_t>(K), 0);
  for (int i = 0; i < K_act; ++i) activity[static_cast<std::size_t>(perm[i])] = 1;
  return activity;
}

ReceivedBlock synthesize_received(const ChannelTensor& channels, const Eigen::MatrixXcd& pilots,
                                  const std::vector<int>& activity,
                                  const Eigen::VectorXd& beta, double noise_var,
                                  std::uint64_t seed) {
  const int L = channels.L();
  const int K = channels.K;
  const int M = channels.M;
  if (pilots.rows() != L || pilots.cols() != K) {
    throw std::invalid_argument("pilot matrix must be L x K");
  }
  if (static_cast<int>(activity.size()) != K || beta.size() != K) {
    throw std::invalid_argument("activity and beta must have K entries");
  }
  if (noise_var < 0.0) throw std::invalid_argument("noise variance must be nonnegative");

  ReceivedBlock block;
  block.y = Eigen::MatrixXcd::Zero(L, M);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      if (activity[static_cast<std::size_t>(k)] == 0) continue;
      block.y.col(m) +=
          std::sqrt(beta(k)) * channels.col(k, m).cwiseProduct(pilots.col(k));
    }
    if (noise_var > 0.0) {
      Rng rng(derive_stream(seed, {static_cast<std::uint64_t>(m)}));
      const double scale = std::sqrt(noise_var);
      for (int l = 0; l < L; ++l) block.y(l, m) += scale * rng.cnormal();
    }
  }
  block.cov = make_sample_covariance(block.y);
  return block;
}

TrialMetrics evaluate_metrics(const std::vector<int>& activity, const Eigen::VectorXd& gamma,
                              std::vector<double> thresholds) {
  const auto K = gamma.size();
  if (static_cast<Eigen::Index>(activity.size()) != K) {
    throw std::invalid_argument("activity and gamma must have equal length");
  }
  if (K < 1) throw std::invalid_argument("need at least one user");

  std::vector<double> active_g;
  std::vector<double> inactive_g;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (activity[static_cast<std::size_t>(k)] != 0) {
      active_g.push_back(gamma(k));
    } else {
      inactive_g.push_back(gamma(k));
    }
  }
  std::sort(active_g.begin(), active_g.end());
  std::sort(inactive_g.begin(), inactive_g.end());
  const auto K_act = static_cast<double>(active_g.size());
  const auto K_in = static_cast<double>(inactive_g.size());

  if (thresholds.empty()) {
    thresholds.assign(gamma.data(), gamma.data() + K);
    thresholds.push_back(0.0);
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  } else if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("thresholds must be sorted ascending");
  }

  TrialMetrics metrics;
  metrics.thresholds = thresholds;
  metrics.p_md_defined = !active_g.empty();
  metrics.min_total_error = std::numeric_limits<double>::infinity();
  for (double theta : thresholds) {
    // declared active iff gamma > theta
    const auto missed = static_cast<double>(
        std::upper_bound(active_g.begin(), active_g.end(), theta) - active_g.begin());
    const auto alarms = static_cast<double>(
        inactive_g.end() - std::upper_bound(inactive_g.begin(), inactive_g.end(), theta));
    const double p_md = metrics.p_md_defined ? missed / K_act : 0.0;
    const double p_fa = inactive_g.empty() ? 0.0 : alarms / K_in;
    if (metrics.p_md_defined) metrics.p_md.push_back(p_md);
    metrics.p_fa.push_back(p_fa);
    const double total = (missed + alarms) / static_cast<double>(K);
    metrics.min_total_error = std::min(metrics.min_total_error, total);
  }
  return metrics;
}

ChannelSetup make_channel_setup(const ExperimentConfig& config) {
  BlockGrid grid(config.grid.T, config.grid.F, config.grid.subcarrier_spacing_hz);
  PowerDelayProfile pdp = PowerDelayProfile::load(config.channel.pdp_file);
  PulseShape pulse = PulseShape::for_profile(config.channel.pulse, config.channel.rolloff,
                                             config.channel.l_min, pdp, grid.bandwidth_hz());
  DopplerConfig doppler = DopplerConfig::make(config.channel.carrier_freq_hz,
                                              config.channel.speed_mps(),
                                              config.channel.n_sinusoids);
  return {grid, pdp, pulse, doppler, config.channel.symbol_time_scale};
}

ChannelTensor generate_training_channels(const ExperimentConfig& config,
                                         const ChannelSetup& setup) {
  if (config.basis.train_pairs > std::numeric_limits<int>::max()) {
    throw ConfigError("basis.train_pairs", "too large");
  }
  const std::uint64_t seed = derive_stream(config.basis.train_seed, {stream_tag::kTrain});
  return generate_channels(setup.grid, setup.pdp, setup.pulse, setup.doppler,
                           static_cast<int>(config.basis.train_pairs), 1, seed, setup.scale,
                           config.threads);
}

std::vector<Basis> build_bases(const ExperimentConfig& config,
                               const CovarianceEstimate& train_cov) {
  const BlockGrid grid(config.grid.T, config.grid.F, config.grid.subcarrier_spacing_hz);
  std::vector<Basis> bases;
  bases.reserve(config.basis.models.size());
  for (const BasisSpec& spec : config.basis.models) {
    switch (spec.model) {
      case BasisModel::kPca:
        bases.push_back(pca_basis(train_cov, spec.N));
        break;
      case BasisModel::kBlockFading:
        bases.push_back(block_fading_basis(grid));
        break;
      case BasisModel::kBwl:
        bases.push_back(bwl_basis(grid, spec.time_aware));
        break;
      case BasisModel::kDft:
        bases.push_back(dft_basis(grid, spec.time_aware));
        break;
    }
  }
  return bases;
}

namespace {

struct TrialOutcome {
  std::vector<Eigen::VectorXd> gammas;  // one per model, config order
  std::vector<int> activity;
  std::vector<TraceRow> trace;  // filled for trial 1, model 0 only
  Eigen::VectorXd trace_gamma;
  long cap_hits = 0;
};

// Runs `body(i)` for i in [0, n) on up to `threads` workers; exceptions are
// captured and the first one rethrown after all workers join.
template <typename Body>
void parallel_for(int n, int threads, Body body) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  if (config.basis.on_sample) {
    throw ConfigError("basis.on_sample",
                      "not applicable to detection experiments; every trial draws fresh "
                      "channels");
  }

  const ChannelSetup setup = make_channel_setup(config);
  CovarianceEstimate train_cov;
  {
    const ChannelTensor train = generate_training_channels(config, setup);
    train_cov = sample_covariance(train);
  }
  const std::vector<Basis> bases = build_bases(config, train_cov);

  const int K = config.population.K;
  const int M = config.population.M;
  const int L = setup.grid.L();
  const double noise_var = config.population.noise_var;
  const Eigen::VectorXd beta = config.population.beta_vector();
  const std::uint64_t seed = config.seed;

  Eigen::MatrixXcd shared_pilots;
  if (!config.redraw_pilots) {
    shared_pilots = generate_pilots(K, L, derive_stream(seed, {stream_tag::kPilot}));
  }

  GammaConstraint constraint = config.detector.constraint == ConstraintKind::kBox
                                   ? GammaConstraint::box(beta)
                                   : GammaConstraint::nonnegative();

  const int trials = config.trials;
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  const int trial_workers = std::max(1, std::min(config.threads, trials));
  const int inner_threads = trial_workers > 1 ? 1 : config.threads;

  parallel_for(trials, trial_workers, [&](int t) {
    const auto trial = static_cast<std::uint64_t>(t + 1);
    TrialOutcome& out = outcomes[static_cast<std::size_t>(t)];

    ReceivedBlock received;
    {
      const ChannelTensor channels =
          generate_channels(setup.grid, setup.pdp, setup.pulse, setup.doppler, K, M,
                            derive_stream(seed, {stream_tag::kChannel, trial}), setup.scale,
                            inner_threads);
      out.activity =
          generate_activity(K, config.population.K_act,
                            derive_stream(seed, {stream_tag::kActivity, trial}));
      const Eigen::MatrixXcd pilots =
          config.redraw_pilots
              ? generate_pilots(K, L, derive_stream(seed, {stream_tag::kPilot, trial}))
              : shared_pilots;
      received = synthesize_received(channels, pilots, out.activity, beta, noise_var,
                                     derive_stream(seed, {stream_tag::kNoise, trial}));

      out.gammas.reserve(bases.size());
      for (std::size_t b = 0; b < bases.size(); ++b) {
        const EffectivePilotSet eff = effective_pilots(pilots, bases[b].G);
        DetectorConfig dc;
        dc.epochs = config.detector.epochs;
        dc.noise_var = noise_var;
        dc.constraint = constraint;
        dc.update = {config.detector.root_mode, config.detector.d_max_factor};
        dc.rng_seed = derive_stream(seed, {stream_tag::kDetector, trial});
        dc.record_trace = t == 0 && b == 0;
        DetectionResult res = run_detection(eff, received.cov, dc);
        out.cap_hits += res.cap_hits;
        if (dc.record_trace) {
          out.trace = std::move(res.trace);
          out.trace_gamma = res.gamma;
        }
        out.gammas.push_back(std::move(res.gamma));
      }
    }
  });

  ExperimentReport report;
  report.trace = std::move(outcomes.front().trace);
  report.trace_gamma = outcomes.front().trace_gamma;
  for (const TrialOutcome& out : outcomes) report.cap_hits += out.cap_hits;

  for (std::size_t b = 0; b < bases.size(); ++b) {
    ModelCurve curve;
    curve.model_id = bases[b].id();
    curve.trials = trials;

    std::vector<double> grid_thr{0.0};
    for (const TrialOutcome& out : outcomes) {
      const Eigen::VectorXd& g = out.gammas[b];
      grid_thr.insert(grid_thr.end(), g.data(), g.data() + g.size());
    }
    std::sort(grid_thr.begin(), grid_thr.end());
    grid_thr.erase(std::unique(grid_thr.begin(), grid_thr.end()), grid_thr.end());
    curve.thresholds = grid_thr;

    const std::size_t G = grid_thr.size();
    std::vector<double> md_sum(G, 0.0);
    std::vector<double> fa_sum(G, 0.0);
    bool p_md_defined = true;
    for (const TrialOutcome& out : outcomes) {
      const TrialMetrics m = evaluate_metrics(out.activity, out.gammas[b], grid_thr);
      p_md_defined = p_md_defined && m.p_md_defined;
      for (std::size_t i = 0; i < G; ++i) {
        if (m.p_md_defined) md_sum[i] += m.p_md[i];
        fa_sum[i] += m.p_fa[i];
      }
      curve.min_errors.push_back(m.min_total_error);
    }
    if (p_md_defined) {
      curve.p_md_mean.resize(G);
      for (std::size_t i = 0; i < G; ++i) curve.p_md_mean[i] = md_sum[i] / trials;
    }
    curve.p_fa_mean.resize(G);
    for (std::size_t i = 0; i < G; ++i) curve.p_fa_mean[i] = fa_sum[i] / trials;

    double mean = 0.0;
    for (double e : curve.min_errors) mean += e;
    mean /= trials;
    double var = 0.0;
    for (double e : curve.min_errors) var += (e - mean) * (e - mean);
    curve.min_total_error_mean = mean;
    curve.min_total_error_std = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;

    report.curves.push_back(std::move(curve));
  }
  return report;
}

PairedDifference paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("paired samples must have equal nonzero length");
  }
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += b[i] - a[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = b[i] - a[i] - mean;
    var += d * d;
  }
  PairedDifference diff;
  diff.mean = mean;
  diff.std_error = a.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  return diff;
}

namespace {

// Training and evaluation tensors shared by the kappa studies.
struct KappaData {
  CovarianceEstimate train_cov;
  ChannelTensor eval;
};

KappaData make_kappa_data(const ExperimentConfig& config, const ChannelSetup& setup) {
  KappaData data;
  ChannelTensor train = generate_training_channels(config, setup);
  data.train_cov = sample_covariance(train);
  if (config.basis.on_sample) {
    data.eval = std::move(train);
  } else {
    data.eval = generate_channels(setup.grid, setup.pdp, setup.pulse, setup.doppler,
                                  config.population.K, config.population.M,
                                  derive_stream(config.seed, {stream_tag::kChannel, 0}),
                                  setup.scale, config.threads);
  }
  return data;
}

}  // namespace

std::vector<KappaRow> run_kappa_study(const ExperimentConfig& config) {
  validate_config(config);
  const ChannelSetup setup = make_channel_setup(config);
  const KappaData data = make_kappa_data(config, setup);
  const std::vector<Basis> bases = build_bases(config, data.train_cov);

  std::vector<KappaRow> rows;
  rows.reserve(bases.size());
  for (const Basis& basis : bases) {
    const ApproxReport rep = approx_error_kappa(data.eval, basis);
    rows.push_back({basis.label, basis.order(), rep.kappa, rep.epsilon});
  }
  return rows;
}

std::vector<KappaRow> run_order_sweep(const ExperimentConfig& config, int max_order) {
  validate_config(config);
  const int L = config.grid.T * config.grid.F;
  if (max_order < 1 || max_order > L) {
    throw ConfigError("max_order", "must lie in [1, L = " + std::to_string(L) + "]");
  }
  const ChannelSetup setup = make_channel_setup(config);
  const KappaData data = make_kappa_data(config, setup);

  std::vector<KappaRow> rows;
  for (int n = 1; n <= max_order; ++n) {
    const Basis basis = pca_basis(data.train_cov, n);
    const ApproxReport rep = approx_error_kappa(data.eval, basis);
    rows.push_back({basis.label, n, rep.kappa, rep.epsilon});
  }
  for (const BasisSpec& spec : config.basis.models) {
    if (spec.model == BasisModel::kPca) continue;
    ExperimentConfig one = config;
    one.basis.models = {spec};
    const std::vector<Basis> bases = build_bases(one, data.train_cov);
    const ApproxReport rep = approx_error_kappa(data.eval, bases.front());
    rows.push_back({bases.front().label, bases.front().order(), rep.kappa, rep.epsilon});
  }
  return rows;
}

}  // namespace mach
