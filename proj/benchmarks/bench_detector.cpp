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

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "mach/detector.hpp"
#include "mach/rng.hpp"

namespace {

struct DetectorFixture {
  mach::EffectivePilotSet pilots;
  mach::SampleCovariance cov;
  double noise_var = 1.0;

  DetectorFixture(int L, int N, int K, int M) {
    mach::Rng rng(mach::derive_stream(31, {static_cast<std::uint64_t>(L),
                                           static_cast<std::uint64_t>(K)}));
    Eigen::MatrixXcd phi(L, K);
    for (int k = 0; k < K; ++k) {
      double norm2 = 0.0;
      for (int l = 0; l < L; ++l) {
        phi(l, k) = rng.cnormal();
        norm2 += std::norm(phi(l, k));
      }
      phi.col(k) *= std::sqrt(L / norm2);
    }
    Eigen::MatrixXcd basis(L, N);
    for (int n = 0; n < N; ++n) {
      for (int l = 0; l < L; ++l) basis(l, n) = rng.cnormal();
    }
    pilots = mach::effective_pilots(phi, basis);

    Eigen::MatrixXcd y(L, M);
    for (int m = 0; m < M; ++m) {
      for (int l = 0; l < L; ++l) y(l, m) = rng.cnormal();
    }
    cov = mach::make_sample_covariance(y);
  }
};

void BM_MakeSampleCovariance(benchmark::State& state) {
  mach::Rng rng(17);
  const int L = 100;
  const int M = static_cast<int>(state.range(0));
  Eigen::MatrixXcd y(L, M);
  for (int m = 0; m < M; ++m) {
    for (int l = 0; l < L; ++l) y(l, m) = rng.cnormal();
  }
  for (auto _ : state) {
    const mach::SampleCovariance cov = mach::make_sample_covariance(y);
    benchmark::DoNotOptimize(cov.sigma_hat(0, 0));
  }
}
BENCHMARK(BM_MakeSampleCovariance)->Arg(64)->Arg(200);

void BM_CoordinateUpdate(benchmark::State& state) {
  const DetectorFixture fx(100, static_cast<int>(state.range(0)), 256, 64);
  const mach::GammaState base = mach::init_gamma_state(
      fx.pilots.K(), fx.cov, fx.noise_var, mach::GammaConstraint::nonnegative());
  int k = 0;
  for (auto _ : state) {
    mach::GammaState scratch = base;
    const mach::CoordinateUpdateWork work =
        mach::coordinate_update(scratch, fx.pilots, fx.cov, k);
    benchmark::DoNotOptimize(work.d_star);
    k = (k + 1) % fx.pilots.K();
  }
}
BENCHMARK(BM_CoordinateUpdate)->Arg(1)->Arg(4);

void BM_RefreshState(benchmark::State& state) {
  const DetectorFixture fx(100, 4, 256, 64);
  mach::GammaState gs = mach::init_gamma_state(fx.pilots.K(), fx.cov, fx.noise_var,
                                               mach::GammaConstraint::nonnegative());
  gs.gamma.setConstant(0.1);
  for (auto _ : state) {
    mach::refresh_gamma_state(gs, fx.pilots, fx.cov);
    benchmark::DoNotOptimize(gs.cost);
  }
}
BENCHMARK(BM_RefreshState);

void BM_RunDetection(benchmark::State& state) {
  const DetectorFixture fx(32, 2, 64, 64);
  mach::DetectorConfig config;
  config.epochs = 2;
  config.noise_var = fx.noise_var;
  config.constraint = mach::GammaConstraint::nonnegative();
  config.rng_seed = 5;
  for (auto _ : state) {
    const mach::DetectionResult result = mach::run_detection(fx.pilots, fx.cov, config);
    benchmark::DoNotOptimize(result.gamma(0));
  }
  state.SetItemsProcessed(state.iterations() * 64 * 2);
}
BENCHMARK(BM_RunDetection);

}  // namespace
