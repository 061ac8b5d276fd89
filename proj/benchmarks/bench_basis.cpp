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

#include "mach/basis.hpp"
#include "mach/block_grid.hpp"
#include "mach/rng.hpp"

namespace {

mach::ChannelTensor random_tensor(int L, int cols, std::uint64_t seed) {
  mach::ChannelTensor tensor;
  tensor.K = cols;
  tensor.M = 1;
  tensor.h.resize(L, cols);
  mach::Rng rng(seed);
  for (int c = 0; c < cols; ++c) {
    for (int l = 0; l < L; ++l) tensor.h(l, c) = rng.cnormal();
  }
  return tensor;
}

void BM_SampleCovariance(benchmark::State& state) {
  const mach::ChannelTensor tensor = random_tensor(100, static_cast<int>(state.range(0)), 5);
  for (auto _ : state) {
    const mach::CovarianceEstimate cov = mach::sample_covariance(tensor);
    benchmark::DoNotOptimize(cov.eigvals(0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleCovariance)->Arg(500)->Arg(2000);

void BM_PcaBasis(benchmark::State& state) {
  const mach::ChannelTensor tensor = random_tensor(100, 1000, 6);
  const mach::CovarianceEstimate cov = mach::sample_covariance(tensor);
  for (auto _ : state) {
    const mach::Basis basis = mach::pca_basis(cov, 4);
    benchmark::DoNotOptimize(basis.G(0, 0));
  }
}
BENCHMARK(BM_PcaBasis);

void BM_LsProject(benchmark::State& state) {
  const mach::BlockGrid grid(10, 10, 5000.0);
  const mach::Basis basis = mach::dft_basis(grid);
  const mach::LsProjector projector(basis);
  const mach::ChannelTensor tensor = random_tensor(grid.L(), 256, 7);
  int c = 0;
  for (auto _ : state) {
    const mach::Projection proj = projector.project(tensor.h.col(c));
    benchmark::DoNotOptimize(proj.residual);
    c = (c + 1) % 256;
  }
}
BENCHMARK(BM_LsProject);

void BM_ApproxErrorKappa(benchmark::State& state) {
  const mach::ChannelTensor tensor = random_tensor(100, 1000, 8);
  const mach::CovarianceEstimate cov = mach::sample_covariance(tensor);
  const mach::Basis basis = mach::pca_basis(cov, 4);
  for (auto _ : state) {
    const mach::ApproxReport report = mach::approx_error_kappa(tensor, basis);
    benchmark::DoNotOptimize(report.kappa);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ApproxErrorKappa);

}  // namespace
