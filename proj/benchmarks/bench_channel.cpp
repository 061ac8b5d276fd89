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

#include "mach/channel_sim.hpp"
#include "mach/pdp.hpp"
#include "mach/pulse.hpp"
#include "mach/rng.hpp"

namespace {

struct ChannelFixture {
  mach::BlockGrid grid{10, 10, 5000.0};
  mach::PowerDelayProfile pdp =
      mach::PowerDelayProfile::from_paths({{0.0, 0.5}, {1.0e-5, 0.3}, {2.5e-5, 0.2}});
  mach::PulseShape pulse = mach::PulseShape::for_profile(mach::PulseKind::kRootRaisedCosine,
                                                         0.22, -3, pdp, grid.bandwidth_hz());
  mach::DopplerConfig doppler = mach::DopplerConfig::make(3.5e9, 120.0 / 3.6, 20);
};

void BM_GenerateChannels(benchmark::State& state) {
  const ChannelFixture fx;
  const int pairs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const mach::ChannelTensor tensor =
        mach::generate_channels(fx.grid, fx.pdp, fx.pulse, fx.doppler, pairs, 1, 99,
                                mach::SymbolTimeScale::kSamplePeriod, 1);
    benchmark::DoNotOptimize(tensor.h(0, 0));
  }
  state.SetItemsProcessed(state.iterations() * pairs * fx.grid.L());
}
BENCHMARK(BM_GenerateChannels)->Arg(50)->Arg(400);

void BM_ImpulseResponse(benchmark::State& state) {
  const ChannelFixture fx;
  mach::Rng rng(7);
  std::vector<mach::PathState> states;
  states.reserve(fx.pdp.size());
  for (std::size_t p = 0; p < fx.pdp.size(); ++p) {
    states.push_back(mach::PathState::draw(rng, fx.doppler.n_sin));
  }
  int t = 1;
  for (auto _ : state) {
    const Eigen::VectorXcd taps =
        mach::discrete_impulse_response(fx.grid, t, fx.pdp, fx.pulse, states, fx.doppler);
    benchmark::DoNotOptimize(taps(0));
    t = t % fx.grid.T() + 1;
  }
}
BENCHMARK(BM_ImpulseResponse);

void BM_BlockFrequencyResponse(benchmark::State& state) {
  const ChannelFixture fx;
  mach::Rng rng(11);
  std::vector<Eigen::VectorXcd> per_symbol(static_cast<std::size_t>(fx.grid.T()));
  for (auto& taps : per_symbol) {
    taps.resize(fx.pulse.tap_count());
    for (Eigen::Index i = 0; i < taps.size(); ++i) taps(i) = rng.cnormal();
  }
  for (auto _ : state) {
    const Eigen::VectorXcd h = mach::block_frequency_response(fx.grid, per_symbol);
    benchmark::DoNotOptimize(h(0));
  }
}
BENCHMARK(BM_BlockFrequencyResponse);

}  // namespace

BENCHMARK_MAIN();
