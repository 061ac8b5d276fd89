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

#include "mach/channel_sim.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mach/errors.hpp"

namespace mach {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Twiddles of the P-point DFT at the F block subcarriers (periodic in f
// with period P when F > P): twiddle(j, f) = exp(-j 2 pi j f / P), both
// indices 0-based.
Eigen::MatrixXcd dft_twiddles(Eigen::Index P, int F) {
  Eigen::MatrixXcd twiddle(P, F);
  for (Eigen::Index j = 0; j < P; ++j) {
    for (int f = 0; f < F; ++f) {
      twiddle(j, f) =
          std::polar(1.0, -2.0 * kPi * static_cast<double>(j) * f / static_cast<double>(P));
    }
  }
  return twiddle;
}

// Symbol index (1-based) -> absolute time in seconds.
double symbol_time(int t_sym, const BlockGrid& grid, SymbolTimeScale scale) {
  const double step = scale == SymbolTimeScale::kSamplePeriod
                          ? 1.0 / grid.bandwidth_hz()
                          : static_cast<double>(grid.F()) / grid.bandwidth_hz();
  return (t_sym - 1) * step;
}

}  // namespace

double doppler_omega(double carrier_hz, double speed_mps) {
  return 2.0 * kPi * carrier_hz * speed_mps / kSpeedOfLight;
}

DopplerConfig DopplerConfig::make(double carrier_hz, double speed_mps, int n_sin) {
  if (!(carrier_hz > 0.0)) throw ConfigError("channel.carrier_freq_hz", "must be > 0");
  if (speed_mps < 0.0) throw ConfigError("channel.speed_kmh", "must be >= 0");
  if (n_sin < 1) throw ConfigError("channel.n_sin", "must be >= 1");
  return DopplerConfig{carrier_hz, speed_mps, n_sin, doppler_omega(carrier_hz, speed_mps)};
}

PathState PathState::draw(Rng& rng, int n_sin) {
  PathState st;
  st.alpha.resize(static_cast<std::size_t>(n_sin));
  st.psi.resize(static_cast<std::size_t>(n_sin));
  st.zeta.resize(static_cast<std::size_t>(n_sin));
  for (int n = 0; n < n_sin; ++n) {
    // Draw order is part of the reproducibility contract: psi_n then
    // zeta_n, for n = 1..N.
    st.psi[static_cast<std::size_t>(n)] = rng.uniform(-kPi, kPi);
    st.zeta[static_cast<std::size_t>(n)] = rng.uniform(-kPi, kPi);
    st.alpha[static_cast<std::size_t>(n)] =
        (2.0 * kPi * (n + 1) + st.zeta[static_cast<std::size_t>(n)]) / n_sin;
  }
  return st;
}

std::complex<double> path_gain_sos(double t_s, const PathState& state, double omega_d) {
  const std::size_t n = state.alpha.size();
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::polar(1.0, omega_d * t_s * std::cos(state.alpha[i]) + state.psi[i]);
  }
  return acc / std::sqrt(static_cast<double>(n));
}

Eigen::MatrixXd pulse_weight_matrix(const PowerDelayProfile& pdp, const PulseShape& pulse,
                                    double bandwidth_hz) {
  const auto n_paths = static_cast<Eigen::Index>(pdp.size());
  const auto P = static_cast<Eigen::Index>(pulse.tap_count());
  Eigen::MatrixXd w(n_paths, P);
  for (Eigen::Index i = 0; i < n_paths; ++i) {
    const double frac = bandwidth_hz * pdp.paths()[static_cast<std::size_t>(i)].delay_s;
    for (Eigen::Index j = 0; j < P; ++j) {
      w(i, j) = pulse.sample(static_cast<double>(pulse.l_min() + j) - frac);
    }
  }
  return w;
}

Eigen::VectorXcd discrete_impulse_response(const BlockGrid& grid, int t_sym,
                                           const PowerDelayProfile& pdp,
                                           const PulseShape& pulse,
                                           const std::vector<PathState>& states,
                                           const DopplerConfig& dop, SymbolTimeScale scale) {
  if (t_sym < 1 || t_sym > grid.T()) {
    throw std::out_of_range("symbol index t=" + std::to_string(t_sym) + " outside [1, " +
                            std::to_string(grid.T()) + "]");
  }
  if (states.size() != pdp.size()) {
    throw std::invalid_argument("need one PathState per profile path (" +
                                std::to_string(pdp.size()) + "), got " +
                                std::to_string(states.size()));
  }
  const Eigen::MatrixXd w = pulse_weight_matrix(pdp, pulse, grid.bandwidth_hz());
  const double t_s = symbol_time(t_sym, grid, scale);

  Eigen::VectorXcd taps = Eigen::VectorXcd::Zero(pulse.tap_count());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::complex<double> gain =
        std::sqrt(pdp.paths()[i].power) * path_gain_sos(t_s, states[i], dop.omega_d);
    taps += gain * w.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return taps;
}

Eigen::VectorXcd dft_order_taps(const Eigen::VectorXcd& taps, int l_min) {
  if (l_min >= 0) throw std::invalid_argument("l_min must be negative");
  const auto P = taps.size();
  const auto n_neg = static_cast<Eigen::Index>(-l_min);
  if (P < n_neg + 1) throw std::invalid_argument("tap vector shorter than lag window");

  Eigen::VectorXcd x(P);
  x.head(P - n_neg) = taps.tail(P - n_neg);  // lags 0 .. l_max
  x.tail(n_neg) = taps.head(n_neg);          // lags l_min .. -1
  return x;
}

Eigen::VectorXcd block_frequency_response(const BlockGrid& grid,
                                          const std::vector<Eigen::VectorXcd>& x_per_symbol) {
  if (static_cast<int>(x_per_symbol.size()) != grid.T()) {
    throw std::invalid_argument("need one tap vector per symbol");
  }
  const Eigen::Index P = x_per_symbol.front().size();
  for (const auto& x : x_per_symbol) {
    if (x.size() != P) throw std::invalid_argument("tap vectors must share length P");
  }
  if (P < 1) throw std::invalid_argument("empty tap vectors");

  const Eigen::MatrixXcd twiddle = dft_twiddles(P, grid.F());
  Eigen::VectorXcd h(grid.L());
  for (int t = 0; t < grid.T(); ++t) {
    const auto& x = x_per_symbol[static_cast<std::size_t>(t)];
    for (int f = 0; f < grid.F(); ++f) {
      std::complex<double> acc(0.0, 0.0);
      for (Eigen::Index j = 0; j < P; ++j) acc += x(j) * twiddle(j, f);
      h(t + f * grid.T()) = acc;  // l - 1 = (t-1) + (f-1) T for 1-based t, f
    }
  }
  return h;
}

namespace {

// Fills tensor columns for pair indices [begin, end); pair p = k + K*m.
// Every (k, m, path) triple re-derives its stream from `seed`, so the
// partition into ranges has no effect on the result.
void generate_pair_range(ChannelTensor& tensor, const BlockGrid& grid,
                         const PowerDelayProfile& pdp, const Eigen::MatrixXd& w, int l_min,
                         const DopplerConfig& dop, std::uint64_t seed, SymbolTimeScale scale,
                         long begin, long end) {
  const auto n_paths = static_cast<Eigen::Index>(pdp.size());
  const Eigen::Index P = w.cols();
  const auto n_neg = static_cast<Eigen::Index>(-l_min);
  const int T = grid.T();
  const int F = grid.F();

  Eigen::VectorXd sqrt_power(n_paths);
  for (Eigen::Index i = 0; i < n_paths; ++i) {
    sqrt_power(i) = std::sqrt(pdp.paths()[static_cast<std::size_t>(i)].power);
  }
  const Eigen::MatrixXcd twiddle = dft_twiddles(P, F);

  std::vector<PathState> states(static_cast<std::size_t>(n_paths));
  Eigen::VectorXcd taps(P), x(P);
  Eigen::MatrixXcd q(T, F);

  for (long p = begin; p < end; ++p) {
    const auto k = static_cast<std::uint64_t>(p % tensor.K);
    const auto m = static_cast<std::uint64_t>(p / tensor.K);
    for (Eigen::Index i = 0; i < n_paths; ++i) {
      Rng rng(derive_stream(seed, {k, m, static_cast<std::uint64_t>(i)}));
      states[static_cast<std::size_t>(i)] = PathState::draw(rng, dop.n_sin);
    }
    for (int t = 1; t <= T; ++t) {
      const double t_s = symbol_time(t, grid, scale);
      taps.setZero();
      for (Eigen::Index i = 0; i < n_paths; ++i) {
        const std::complex<double> gain =
            sqrt_power(i) * path_gain_sos(t_s, states[static_cast<std::size_t>(i)], dop.omega_d);
        taps += gain * w.row(i).transpose();
      }
      x.head(P - n_neg) = taps.tail(P - n_neg);  // lags 0 .. l_max
      x.tail(n_neg) = taps.head(n_neg);          // lags l_min .. -1
      for (int f = 0; f < F; ++f) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index j = 0; j < P; ++j) acc += x(j) * twiddle(j, f);
        q(t - 1, f) = acc;
      }
    }
    auto col = tensor.h.col(p);
    for (int f = 0; f < F; ++f) {
      for (int t = 0; t < T; ++t) col(t + f * T) = q(t, f);
    }
    if (!col.allFinite()) {
      throw NumericalError("channel-sim", "generate_channels",
                           "non-finite channel entry at pair k=" + std::to_string(k) +
                               ", m=" + std::to_string(m));
    }
  }
}

}  // namespace

ChannelTensor generate_channels(const BlockGrid& grid, const PowerDelayProfile& pdp,
                                const PulseShape& pulse, const DopplerConfig& dop, int K, int M,
                                std::uint64_t seed, SymbolTimeScale scale, int threads) {
  if (K < 1) throw ConfigError("population.K", "must be >= 1");
  if (M < 1) throw ConfigError("population.M", "must be >= 1");

  ChannelTensor tensor;
  tensor.K = K;
  tensor.M = M;
  tensor.h.resize(grid.L(), static_cast<long>(K) * M);

  const Eigen::MatrixXd w = pulse_weight_matrix(pdp, pulse, grid.bandwidth_hz());
  const long pairs = static_cast<long>(K) * M;

  int n_workers = threads;
  if (n_workers < 1) {
    n_workers = static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
  }
  n_workers = static_cast<int>(std::min<long>(n_workers, pairs));

  if (n_workers == 1) {
    generate_pair_range(tensor, grid, pdp, w, pulse.l_min(), dop, seed, scale, 0, pairs);
    return tensor;
  }

  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  const long chunk = (pairs + n_workers - 1) / n_workers;
  for (int t = 0; t < n_workers; ++t) {
    const long begin = t * chunk;
    const long end = std::min(pairs, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        generate_pair_range(tensor, grid, pdp, w, pulse.l_min(), dop, seed, scale, begin, end);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return tensor;
}

}  // namespace mach
