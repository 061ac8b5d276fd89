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
// Wide-sense-stationary uncorrelated-scattering multipath channels with
// Rayleigh path fading, simulated by a sum of sinusoids and sampled on an
// OFDM time-frequency resource block.
//
// Per path i the complex gain process is
//
//   q_i(t) = N^(-1/2) sum_{n=1..N} exp(j (w_d t cos(a_n) + psi_n)),
//   a_n = (2 pi n + zeta_n) / N,   psi_n, zeta_n iid uniform on [-pi, pi),
//
// which has unit power and the Clarke/Jakes autocorrelation J0(w_d tau).
// The per-symbol discrete impulse response collects all paths through the
// transmit pulse at tap lags l in [l_min, l_max] (sampled at the block
// bandwidth B), and the per-symbol frequency response is its DFT after
// reordering taps to [0..l_max, l_min..-1].

#ifndef MACH_CHANNEL_SIM_HPP
#define MACH_CHANNEL_SIM_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mach/block_grid.hpp"
#include "mach/pdp.hpp"
#include "mach/pulse.hpp"
#include "mach/rng.hpp"

namespace mach {

// Maximum Doppler angular frequency w_d = 2 pi f_c v / c in rad/s.
double doppler_omega(double carrier_hz, double speed_mps);

struct DopplerConfig {
  double carrier_hz = 0.0;
  double speed_mps = 0.0;
  int n_sin = 0;       // number of sinusoids N per path
  double omega_d = 0;  // rad/s, derived

  static DopplerConfig make(double carrier_hz, double speed_mps, int n_sin);
};

// Frozen randomness of one (user, antenna, path) fading process.
struct PathState {
  std::vector<double> alpha;  // arrival angles (2 pi n + zeta_n) / N
  std::vector<double> psi;    // sinusoid phases, uniform [-pi, pi)
  std::vector<double> zeta;   // angle jitter, uniform [-pi, pi)

  static PathState draw(Rng& rng, int n_sin);
};

// Complex path gain q_i(t) at absolute time t seconds.
std::complex<double> path_gain_sos(double t_s, const PathState& state, double omega_d);

// How symbol index maps to absolute time: consecutive symbols advance by
// one tap sample 1/B, or by one full OFDM symbol F/B.
enum class SymbolTimeScale {
  kSamplePeriod,
  kOfdmSymbol,
};

// Taps of the discrete impulse response at symbol t_sym (1-based), indexed
// l = l_min .. l_max (entry j holds lag l_min + j):
//
//   q_{t,l} = sum_i sqrt(c_i) q_i(t_s) p(l - B tau_i).
Eigen::VectorXcd discrete_impulse_response(const BlockGrid& grid, int t_sym,
                                           const PowerDelayProfile& pdp,
                                           const PulseShape& pulse,
                                           const std::vector<PathState>& states,
                                           const DopplerConfig& dop,
                                           SymbolTimeScale scale = SymbolTimeScale::kSamplePeriod);

// Pulse weights p(l - B tau_i); rows = paths, cols = lags l_min..l_max.
Eigen::MatrixXd pulse_weight_matrix(const PowerDelayProfile& pdp, const PulseShape& pulse,
                                    double bandwidth_hz);

// Reorders natural-lag taps [l_min..l_max] into DFT order
// [0..l_max, l_min..-1].
Eigen::VectorXcd dft_order_taps(const Eigen::VectorXcd& taps, int l_min);

// Per-symbol P-point DFT of the reordered taps, scattered onto the
// flattened resource block:
//
//   h_l = Q_{t_l, f_l},  Q_{t,f} = sum_{i in [P]} x_{t,i} e^{-j 2 pi (i-1)(f-1)/P}.
//
// x_per_symbol[t-1] must already be in DFT order and all symbols must have
// equal tap count P. Frequencies beyond P wrap periodically.
Eigen::VectorXcd block_frequency_response(const BlockGrid& grid,
                                          const std::vector<Eigen::VectorXcd>& x_per_symbol);

// L x K x M tensor of user channels, stored as an L x (K*M) matrix whose
// column k + K*m holds user k / antenna m.
struct ChannelTensor {
  Eigen::MatrixXcd h;
  int K = 0;
  int M = 0;

  int L() const { return static_cast<int>(h.rows()); }
  int pair_count() const { return K * M; }

  Eigen::MatrixXcd::ColXpr col(int k, int m) { return h.col(k + static_cast<long>(K) * m); }
  Eigen::MatrixXcd::ConstColXpr col(int k, int m) const {
    return h.col(k + static_cast<long>(K) * m);
  }
};

// Draws the full channel tensor. Each (k, m, path) triple consumes its own
// derived stream, so results are reproducible bit-for-bit for a given seed
// regardless of thread count, and enlarging K or M leaves existing entries
// unchanged.
ChannelTensor generate_channels(const BlockGrid& grid, const PowerDelayProfile& pdp,
                                const PulseShape& pulse, const DopplerConfig& dop, int K, int M,
                                std::uint64_t seed,
                                SymbolTimeScale scale = SymbolTimeScale::kSamplePeriod,
                                int threads = 1);

// Binary tensor file: magic "MACH1", uint32 L, K, M (little-endian), then
// L*K*M complex64 values (float32 re, im) with l fastest, then k, then m.
void write_channel_tensor(const std::string& filename, const ChannelTensor& tensor);
ChannelTensor read_channel_tensor(const std::string& filename);

}  // namespace mach

#endif  // MACH_CHANNEL_SIM_HPP
