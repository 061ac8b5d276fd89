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

#ifndef MACH_BLOCK_GRID_HPP
#define MACH_BLOCK_GRID_HPP

namespace mach {

// Flattened (time, frequency) index of one resource element, 1-based.
struct TimeFreq {
  int t;  // OFDM symbol index in [1, T]
  int f;  // subcarrier index in [1, F]
};

// A T x F time-frequency resource block, flattened into l in [1, L] with
// the time index cycling fastest:
//
//   t(l) = ((l - 1) mod T) + 1,   f(l) = floor((l - 1) / T) + 1.
//
// The physical bandwidth spanned by the block is F * subcarrier spacing;
// that bandwidth is also the tap sampling rate of the discrete channel
// impulse response.
class BlockGrid {
 public:
  BlockGrid(int T, int F, double subcarrier_spacing_hz);

  int T() const noexcept { return T_; }
  int F() const noexcept { return F_; }
  int L() const noexcept { return T_ * F_; }
  double subcarrier_spacing_hz() const noexcept { return spacing_hz_; }
  double bandwidth_hz() const noexcept { return spacing_hz_ * F_; }

  // Flattened index -> (t, f); throws std::out_of_range unless 1 <= l <= L.
  TimeFreq map_index(int l) const;
  int time_of(int l) const { return map_index(l).t; }
  int freq_of(int l) const { return map_index(l).f; }

  // Inverse map; throws std::out_of_range unless 1 <= t <= T, 1 <= f <= F.
  int index_of(int t, int f) const;

 private:
  int T_;
  int F_;
  double spacing_hz_;
};

}  // namespace mach

#endif  // MACH_BLOCK_GRID_HPP
