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

#include "mach/block_grid.hpp"

#include <stdexcept>
#include <string>

#include "mach/errors.hpp"

namespace mach {

BlockGrid::BlockGrid(int T, int F, double subcarrier_spacing_hz)
    : T_(T), F_(F), spacing_hz_(subcarrier_spacing_hz) {
  if (T < 1) throw ConfigError("grid.T", "must be >= 1, got " + std::to_string(T));
  if (F < 1) throw ConfigError("grid.F", "must be >= 1, got " + std::to_string(F));
  if (!(subcarrier_spacing_hz > 0.0)) {
    throw ConfigError("grid.subcarrier_spacing_hz", "must be > 0");
  }
}

TimeFreq BlockGrid::map_index(int l) const {
  if (l < 1 || l > L()) {
    throw std::out_of_range("resource index l=" + std::to_string(l) +
                            " outside [1, " + std::to_string(L()) + "]");
  }
  const int z = l - 1;
  return TimeFreq{z % T_ + 1, z / T_ + 1};
}

int BlockGrid::index_of(int t, int f) const {
  if (t < 1 || t > T_ || f < 1 || f > F_) {
    throw std::out_of_range("(t, f)=(" + std::to_string(t) + ", " + std::to_string(f) +
                            ") outside [1, " + std::to_string(T_) + "] x [1, " +
                            std::to_string(F_) + "]");
  }
  return (t - 1) + (f - 1) * T_ + 1;
}

}  // namespace mach
