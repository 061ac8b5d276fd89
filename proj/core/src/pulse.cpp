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

#include "mach/pulse.hpp"

#include <cmath>
#include <string>

#include "mach/errors.hpp"

namespace mach {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}  // namespace

double rrc_pulse(double t, double rolloff) {
  const double b = rolloff;
  if (std::abs(t) < 1e-9) {
    return 1.0 - b + 4.0 * b / kPi;
  }
  const double den2 = 1.0 - 16.0 * b * b * t * t;  // 1 - (4 b t)^2
  if (std::abs(den2) < 1e-9) {
    // Limit at |t| = 1/(4b); both branch points share the same value.
    const double s = std::sin(kPi / (4.0 * b));
    const double c = std::cos(kPi / (4.0 * b));
    return (b / std::sqrt(2.0)) *
           ((1.0 + 2.0 / kPi) * s + (1.0 - 2.0 / kPi) * c);
  }
  return (std::sin(kPi * t * (1.0 - b)) + 4.0 * b * t * std::cos(kPi * t * (1.0 + b))) /
         (kPi * t * den2);
}

double sinc_pulse(double t) {
  if (std::abs(t) < 1e-9) return 1.0;
  return std::sin(kPi * t) / (kPi * t);
}

PulseShape::PulseShape(PulseKind kind, double rolloff, int l_min, int l_max)
    : kind_(kind), rolloff_(rolloff), l_min_(l_min), l_max_(l_max) {
  if (!(rolloff > 0.0) || rolloff > 1.0) {
    throw ConfigError("channel.rolloff", "must be in (0, 1], got " + std::to_string(rolloff));
  }
  if (l_min >= 0) {
    throw ConfigError("channel.l_min",
                      "must be a negative integer, got " + std::to_string(l_min));
  }
  if (l_max < l_min) {
    throw ConfigError("channel.l_max", "lag window is empty");
  }
}

PulseShape PulseShape::for_profile(PulseKind kind, double rolloff, int l_min,
                                   const PowerDelayProfile& pdp, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw ConfigError("grid.subcarrier_spacing_hz", "bandwidth must be > 0");
  }
  const int l_max =
      static_cast<int>(std::ceil(bandwidth_hz * pdp.max_excess_delay_s())) - l_min;
  return PulseShape(kind, rolloff, l_min, l_max);
}

double PulseShape::sample(double t) const {
  switch (kind_) {
    case PulseKind::kRootRaisedCosine:
      return rrc_pulse(t, rolloff_);
    case PulseKind::kSinc:
      return sinc_pulse(t);
  }
  return 0.0;  // unreachable
}

}  // namespace mach
