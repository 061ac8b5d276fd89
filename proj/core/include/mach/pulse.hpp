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

#ifndef MACH_PULSE_HPP
#define MACH_PULSE_HPP

#include "mach/pdp.hpp"

namespace mach {

// Unit-energy root-raised-cosine pulse at unit symbol period,
//
//   p(t) = [sin(pi t (1-b)) + 4 b t cos(pi t (1+b))] / [pi t (1 - (4 b t)^2)]
//
// with the removable singularities at t = 0 and |t| = 1/(4b) replaced by
// their limits. Its autocorrelation is the raised-cosine pulse, so the
// sampled energy sum_l p(l - a)^2 is 1 for any fractional offset a (up to
// truncation of the tails).
double rrc_pulse(double t, double rolloff);

// Ideal bandlimited interpolation pulse sin(pi t)/(pi t). Unlike the RRC
// pulse this one is Nyquist: sampled at integer lags it is a Kronecker
// delta, which makes a single integer-aligned path exactly frequency flat.
double sinc_pulse(double t);

enum class PulseKind {
  kRootRaisedCosine,
  kSinc,
};

// A transmit pulse together with the lag window [l_min, l_max] over which
// the discrete channel impulse response keeps taps. l_min < 0 captures the
// acausal skirt of the pulse; l_max is sized so every path's main lobe and
// causal skirt fit:  l_max = ceil(B * tau_max) - l_min.
class PulseShape {
 public:
  PulseShape(PulseKind kind, double rolloff, int l_min, int l_max);

  // Builds the lag window from the profile's delay spread and the tap
  // sampling rate (block bandwidth) B.
  static PulseShape for_profile(PulseKind kind, double rolloff, int l_min,
                                const PowerDelayProfile& pdp, double bandwidth_hz);

  double sample(double t) const;

  PulseKind kind() const noexcept { return kind_; }
  double rolloff() const noexcept { return rolloff_; }
  int l_min() const noexcept { return l_min_; }
  int l_max() const noexcept { return l_max_; }
  int tap_count() const noexcept { return l_max_ - l_min_ + 1; }  // P

 private:
  PulseKind kind_;
  double rolloff_;
  int l_min_;
  int l_max_;
};

}  // namespace mach

#endif  // MACH_PULSE_HPP
