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

#ifndef MACH_PDP_HPP
#define MACH_PDP_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace mach {

struct PdpPath {
  double delay_s;  // path delay in seconds, >= 0
  double power;    // linear average power, > 0
};

// A tapped-delay-line power delay profile. Delays are strictly ascending
// and powers are normalized to sum to 1 at construction time.
//
// File format (one path per line, '#' starts a comment):
//
//   delay_us  power_linear
class PowerDelayProfile {
 public:
  // `where` names the data source in error messages (config field or file).
  static PowerDelayProfile from_paths(std::vector<PdpPath> paths,
                                      const std::string& where = "pdp");
  static PowerDelayProfile load(const std::string& filename);

  const std::vector<PdpPath>& paths() const noexcept { return paths_; }
  std::size_t size() const noexcept { return paths_.size(); }

  // Largest path delay in seconds (the delay spread; the first path is
  // allowed to sit at any delay >= 0, but profiles conventionally start
  // at 0).
  double max_excess_delay_s() const noexcept { return paths_.back().delay_s; }

 private:
  PowerDelayProfile() = default;
  std::vector<PdpPath> paths_;
};

}  // namespace mach

#endif  // MACH_PDP_HPP
