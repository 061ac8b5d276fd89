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

#include "mach/pdp.hpp"

#include <fstream>
#include <sstream>

#include "mach/errors.hpp"

namespace mach {

PowerDelayProfile PowerDelayProfile::from_paths(std::vector<PdpPath> paths,
                                                const std::string& where) {
  if (paths.empty()) throw ConfigError(where, "profile has no paths");
  double total = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    const std::string at = where + " path " + std::to_string(i + 1);
    if (!(p.delay_s >= 0.0)) throw ConfigError(at, "delay must be >= 0");
    if (!(p.power > 0.0)) throw ConfigError(at, "power must be > 0");
    if (i > 0 && !(p.delay_s > paths[i - 1].delay_s)) {
      throw ConfigError(at, "delays must be strictly ascending");
    }
    total += p.power;
  }
  for (auto& p : paths) p.power /= total;

  PowerDelayProfile pdp;
  pdp.paths_ = std::move(paths);
  return pdp;
}

PowerDelayProfile PowerDelayProfile::load(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(filename, "cannot open power delay profile file");

  std::vector<PdpPath> paths;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double delay_us = 0.0;
    double power = 0.0;
    if (!(ss >> delay_us)) continue;  // blank or comment-only line
    if (!(ss >> power)) {
      throw ConfigError(filename + ":" + std::to_string(lineno),
                        "expected 'delay_us power_linear'");
    }
    std::string extra;
    if (ss >> extra) {
      throw ConfigError(filename + ":" + std::to_string(lineno),
                        "trailing token '" + extra + "'");
    }
    paths.push_back(PdpPath{delay_us * 1e-6, power});
  }
  return from_paths(std::move(paths), filename);
}

}  // namespace mach
