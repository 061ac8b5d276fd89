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
// Experiment configuration: a strict JSON file with nested sections
// mirroring the structs below. Unknown keys anywhere are rejected with the
// offending path named; so are type mismatches and out-of-range values.
//
//   {
//     "grid":       {"T": 10, "F": 10, "subcarrier_spacing_hz": 5000.0},
//     "channel":    {"pdp_file": "hilly_terrain.pdp",
//                    "carrier_freq_hz": 3.5e9, "speed_kmh": 120.0,
//                    "n_sinusoids": 20, "l_min": -3, "rolloff": 0.22,
//                    "pulse": "root-raised-cosine",
//                    "symbol_time_scale": "sample-period"},
//     "population": {"K": 256, "K_act": 25, "M": 64, "noise_var": 1.0,
//                    "power_control": "ideal-inversion"},
//     "basis":      {"models": [{"model": "pca", "N": 4},
//                               {"model": "block-fading"},
//                               {"model": "bwl"}, {"model": "dft"}],
//                    "train_pairs": 4000, "train_seed": 7,
//                    "on_sample": false},
//     "detector":   {"epochs": 10, "constraint": "box",
//                    "d_max_factor": 1000.0, "root_mode": "companion"},
//     "trials": 10, "seed": 1, "redraw_pilots": false, "threads": 1
//   }
//
// `pdp_file` is resolved relative to the directory containing the config
// file. `power_control: "explicit"` additionally takes "beta": scalar or
// per-user array of transmit powers; "ideal-inversion" fixes beta_k = 1.

#ifndef MACH_EXPERIMENT_CONFIG_HPP
#define MACH_EXPERIMENT_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mach/basis.hpp"
#include "mach/channel_sim.hpp"
#include "mach/detector.hpp"

namespace mach {

struct GridSection {
  int T = 10;
  int F = 10;
  double subcarrier_spacing_hz = 5000.0;
};

struct ChannelSection {
  std::string pdp_file;  // resolved path
  double carrier_freq_hz = 3.5e9;
  double speed_kmh = 120.0;
  int n_sinusoids = 20;
  int l_min = -3;
  double rolloff = 0.22;
  PulseKind pulse = PulseKind::kRootRaisedCosine;
  SymbolTimeScale symbol_time_scale = SymbolTimeScale::kSamplePeriod;

  double speed_mps() const { return speed_kmh / 3.6; }
};

enum class PowerControl : unsigned char {
  kIdealInversion,  // beta_k = 1 for all users
  kExplicit,        // beta from config, scalar broadcast or per-user
};

struct PopulationSection {
  int K = 1;
  int K_act = 0;
  int M = 1;
  double noise_var = 1.0;
  PowerControl power_control = PowerControl::kIdealInversion;
  std::vector<double> beta;  // used when kExplicit; size 1 or K

  // Per-user transmit powers after broadcast.
  Eigen::VectorXd beta_vector() const;
};

struct BasisSpec {
  BasisModel model = BasisModel::kPca;
  bool time_aware = true;  // false for the *-freq variants
  int N = 0;               // requested order; pca only, 0 elsewhere
};

struct BasisSection {
  std::vector<BasisSpec> models;
  long train_pairs = 4000;       // training vectors for the sample covariance
  std::uint64_t train_seed = 1;  // decoupled from the experiment seed
  bool on_sample = false;        // evaluate kappa on the training tensor itself
};

struct DetectorSection {
  int epochs = 10;
  ConstraintKind constraint = ConstraintKind::kNonnegative;
  double d_max_factor = 1e3;
  RootMode root_mode = RootMode::kCompanion;
};

struct ExperimentConfig {
  GridSection grid;
  ChannelSection channel;
  PopulationSection population;
  BasisSection basis;
  DetectorSection detector;
  int trials = 1;
  std::uint64_t seed = 1;
  bool redraw_pilots = false;  // default: pilots pre-assigned once per experiment
  int threads = 1;
};

// Parses and validates; throws ConfigError naming the offending field.
ExperimentConfig load_experiment_config(const std::string& filename);

// Parses from an in-memory JSON string; `base_dir` anchors pdp_file.
ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir);

// Cross-field validation (counts >= 1, K_act <= K, noise_var > 0, ...).
void validate_config(const ExperimentConfig& config);

// "pca" -> kPca etc.; throws ConfigError for unknown names.
BasisSpec parse_basis_spec(const std::string& model, int N);

}  // namespace mach

#endif  // MACH_EXPERIMENT_CONFIG_HPP
