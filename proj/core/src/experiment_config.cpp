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

#include "mach/experiment_config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mach/errors.hpp"

namespace mach {

namespace {

using nlohmann::json;

// Strict section reader: every key must be consumed exactly once, anything
// left over is an error naming the full path.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& require(const std::string& key) {
    if (!node_.contains(key)) throw ConfigError(path_ + "." + key, "missing required key");
    seen_.insert(key);
    return node_.at(key);
  }

  const json* optional(const std::string& key) {
    if (!node_.contains(key)) return nullptr;
    seen_.insert(key);
    return &node_.at(key);
  }

  Section child(const std::string& key) { return Section(require(key), path_ + "." + key); }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(path_ + "." + it.key(), "unknown key");
      }
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  return v.get<int>();
}

long as_long(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  return v.get<long>();
}

std::uint64_t as_u64(const json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    throw ConfigError(path, "must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "must be a string");
  return v.get<std::string>();
}

GridSection parse_grid(Section sec) {
  GridSection grid;
  grid.T = as_int(sec.require("T"), sec.path() + ".T");
  grid.F = as_int(sec.require("F"), sec.path() + ".F");
  grid.subcarrier_spacing_hz =
      as_number(sec.require("subcarrier_spacing_hz"), sec.path() + ".subcarrier_spacing_hz");
  sec.finish();
  return grid;
}

ChannelSection parse_channel(Section sec, const std::string& base_dir) {
  ChannelSection ch;
  const std::string pdp = as_string(sec.require("pdp_file"), sec.path() + ".pdp_file");
  std::filesystem::path p(pdp);
  ch.pdp_file = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  ch.carrier_freq_hz = as_number(sec.require("carrier_freq_hz"), sec.path() + ".carrier_freq_hz");
  ch.speed_kmh = as_number(sec.require("speed_kmh"), sec.path() + ".speed_kmh");
  if (const json* v = sec.optional("n_sinusoids")) {
    ch.n_sinusoids = as_int(*v, sec.path() + ".n_sinusoids");
  }
  if (const json* v = sec.optional("l_min")) ch.l_min = as_int(*v, sec.path() + ".l_min");
  if (const json* v = sec.optional("rolloff")) {
    ch.rolloff = as_number(*v, sec.path() + ".rolloff");
  }
  if (const json* v = sec.optional("pulse")) {
    const std::string s = as_string(*v, sec.path() + ".pulse");
    if (s == "root-raised-cosine") {
      ch.pulse = PulseKind::kRootRaisedCosine;
    } else if (s == "sinc") {
      ch.pulse = PulseKind::kSinc;
    } else {
      throw ConfigError(sec.path() + ".pulse",
                        "expected \"root-raised-cosine\" or \"sinc\", got \"" + s + "\"");
    }
  }
  if (const json* v = sec.optional("symbol_time_scale")) {
    const std::string s = as_string(*v, sec.path() + ".symbol_time_scale");
    if (s == "sample-period") {
      ch.symbol_time_scale = SymbolTimeScale::kSamplePeriod;
    } else if (s == "ofdm-symbol") {
      ch.symbol_time_scale = SymbolTimeScale::kOfdmSymbol;
    } else {
      throw ConfigError(sec.path() + ".symbol_time_scale",
                        "expected \"sample-period\" or \"ofdm-symbol\", got \"" + s + "\"");
    }
  }
  sec.finish();
  return ch;
}

PopulationSection parse_population(Section sec) {
  PopulationSection pop;
  pop.K = as_int(sec.require("K"), sec.path() + ".K");
  pop.K_act = as_int(sec.require("K_act"), sec.path() + ".K_act");
  pop.M = as_int(sec.require("M"), sec.path() + ".M");
  if (const json* v = sec.optional("noise_var")) {
    pop.noise_var = as_number(*v, sec.path() + ".noise_var");
  }
  bool explicit_pc = false;
  if (const json* v = sec.optional("power_control")) {
    const std::string s = as_string(*v, sec.path() + ".power_control");
    if (s == "ideal-inversion") {
      pop.power_control = PowerControl::kIdealInversion;
    } else if (s == "explicit") {
      pop.power_control = PowerControl::kExplicit;
      explicit_pc = true;
    } else {
      throw ConfigError(sec.path() + ".power_control",
                        "expected \"ideal-inversion\" or \"explicit\", got \"" + s + "\"");
    }
  }
  if (const json* v = sec.optional("beta")) {
    const std::string path = sec.path() + ".beta";
    if (!explicit_pc) {
      throw ConfigError(path, "only allowed with power_control = \"explicit\"");
    }
    if (v->is_number()) {
      pop.beta = {v->get<double>()};
    } else if (v->is_array()) {
      for (const auto& e : *v) pop.beta.push_back(as_number(e, path));
    } else {
      throw ConfigError(path, "must be a number or an array of numbers");
    }
  } else if (explicit_pc) {
    throw ConfigError(sec.path() + ".beta", "required with power_control = \"explicit\"");
  }
  sec.finish();
  return pop;
}

BasisSection parse_basis(Section sec) {
  BasisSection basis;
  const json& models = sec.require("models");
  const std::string models_path = sec.path() + ".models";
  if (!models.is_array() || models.empty()) {
    throw ConfigError(models_path, "must be a non-empty array");
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    Section entry(models[i], models_path + "[" + std::to_string(i) + "]");
    const std::string name = as_string(entry.require("model"), entry.path() + ".model");
    int N = 0;
    if (const json* v = entry.optional("N")) N = as_int(*v, entry.path() + ".N");
    entry.finish();
    try {
      basis.models.push_back(parse_basis_spec(name, N));
    } catch (const ConfigError& e) {
      throw ConfigError(entry.path(), e.what());
    }
  }
  if (const json* v = sec.optional("train_pairs")) {
    basis.train_pairs = as_long(*v, sec.path() + ".train_pairs");
  }
  if (const json* v = sec.optional("train_seed")) {
    basis.train_seed = as_u64(*v, sec.path() + ".train_seed");
  }
  if (const json* v = sec.optional("on_sample")) {
    basis.on_sample = as_bool(*v, sec.path() + ".on_sample");
  }
  sec.finish();
  return basis;
}

DetectorSection parse_detector(Section sec) {
  DetectorSection det;
  if (const json* v = sec.optional("epochs")) det.epochs = as_int(*v, sec.path() + ".epochs");
  if (const json* v = sec.optional("constraint")) {
    const std::string s = as_string(*v, sec.path() + ".constraint");
    if (s == "nonnegative") {
      det.constraint = ConstraintKind::kNonnegative;
    } else if (s == "box") {
      det.constraint = ConstraintKind::kBox;
    } else {
      throw ConfigError(sec.path() + ".constraint",
                        "expected \"nonnegative\" or \"box\", got \"" + s + "\"");
    }
  }
  if (const json* v = sec.optional("d_max_factor")) {
    det.d_max_factor = as_number(*v, sec.path() + ".d_max_factor");
  }
  if (const json* v = sec.optional("root_mode")) {
    const std::string s = as_string(*v, sec.path() + ".root_mode");
    if (s == "companion") {
      det.root_mode = RootMode::kCompanion;
    } else if (s == "bracketing") {
      det.root_mode = RootMode::kBracketing;
    } else {
      throw ConfigError(sec.path() + ".root_mode",
                        "expected \"companion\" or \"bracketing\", got \"" + s + "\"");
    }
  }
  sec.finish();
  return det;
}

}  // namespace

Eigen::VectorXd PopulationSection::beta_vector() const {
  if (power_control == PowerControl::kIdealInversion) {
    return Eigen::VectorXd::Ones(K);
  }
  if (beta.size() == 1) return Eigen::VectorXd::Constant(K, beta[0]);
  Eigen::VectorXd b(K);
  for (int k = 0; k < K; ++k) b(k) = beta[static_cast<std::size_t>(k)];
  return b;
}

BasisSpec parse_basis_spec(const std::string& model, int N) {
  BasisSpec spec;
  if (model == "pca") {
    spec.model = BasisModel::kPca;
    if (N < 1) throw ConfigError("N", "pca requires N >= 1");
    spec.N = N;
    return spec;
  }
  if (N != 0) {
    throw ConfigError("N", "order is fixed by the model \"" + model + "\"; remove N");
  }
  if (model == "block-fading") {
    spec.model = BasisModel::kBlockFading;
  } else if (model == "bwl" || model == "bwl-freq") {
    spec.model = BasisModel::kBwl;
    spec.time_aware = model == "bwl";
  } else if (model == "dft" || model == "dft-freq") {
    spec.model = BasisModel::kDft;
    spec.time_aware = model == "dft";
  } else {
    throw ConfigError("model", "unknown model \"" + model +
                                   "\"; expected pca, block-fading, bwl, bwl-freq, dft, or "
                                   "dft-freq");
  }
  return spec;
}

void validate_config(const ExperimentConfig& config) {
  const auto positive = [](int v, const std::string& field) {
    if (v < 1) throw ConfigError(field, "must be at least 1, got " + std::to_string(v));
  };
  positive(config.grid.T, "grid.T");
  positive(config.grid.F, "grid.F");
  if (!(config.grid.subcarrier_spacing_hz > 0.0)) {
    throw ConfigError("grid.subcarrier_spacing_hz", "must be positive");
  }

  if (!(config.channel.carrier_freq_hz > 0.0)) {
    throw ConfigError("channel.carrier_freq_hz", "must be positive");
  }
  if (config.channel.speed_kmh < 0.0) {
    throw ConfigError("channel.speed_kmh", "must be nonnegative");
  }
  positive(config.channel.n_sinusoids, "channel.n_sinusoids");
  if (config.channel.l_min >= 0) {
    throw ConfigError("channel.l_min", "must be negative (acausal pulse skirt)");
  }
  if (!(config.channel.rolloff > 0.0) || config.channel.rolloff > 1.0) {
    throw ConfigError("channel.rolloff", "must lie in (0, 1]");
  }

  positive(config.population.K, "population.K");
  positive(config.population.M, "population.M");
  if (config.population.K_act < 0 || config.population.K_act > config.population.K) {
    throw ConfigError("population.K_act", "must lie in [0, K]");
  }
  if (!(config.population.noise_var > 0.0)) {
    throw ConfigError("population.noise_var", "must be positive");
  }
  if (config.population.power_control == PowerControl::kExplicit) {
    const std::size_t n = config.population.beta.size();
    if (n != 1 && n != static_cast<std::size_t>(config.population.K)) {
      throw ConfigError("population.beta", "needs 1 or K entries, got " + std::to_string(n));
    }
    for (double b : config.population.beta) {
      if (!(b > 0.0)) throw ConfigError("population.beta", "entries must be positive");
    }
  }

  if (config.basis.models.empty()) throw ConfigError("basis.models", "must not be empty");
  const int L = config.grid.T * config.grid.F;
  for (const BasisSpec& spec : config.basis.models) {
    if (spec.model == BasisModel::kPca && spec.N > L) {
      throw ConfigError("basis.models", "pca order " + std::to_string(spec.N) +
                                            " exceeds L = " + std::to_string(L));
    }
  }
  if (config.basis.train_pairs < 1) throw ConfigError("basis.train_pairs", "must be at least 1");

  positive(config.detector.epochs, "detector.epochs");
  if (!(config.detector.d_max_factor > 0.0)) {
    throw ConfigError("detector.d_max_factor", "must be positive");
  }

  positive(config.trials, "trials");
  positive(config.threads, "threads");
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::string& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  Section top(root, "config");

  ExperimentConfig config;
  config.grid = parse_grid(top.child("grid"));
  config.channel = parse_channel(top.child("channel"), base_dir);
  config.population = parse_population(top.child("population"));
  config.basis = parse_basis(top.child("basis"));
  if (top.has("detector")) {
    config.detector = parse_detector(top.child("detector"));
  }
  config.trials = as_int(top.require("trials"), "config.trials");
  config.seed = as_u64(top.require("seed"), "config.seed");
  if (const json* v = top.optional("redraw_pilots")) {
    config.redraw_pilots = as_bool(*v, "config.redraw_pilots");
  }
  if (const json* v = top.optional("threads")) {
    config.threads = as_int(*v, "config.threads");
  }
  top.finish();

  validate_config(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(filename, "cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  const std::string base_dir = std::filesystem::path(filename).parent_path().string();
  return parse_experiment_config(text.str(), base_dir.empty() ? "." : base_dir);
}

}  // namespace mach
