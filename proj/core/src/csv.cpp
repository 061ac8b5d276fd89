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

#include "mach/csv.hpp"

#include <cstdio>
#include <fstream>

#include "mach/errors.hpp"

namespace mach {

namespace {
std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError(path, "cannot open for writing");
  return out;
}
}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_kappa_csv(const std::string& path, const std::vector<KappaRow>& rows) {
  std::ofstream out = open_csv(path);
  out << "model,N,kappa,epsilon\n";
  for (const KappaRow& row : rows) {
    out << row.model_id << ',' << row.N << ',' << format_double(row.kappa) << ','
        << format_double(row.epsilon) << '\n';
  }
  if (!out) throw ConfigError(path, "write failed");
}

void write_detection_csv(const std::string& path, const std::vector<ModelCurve>& curves) {
  std::ofstream out = open_csv(path);
  out << "model,threshold,p_md,p_fa,trials\n";
  for (const ModelCurve& curve : curves) {
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
      out << curve.model_id << ',' << format_double(curve.thresholds[i]) << ',';
      if (!curve.p_md_mean.empty()) out << format_double(curve.p_md_mean[i]);
      out << ',' << format_double(curve.p_fa_mean[i]) << ',' << curve.trials << '\n';
    }
  }
  if (!out) throw ConfigError(path, "write failed");
}

void write_summary_csv(const std::string& path, const std::vector<ModelCurve>& curves) {
  std::ofstream out = open_csv(path);
  out << "model,min_total_error_mean,min_total_error_std\n";
  for (const ModelCurve& curve : curves) {
    out << curve.model_id << ',' << format_double(curve.min_total_error_mean) << ','
        << format_double(curve.min_total_error_std) << '\n';
  }
  if (!out) throw ConfigError(path, "write failed");
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out = open_csv(path);
  out << "epoch,update_idx,user,d_star,cost\n";
  for (const TraceRow& row : rows) {
    out << row.epoch << ',' << row.update_idx << ',' << row.user << ','
        << format_double(row.d_star) << ',' << format_double(row.cost) << '\n';
  }
  if (!out) throw ConfigError(path, "write failed");
}

void write_gamma_csv(const std::string& path, const Eigen::VectorXd& gamma) {
  std::ofstream out = open_csv(path);
  out << "user,gamma_hat\n";
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    out << (k + 1) << ',' << format_double(gamma(k)) << '\n';
  }
  if (!out) throw ConfigError(path, "write failed");
}

}  // namespace mach
