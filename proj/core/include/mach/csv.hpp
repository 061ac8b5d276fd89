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
// CSV artifacts. All numbers are printed with "%.12g", which makes files
// byte-deterministic for identical inputs across runs.

#ifndef MACH_CSV_HPP
#define MACH_CSV_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mach/detector.hpp"
#include "mach/harness.hpp"

namespace mach {

std::string format_double(double v);

// kappa.csv: model,N,kappa,epsilon
void write_kappa_csv(const std::string& path, const std::vector<KappaRow>& rows);

// detection.csv: model,threshold,p_md,p_fa,trials  (p_md empty if undefined)
void write_detection_csv(const std::string& path, const std::vector<ModelCurve>& curves);

// summary.csv: model,min_total_error_mean,min_total_error_std
void write_summary_csv(const std::string& path, const std::vector<ModelCurve>& curves);

// trace.csv: epoch,update_idx,user,d_star,cost
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

// gamma.csv: user,gamma_hat
void write_gamma_csv(const std::string& path, const Eigen::VectorXd& gamma);

}  // namespace mach

#endif  // MACH_CSV_HPP
