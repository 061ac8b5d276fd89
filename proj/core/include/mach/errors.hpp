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

#ifndef MACH_ERRORS_HPP
#define MACH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mach {

// Raised for invalid user-facing inputs: configuration files, data files,
// and parameter combinations that can never be valid. The `field` names the
// offending config key / file location so the CLI can report it precisely.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Raised when a numerical routine leaves its domain of validity (non-PD
// covariance, corrupted eigenvalues, rank-deficient design, ...). Carries
// the module and operation for diagnostics; mapped to exit code 3 by the
// CLI.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string module, std::string op, const std::string& message)
      : std::runtime_error(module + "/" + op + ": " + message),
        module_(std::move(module)),
        op_(std::move(op)) {}

  const std::string& module() const noexcept { return module_; }
  const std::string& op() const noexcept { return op_; }

 private:
  std::string module_;
  std::string op_;
};

}  // namespace mach

#endif  // MACH_ERRORS_HPP
