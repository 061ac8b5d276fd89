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
// Low-dimensional linear models h ~= G theta for block channel vectors.
//
//   * block-fading: G = all-ones (N = 1);
//   * bwl:          ones + per-half-block linear ramps in t and f (N = 5),
//                   or frequency-only (N = 3);
//   * dft:          ones + lowest/highest nonzero DFT columns in t and f
//                   (N = 5), or frequency-only (N = 3);
//   * pca:          G = U_N diag(rho_N)^(1/2) from the channel sample
//                   covariance, so theta has unit variance per coordinate.
//
// Deterministic non-constant columns are scaled to ||g||^2 = L; DFT/ones
// columns have unit-modulus entries and already satisfy that. Structurally
// degenerate columns (identically zero ramps on size-1 half-blocks,
// coinciding DFT columns at T <= 2 or F <= 2) are dropped and the
// effective order is reported by Basis::order().

#ifndef MACH_BASIS_HPP
#define MACH_BASIS_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "mach/block_grid.hpp"
#include "mach/channel_sim.hpp"

namespace mach {

enum class BasisModel : unsigned char {
  kBlockFading = 0,
  kBwl = 1,
  kDft = 2,
  kPca = 3,
};

struct Basis {
  Eigen::MatrixXcd G;  // L x N
  BasisModel model = BasisModel::kBlockFading;
  std::string label;  // "block-fading", "bwl", "bwl-freq", "dft", "dft-freq", "pca"

  int L() const { return static_cast<int>(G.rows()); }
  int order() const { return static_cast<int>(G.cols()); }

  // Stable identifier for CSV keys, e.g. "pca4", "bwl5", "block-fading".
  std::string id() const;
};

// Sample covariance R = (KM)^-1 sum_p h_p h_p^H with its eigensystem,
// eigenvalues sorted descending. An all-zero tensor is flagged degenerate
// rather than rejected.
struct CovarianceEstimate {
  Eigen::MatrixXcd R;
  Eigen::MatrixXcd eigvecs;  // U, columns match eigvals order
  Eigen::VectorXd eigvals;   // rho, descending
  long sample_count = 0;
  bool degenerate = false;
};

CovarianceEstimate sample_covariance(const ChannelTensor& channels);

// Principal-component basis G = U_N diag(rho_N)^(1/2). Requires
// rho_N > 0; otherwise raises a numerical error naming the numerical rank.
Basis pca_basis(const CovarianceEstimate& cov, int N);

Basis block_fading_basis(const BlockGrid& grid);

// time_aware = false gives the frequency-only variant.
Basis bwl_basis(const BlockGrid& grid, bool time_aware = true);
Basis dft_basis(const BlockGrid& grid, bool time_aware = true);

struct Projection {
  Eigen::VectorXcd theta;   // LS coefficients
  Eigen::VectorXcd approx;  // G theta
  double residual = 0.0;    // ||h - G theta||_2
};

// Factors the basis once; projects many vectors cheaply.
class LsProjector {
 public:
  explicit LsProjector(const Basis& basis);

  Projection project(const Eigen::Ref<const Eigen::VectorXcd>& h) const;
  double residual_norm(const Eigen::Ref<const Eigen::VectorXcd>& h) const;

 private:
  Eigen::MatrixXcd G_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr_;
};

Projection ls_project(const Eigen::Ref<const Eigen::VectorXcd>& h, const Basis& basis);

// Relative and absolute approximation quality over a tensor:
//
//   kappa   = ||H_hat - H||_F / ||H_bar - H||_F,  H_bar = per-vector mean,
//   epsilon = mean_p ||h_p - G theta_p||_2.
struct ApproxReport {
  double kappa = 0.0;
  double epsilon = 0.0;
  std::vector<std::pair<int, double>> curve;  // (order, kappa) points
};

ApproxReport approx_error_kappa(const ChannelTensor& channels, const Basis& basis);

// Mean per-vector LS residual norm (the epsilon of the report alone).
double prediction_horizon_error(const ChannelTensor& channels, const Basis& basis);

// kappa of the PCA basis truncated to each requested order, computed in a
// single pass using the orthonormality of the eigenvector columns.
std::vector<std::pair<int, double>> pca_kappa_curve(const ChannelTensor& channels,
                                                    const CovarianceEstimate& cov,
                                                    const std::vector<int>& orders);

// Basis file: magic "MABS1", uint32 L, uint32 N, uint8 model tag
// (0=block-fading, 1=bwl, 2=dft, 3=pca), then L*N complex64 column-major.
void write_basis(const std::string& filename, const Basis& basis);
Basis read_basis(const std::string& filename);

}  // namespace mach

#endif  // MACH_BASIS_HPP
