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

#include "mach/basis.hpp"

#include <cmath>
#include <complex>

#include "mach/errors.hpp"

namespace mach {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// Scales a non-constant column to ||g||^2 = L so its random coefficient
// carries comparable power across models.
void normalize_column(Eigen::MatrixXcd& G, Eigen::Index col) {
  const double norm = G.col(col).norm();
  G.col(col) *= std::sqrt(static_cast<double>(G.rows())) / norm;
}

// Appends `col` unless it is (numerically exactly) a duplicate of an
// already kept column or identically zero; returns whether it was kept.
bool append_unique(std::vector<Eigen::VectorXcd>& cols, const Eigen::VectorXcd& col) {
  const double scale = std::sqrt(static_cast<double>(col.size()));
  if (col.norm() <= 1e-12 * scale) return false;
  for (const auto& kept : cols) {
    if ((kept - col).norm() <= 1e-9 * scale) return false;
  }
  cols.push_back(col);
  return true;
}
}  // namespace

std::string Basis::id() const {
  if (model == BasisModel::kBlockFading) return label;
  return label + std::to_string(order());
}

CovarianceEstimate sample_covariance(const ChannelTensor& channels) {
  const long pairs = channels.h.cols();
  if (pairs < 1) throw std::invalid_argument("empty channel tensor");

  CovarianceEstimate est;
  est.sample_count = pairs;
  est.R = (channels.h * channels.h.adjoint()) / static_cast<double>(pairs);
  est.R = 0.5 * (est.R + est.R.adjoint()).eval();  // exact Hermitian symmetry
  est.degenerate = est.R.cwiseAbs().maxCoeff() == 0.0;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(est.R);
  if (es.info() != Eigen::Success) {
    throw NumericalError("basis-models", "sample_covariance", "eigendecomposition failed");
  }
  // Eigen sorts ascending; flip to descending.
  est.eigvals = es.eigenvalues().reverse();
  est.eigvecs = es.eigenvectors().rowwise().reverse();
  return est;
}

Basis pca_basis(const CovarianceEstimate& cov, int N) {
  const auto L = static_cast<int>(cov.R.rows());
  if (N < 1 || N > L) {
    throw ConfigError("basis.N", "PCA order must be in [1, L=" + std::to_string(L) + "], got " +
                                     std::to_string(N));
  }
  if (cov.eigvals(N - 1) <= 0.0) {
    int rank = 0;
    const double tol = cov.eigvals(0) * 1e-12;
    while (rank < L && cov.eigvals(rank) > tol && cov.eigvals(rank) > 0.0) ++rank;
    throw NumericalError("basis-models", "pca_basis",
                         "order " + std::to_string(N) +
                             " exceeds the numerical rank " + std::to_string(rank) +
                             " of the sample covariance");
  }

  Basis basis;
  basis.model = BasisModel::kPca;
  basis.label = "pca";
  basis.G = cov.eigvecs.leftCols(N) *
            cov.eigvals.head(N).cwiseSqrt().asDiagonal();
  return basis;
}

Basis block_fading_basis(const BlockGrid& grid) {
  Basis basis;
  basis.model = BasisModel::kBlockFading;
  basis.label = "block-fading";
  basis.G = Eigen::MatrixXcd::Ones(grid.L(), 1);
  return basis;
}

Basis bwl_basis(const BlockGrid& grid, bool time_aware) {
  if (grid.T() % 2 != 0 || grid.F() % 2 != 0) {
    throw ConfigError("basis.bwl", "needs even T and F for half-block splits, got T=" +
                                       std::to_string(grid.T()) + ", F=" +
                                       std::to_string(grid.F()));
  }
  const int L = grid.L();

  // Ramp over one half of the index range [1, n]: value idx - midpoint on
  // the half (zero-mean, step 1), zero outside. A size-1 half yields the
  // zero column and is dropped by append_unique.
  const auto half_ramp = [&](int n, bool first_half, bool over_time) {
    const int lo = first_half ? 1 : n / 2 + 1;
    const int hi = first_half ? n / 2 : n;
    const double mid = 0.5 * (lo + hi);
    Eigen::VectorXcd col = Eigen::VectorXcd::Zero(L);
    for (int l = 1; l <= L; ++l) {
      const TimeFreq tf = grid.map_index(l);
      const int idx = over_time ? tf.t : tf.f;
      if (idx >= lo && idx <= hi) col(l - 1) = static_cast<double>(idx) - mid;
    }
    return col;
  };

  std::vector<Eigen::VectorXcd> cols;
  cols.push_back(Eigen::VectorXcd::Ones(L));
  if (time_aware) {
    append_unique(cols, half_ramp(grid.T(), true, true));
    append_unique(cols, half_ramp(grid.T(), false, true));
  }
  append_unique(cols, half_ramp(grid.F(), true, false));
  append_unique(cols, half_ramp(grid.F(), false, false));

  Basis basis;
  basis.model = BasisModel::kBwl;
  basis.label = time_aware ? "bwl" : "bwl-freq";
  basis.G.resize(L, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    basis.G.col(static_cast<Eigen::Index>(c)) = cols[c];
    if (c > 0) normalize_column(basis.G, static_cast<Eigen::Index>(c));
  }
  return basis;
}

Basis dft_basis(const BlockGrid& grid, bool time_aware) {
  const int L = grid.L();

  // Column exp(-j 2 pi (idx - 1) kappa / n) over the time or frequency
  // coordinate; kappa in {1, n-1} picks the lowest/highest nonzero DFT
  // frequencies. Entries are unit modulus, so ||g||^2 = L holds already.
  const auto dft_col = [&](int n, int kappa, bool over_time) {
    Eigen::VectorXcd col(L);
    for (int l = 1; l <= L; ++l) {
      const TimeFreq tf = grid.map_index(l);
      const int idx = over_time ? tf.t : tf.f;
      col(l - 1) = std::polar(1.0, -2.0 * kPi * (idx - 1) * kappa / static_cast<double>(n));
    }
    return col;
  };

  std::vector<Eigen::VectorXcd> cols;
  cols.push_back(Eigen::VectorXcd::Ones(L));
  if (time_aware) {
    append_unique(cols, dft_col(grid.T(), 1, true));
    append_unique(cols, dft_col(grid.T(), grid.T() - 1, true));
  }
  append_unique(cols, dft_col(grid.F(), 1, false));
  append_unique(cols, dft_col(grid.F(), grid.F() - 1, false));

  Basis basis;
  basis.model = BasisModel::kDft;
  basis.label = time_aware ? "dft" : "dft-freq";
  basis.G.resize(L, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    basis.G.col(static_cast<Eigen::Index>(c)) = cols[c];
  }
  return basis;
}

LsProjector::LsProjector(const Basis& basis) : G_(basis.G), qr_(basis.G) {
  const auto N = G_.cols();
  if (qr_.rank() < N) {
    // Columns permuted past the numerical rank are linearly dependent on
    // earlier ones; report their original indices (1-based).
    const auto& perm = qr_.colsPermutation().indices();
    std::string dependent;
    for (Eigen::Index i = qr_.rank(); i < N; ++i) {
      if (!dependent.empty()) dependent += ", ";
      dependent += std::to_string(perm(i) + 1);
    }
    throw NumericalError("basis-models", "ls_project",
                         "basis is rank deficient (rank " + std::to_string(qr_.rank()) +
                             " < " + std::to_string(N) + "); dependent column(s): " + dependent);
  }
}

Projection LsProjector::project(const Eigen::Ref<const Eigen::VectorXcd>& h) const {
  if (h.size() != G_.rows()) throw std::invalid_argument("vector length does not match basis");
  Projection p;
  p.theta = qr_.solve(h);
  p.approx = G_ * p.theta;
  p.residual = (h - p.approx).norm();
  return p;
}

double LsProjector::residual_norm(const Eigen::Ref<const Eigen::VectorXcd>& h) const {
  return project(h).residual;
}

Projection ls_project(const Eigen::Ref<const Eigen::VectorXcd>& h, const Basis& basis) {
  return LsProjector(basis).project(h);
}

ApproxReport approx_error_kappa(const ChannelTensor& channels, const Basis& basis) {
  if (channels.h.rows() != basis.G.rows()) {
    throw std::invalid_argument("tensor and basis disagree on L");
  }
  const LsProjector proj(basis);
  const long pairs = channels.h.cols();
  const auto L = static_cast<double>(channels.h.rows());

  double num2 = 0.0;   // ||H_hat - H||_F^2
  double den2 = 0.0;   // ||H_bar - H||_F^2
  double eps_sum = 0.0;
  for (long p = 0; p < pairs; ++p) {
    const auto h = channels.h.col(p);
    const std::complex<double> mean = h.sum() / L;
    den2 += (h.array() - mean).matrix().squaredNorm();
    const double r = proj.residual_norm(h);
    num2 += r * r;
    eps_sum += r;
  }
  if (den2 <= 0.0) {
    throw NumericalError("basis-models", "approx_error_kappa",
                         "channels are constant per vector; mean-removal reference is zero");
  }

  ApproxReport report;
  report.kappa = std::sqrt(num2 / den2);
  report.epsilon = eps_sum / static_cast<double>(pairs);
  report.curve = {{basis.order(), report.kappa}};
  return report;
}

double prediction_horizon_error(const ChannelTensor& channels, const Basis& basis) {
  if (channels.h.rows() != basis.G.rows()) {
    throw std::invalid_argument("tensor and basis disagree on L");
  }
  const LsProjector proj(basis);
  double eps_sum = 0.0;
  for (long p = 0; p < channels.h.cols(); ++p) {
    eps_sum += proj.residual_norm(channels.h.col(p));
  }
  return eps_sum / static_cast<double>(channels.h.cols());
}

std::vector<std::pair<int, double>> pca_kappa_curve(const ChannelTensor& channels,
                                                    const CovarianceEstimate& cov,
                                                    const std::vector<int>& orders) {
  const auto L = static_cast<int>(cov.R.rows());
  if (channels.h.rows() != L) throw std::invalid_argument("tensor and covariance disagree on L");
  int max_order = 0;
  for (int n : orders) {
    if (n < 1 || n > L) throw std::invalid_argument("order outside [1, L]");
    max_order = std::max(max_order, n);
  }

  // span(G_N) = span(U_N), so the LS residual is the orthogonal-complement
  // energy 1 - sum_{n<=N} |u_n^H h|^2 / ||h||^2, accumulated once.
  const Eigen::MatrixXcd U = cov.eigvecs.leftCols(max_order);
  const long pairs = channels.h.cols();
  Eigen::VectorXd num2 = Eigen::VectorXd::Zero(max_order + 1);  // index = order
  double den2 = 0.0;
  for (long p = 0; p < pairs; ++p) {
    const auto h = channels.h.col(p);
    const std::complex<double> mean = h.sum() / static_cast<double>(L);
    den2 += (h.array() - mean).matrix().squaredNorm();
    const Eigen::VectorXcd c = U.adjoint() * h;
    double resid2 = h.squaredNorm();
    num2(0) += resid2;
    for (int n = 1; n <= max_order; ++n) {
      resid2 -= std::norm(c(n - 1));
      num2(n) += std::max(resid2, 0.0);
    }
  }
  if (den2 <= 0.0) {
    throw NumericalError("basis-models", "approx_error_kappa",
                         "channels are constant per vector; mean-removal reference is zero");
  }

  std::vector<std::pair<int, double>> curve;
  curve.reserve(orders.size());
  for (int n : orders) curve.emplace_back(n, std::sqrt(num2(n) / den2));
  return curve;
}

}  // namespace mach
