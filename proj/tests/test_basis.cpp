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

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mach/basis.hpp"
#include "mach/errors.hpp"
#include "mach/rng.hpp"
#include "oracles.hpp"

using namespace mach;

namespace {

ChannelTensor random_tensor(int L, int K, int M, std::uint64_t seed) {
  ChannelTensor tensor;
  tensor.K = K;
  tensor.M = M;
  tensor.h.resize(L, static_cast<long>(K) * M);
  Rng rng(seed);
  for (long c = 0; c < tensor.h.cols(); ++c)
    for (int l = 0; l < L; ++l) tensor.h(l, c) = rng.cnormal();
  return tensor;
}

double frobenius_residual(const ChannelTensor& tensor, const Basis& basis) {
  LsProjector projector(basis);
  double acc = 0.0;
  for (long c = 0; c < tensor.h.cols(); ++c) {
    const double r = projector.residual_norm(tensor.h.col(c));
    acc += r * r;
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("sample covariance of a rank-1 tensor recovers the dyad") {
  ChannelTensor tensor;
  tensor.K = 4;
  tensor.M = 3;
  tensor.h = Eigen::MatrixXcd::Ones(6, 12);
  const auto cov = sample_covariance(tensor);
  CHECK_FALSE(cov.degenerate);
  CHECK((cov.R - Eigen::MatrixXcd::Ones(6, 6)).norm() < 1e-12);
  CHECK(cov.eigvals(0) == doctest::Approx(6.0).epsilon(1e-12));
  for (int i = 1; i < 6; ++i) CHECK(std::abs(cov.eigvals(i)) < 1e-12);
  CHECK(cov.sample_count == 12);
}

TEST_CASE("sample covariance of white vectors approaches the identity") {
  const auto tensor = random_tensor(10, 100, 100, 71);
  const auto cov = sample_covariance(tensor);
  CHECK((cov.R - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("sample covariance trace equals the mean squared vector norm") {
  const auto tensor = random_tensor(7, 5, 4, 72);
  const auto cov = sample_covariance(tensor);
  const double expected = tensor.h.squaredNorm() / tensor.pair_count();
  CHECK(std::abs(cov.R.trace().real() - expected) <= 1e-10 * expected);
}

TEST_CASE("sample covariance orders eigenvalues descending and flags zero input") {
  const auto tensor = random_tensor(6, 8, 2, 73);
  const auto cov = sample_covariance(tensor);
  for (int i = 1; i < cov.eigvals.size(); ++i) CHECK(cov.eigvals(i - 1) >= cov.eigvals(i));

  ChannelTensor zero;
  zero.K = 2;
  zero.M = 1;
  zero.h = Eigen::MatrixXcd::Zero(4, 2);
  const auto flat = sample_covariance(zero);
  CHECK(flat.degenerate);
  CHECK(flat.eigvals.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rank-1 principal basis is the scaled all-ones direction") {
  ChannelTensor tensor;
  tensor.K = 3;
  tensor.M = 2;
  tensor.h = Eigen::MatrixXcd::Ones(5, 6);
  const auto basis = pca_basis(sample_covariance(tensor), 1);
  REQUIRE(basis.order() == 1);
  CHECK(basis.G.col(0).squaredNorm() == doctest::Approx(5.0).epsilon(1e-10));
  // All entries equal up to the arbitrary global sign/phase.
  for (int l = 1; l < 5; ++l) CHECK(std::abs(basis.G(l, 0) - basis.G(0, 0)) < 1e-10);
}

TEST_CASE("full-order principal basis reconstructs the covariance") {
  const auto tensor = random_tensor(6, 10, 5, 74);
  const auto cov = sample_covariance(tensor);
  const auto basis = pca_basis(cov, 6);
  CHECK((basis.G * basis.G.adjoint() - cov.R).norm() < 1e-9 * cov.R.norm());
}

TEST_CASE("principal order beyond the numerical rank is reported") {
  // Diagonal covariance with an exactly zero tail: numerical rank 2.
  CovarianceEstimate cov;
  cov.eigvals = Eigen::VectorXd::Zero(6);
  cov.eigvals(0) = 2.0;
  cov.eigvals(1) = 0.5;
  cov.eigvecs = Eigen::MatrixXcd::Identity(6, 6);
  cov.R = cov.eigvecs * cov.eigvals.asDiagonal() * cov.eigvecs.adjoint();
  cov.sample_count = 6;

  CHECK_THROWS_AS(pca_basis(cov, 3), NumericalError);
  try {
    pca_basis(cov, 3);
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("rank") != std::string::npos);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }
  CHECK(pca_basis(cov, 2).order() == 2);
  CHECK_THROWS_AS(pca_basis(cov, 0), ConfigError);
  CHECK_THROWS_AS(pca_basis(cov, 7), ConfigError);
}

TEST_CASE("block-fading basis is the all-ones column") {
  BlockGrid grid(4, 3, 1e3);
  const auto basis = block_fading_basis(grid);
  REQUIRE(basis.order() == 1);
  CHECK(basis.id() == "block-fading");
  CHECK((basis.G - Eigen::MatrixXcd::Ones(12, 1)).norm() == 0.0);

  // Constant vectors project exactly; zero-mean vectors project to zero.
  const std::complex<double> c(1.3, -0.2);
  const auto exact = ls_project(Eigen::VectorXcd::Constant(12, c), basis);
  CHECK(std::abs(exact.theta(0) - c) < 1e-12);
  CHECK(exact.residual < 1e-12);

  Eigen::VectorXcd odd = Eigen::VectorXcd::Zero(12);
  odd(0) = 1.0;
  odd(1) = -1.0;
  const auto ortho = ls_project(odd, basis);
  CHECK(std::abs(ortho.theta(0)) < 1e-12);
  CHECK(ortho.residual == doctest::Approx(odd.norm()).epsilon(1e-12));
}

TEST_CASE("piecewise-linear basis has half-block ramps orthogonal to the mean") {
  BlockGrid grid(4, 4, 1e3);
  const auto basis = bwl_basis(grid);
  REQUIRE(basis.order() == 5);
  CHECK(basis.id() == "bwl5");
  const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(16);
  CHECK((basis.G.col(0) - ones).norm() == 0.0);

  for (int n = 1; n < 5; ++n) {
    CHECK(std::abs(basis.G.col(n).dot(ones)) < 1e-10);               // zero mean
    CHECK(basis.G.col(n).squaredNorm() == doctest::Approx(16.0).epsilon(1e-12));
  }

  // Column 2 lives on symbols {1, 2}, column 3 on symbols {3, 4}; both
  // are linear in the symbol index with equal steps.
  for (int l = 1; l <= 16; ++l) {
    const auto tf = grid.map_index(l);
    const auto v1 = basis.G(l - 1, 1);
    const auto v2 = basis.G(l - 1, 2);
    if (tf.t > 2) CHECK(std::abs(v1) == 0.0);
    if (tf.t <= 2) CHECK(std::abs(v2) == 0.0);
  }
  const double step2 = (basis.G(grid.index_of(2, 1) - 1, 1) - basis.G(grid.index_of(1, 1) - 1, 1)).real();
  CHECK(step2 != 0.0);
  // Frequency ramps mirror the structure over subcarriers.
  for (int l = 1; l <= 16; ++l) {
    const auto tf = grid.map_index(l);
    if (tf.f > 2) CHECK(std::abs(basis.G(l - 1, 3)) == 0.0);
    if (tf.f <= 2) CHECK(std::abs(basis.G(l - 1, 4)) == 0.0);
  }
}

TEST_CASE("piecewise-linear basis captures half-block-linear channels exactly") {
  BlockGrid grid(4, 4, 1e3);
  const auto basis = bwl_basis(grid);
  Eigen::VectorXcd h(16);
  for (int l = 1; l <= 16; ++l) {
    const auto tf = grid.map_index(l);
    const double ramp = tf.t <= 2 ? (tf.t - 1.5) : 0.0;
    h(l - 1) = std::complex<double>(2.0, 0.5) + std::complex<double>(0.0, 3.0) * ramp;
  }
  const auto proj = ls_project(h, basis);
  CHECK(proj.residual < 1e-10);
}

TEST_CASE("piecewise-linear basis drops ramps whose half-blocks are single slots") {
  BlockGrid grid(2, 4, 1e3);
  const auto basis = bwl_basis(grid);
  // T = 2 halves hold one symbol each: the time ramps vanish and are
  // dropped, leaving mean + two frequency ramps.
  CHECK(basis.order() == 3);

  BlockGrid tiny(2, 2, 1e3);
  CHECK(bwl_basis(tiny).order() == 1);
}

TEST_CASE("piecewise-linear basis requires even block sides") {
  CHECK_THROWS_AS(bwl_basis(BlockGrid(3, 4, 1e3)), ConfigError);
  CHECK_THROWS_AS(bwl_basis(BlockGrid(4, 5, 1e3)), ConfigError);
}

TEST_CASE("frequency-only piecewise-linear variant has no time variation") {
  BlockGrid grid(4, 4, 1e3);
  const auto basis = bwl_basis(grid, false);
  REQUIRE(basis.order() == 3);
  CHECK(basis.id() == "bwl-freq3");
  for (int n = 0; n < 3; ++n) {
    for (int f = 1; f <= 4; ++f) {
      const auto ref = basis.G(grid.index_of(1, f) - 1, n);
      for (int t = 2; t <= 4; ++t) CHECK(basis.G(grid.index_of(t, f) - 1, n) == ref);
    }
  }
}

TEST_CASE("harmonic basis columns are unit-modulus and mutually orthogonal") {
  BlockGrid grid(5, 6, 1e3);
  const auto basis = dft_basis(grid);
  REQUIRE(basis.order() == 5);
  CHECK(basis.id() == "dft5");
  for (int n = 0; n < 5; ++n)
    for (int l = 0; l < 30; ++l)
      CHECK(std::abs(std::abs(basis.G(l, n)) - 1.0) < 1e-12);
  const Eigen::MatrixXcd gram = basis.G.adjoint() * basis.G;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      CHECK(std::abs(gram(i, j)) < 1e-10);
    }
  }

  // Second column is the slowest time tone, fourth the slowest frequency
  // tone, with the analytic phase progression.
  for (int l = 1; l <= 30; ++l) {
    const auto tf = grid.map_index(l);
    const auto time_tone = std::polar(1.0, -2.0 * oracles::kPi * (tf.t - 1) / 5.0);
    const auto freq_tone = std::polar(1.0, -2.0 * oracles::kPi * (tf.f - 1) / 6.0);
    CHECK(std::abs(basis.G(l - 1, 1) - time_tone) < 1e-12);
    CHECK(std::abs(basis.G(l - 1, 3) - freq_tone) < 1e-12);
  }
}

TEST_CASE("harmonic basis contains the pure frequency tones it claims") {
  BlockGrid grid(5, 6, 1e3);
  const auto basis = dft_basis(grid);
  Eigen::VectorXcd h(30);
  for (int l = 1; l <= 30; ++l) {
    const double angle = -2.0 * oracles::kPi * (grid.map_index(l).f - 1.0) / 6.0;
    h(l - 1) = std::complex<double>(std::cos(angle), std::sin(angle));
  }
  CHECK(ls_project(h, basis).residual < 1e-12);
}

TEST_CASE("harmonic basis deduplicates coinciding tones on short sides") {
  // T = 2: the lowest and highest time tones coincide.
  CHECK(dft_basis(BlockGrid(2, 6, 1e3)).order() == 4);
  // T = F = 2: both pairs collapse.
  CHECK(dft_basis(BlockGrid(2, 2, 1e3)).order() == 3);
  // Frequency-only variant.
  CHECK(dft_basis(BlockGrid(5, 6, 1e3), false).order() == 3);
  CHECK(dft_basis(BlockGrid(5, 6, 1e3), false).id() == "dft-freq3");
}

TEST_CASE("least-squares projection matches the normal equations") {
  Rng rng(81);
  Eigen::MatrixXcd G(12, 3);
  for (int n = 0; n < 3; ++n)
    for (int l = 0; l < 12; ++l) G(l, n) = rng.cnormal();
  Basis basis{G, BasisModel::kPca, "pca"};
  Eigen::VectorXcd h(12);
  for (int l = 0; l < 12; ++l) h(l) = rng.cnormal();

  const auto proj = ls_project(h, basis);
  const Eigen::VectorXcd reference =
      (G.adjoint() * G).ldlt().solve(G.adjoint() * h);
  CHECK((proj.theta - reference).norm() < 1e-8);
  CHECK((proj.approx - G * reference).norm() < 1e-8);
  CHECK(proj.residual == doctest::Approx((h - G * reference).norm()).epsilon(1e-8));
}

TEST_CASE("projection handles span membership and orthogonal complements") {
  Rng rng(82);
  Eigen::MatrixXcd G(8, 2);
  for (int n = 0; n < 2; ++n)
    for (int l = 0; l < 8; ++l) G(l, n) = rng.cnormal();
  Basis basis{G, BasisModel::kPca, "pca"};

  Eigen::VectorXcd in_span = G * Eigen::Vector2cd(1.5, std::complex<double>(0, -2));
  CHECK(ls_project(in_span, basis).residual < 1e-10 * in_span.norm());

  // Project out the span to get an orthogonal vector.
  Eigen::VectorXcd h(8);
  for (int l = 0; l < 8; ++l) h(l) = rng.cnormal();
  const Eigen::VectorXcd coeffs = (G.adjoint() * G).ldlt().solve(G.adjoint() * h);
  const Eigen::VectorXcd perp = h - G * coeffs;
  const auto proj = ls_project(perp, basis);
  CHECK(proj.theta.norm() < 1e-8);
  CHECK(proj.residual == doctest::Approx(perp.norm()).epsilon(1e-10));
}

TEST_CASE("projection rejects rank-deficient bases naming the dependent column") {
  Eigen::MatrixXcd G(6, 3);
  Rng rng(83);
  for (int l = 0; l < 6; ++l) G(l, 0) = rng.cnormal();
  G.col(1) = 2.0 * G.col(0);
  for (int l = 0; l < 6; ++l) G(l, 2) = rng.cnormal();
  Basis basis{G, BasisModel::kPca, "pca"};
  CHECK_THROWS_AS(LsProjector{basis}, NumericalError);
  try {
    LsProjector projector(basis);
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("column") != std::string::npos);
  }
}

TEST_CASE("relative approximation error of the mean model is exactly one") {
  const auto tensor = random_tensor(12, 20, 5, 84);
  BlockGrid grid(3, 4, 1e3);
  const auto report = approx_error_kappa(tensor, block_fading_basis(grid));
  CHECK(report.kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.epsilon > 0.0);
}

TEST_CASE("full-order principal approximation drives the error to zero") {
  const auto tensor = random_tensor(8, 30, 4, 85);
  const auto cov = sample_covariance(tensor);
  const auto report = approx_error_kappa(tensor, pca_basis(cov, 8));
  CHECK(report.kappa < 1e-9);
  CHECK(report.epsilon < 1e-9);
}

TEST_CASE("principal approximation error decreases with the order") {
  const auto tensor = random_tensor(10, 60, 5, 86);
  const auto cov = sample_covariance(tensor);
  double prev = 2.0;
  for (int N = 1; N <= 5; ++N) {
    const auto report = approx_error_kappa(tensor, pca_basis(cov, N));
    CHECK(report.kappa < prev);
    prev = report.kappa;
  }
  CHECK(prev <= 1.0);
}

TEST_CASE("exactly block-fading channels make the relative error undefined") {
  ChannelTensor tensor;
  tensor.K = 3;
  tensor.M = 1;
  tensor.h = Eigen::MatrixXcd::Ones(6, 3);
  tensor.h.col(1) *= std::complex<double>(0.0, 2.0);
  BlockGrid grid(2, 3, 1e3);
  CHECK_THROWS_AS(approx_error_kappa(tensor, block_fading_basis(grid)), NumericalError);
}

TEST_CASE("approximation metrics ignore a global phase rotation") {
  const auto tensor = random_tensor(12, 25, 4, 87);
  ChannelTensor rotated = tensor;
  rotated.h *= std::complex<double>(std::cos(0.7), std::sin(0.7));
  BlockGrid grid(3, 4, 1e3);
  const auto cov = sample_covariance(tensor);

  for (const Basis& basis : {pca_basis(cov, 3), dft_basis(grid)}) {
    const auto a = approx_error_kappa(tensor, basis);
    const auto b = approx_error_kappa(rotated, basis);
    CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-10));
    CHECK(a.epsilon == doctest::Approx(b.epsilon).epsilon(1e-10));
  }
}

TEST_CASE("mean residual never grows when a basis gains a column") {
  const auto tensor = random_tensor(9, 40, 3, 88);
  Rng rng(89);
  Eigen::MatrixXcd G(9, 4);
  for (int n = 0; n < 4; ++n)
    for (int l = 0; l < 9; ++l) G(l, n) = rng.cnormal();
  Basis small{G.leftCols(3), BasisModel::kPca, "pca"};
  Basis large{G, BasisModel::kPca, "pca"};
  const double e_small = prediction_horizon_error(tensor, small);
  const double e_large = prediction_horizon_error(tensor, large);
  CHECK(e_large <= e_small + 1e-12);

  // Mean of norms never exceeds the root-mean-square of norms.
  LsProjector projector(small);
  double sq = 0.0;
  for (long c = 0; c < tensor.h.cols(); ++c) {
    const double r = projector.residual_norm(tensor.h.col(c));
    sq += r * r;
  }
  CHECK(e_small <= std::sqrt(sq / tensor.pair_count()) + 1e-12);
}

TEST_CASE("single-pass order sweep agrees with per-order projections") {
  const auto tensor = random_tensor(8, 50, 2, 90);
  const auto cov = sample_covariance(tensor);
  const auto curve = pca_kappa_curve(tensor, cov, {1, 2, 3, 5, 8});
  REQUIRE(curve.size() == 5);
  for (const auto& [order, kappa] : curve) {
    const auto direct = approx_error_kappa(tensor, pca_basis(cov, order));
    // At full order both residuals vanish; the sweep's subtractive
    // accumulator leaves O(sqrt(machine eps)) noise, hence the absolute floor.
    CHECK(std::abs(kappa - direct.kappa) <= 1e-9 * direct.kappa + 1e-7);
  }
}

TEST_CASE("on-sample principal basis beats every same-order competitor") {
  BlockGrid grid(2, 10, 1e3);
  for (std::uint64_t seed : {101, 102, 103}) {
    const auto tensor = random_tensor(20, 200, 1, seed);
    const auto cov = sample_covariance(tensor);
    for (const Basis& rival :
         {block_fading_basis(grid), bwl_basis(grid), dft_basis(grid)}) {
      const auto pca = pca_basis(cov, rival.order());
      CHECK(frobenius_residual(tensor, pca) <=
            frobenius_residual(tensor, rival) + 1e-10);
    }
  }
}

TEST_CASE("shipped bases stay well conditioned across block shapes") {
  for (int T : {2, 4, 8, 16, 32}) {
    for (int F : {2, 4, 8, 16, 32}) {
      BlockGrid grid(T, F, 1e3);
      for (const Basis& basis :
           {block_fading_basis(grid), bwl_basis(grid), bwl_basis(grid, false),
            dft_basis(grid), dft_basis(grid, false)}) {
        const Eigen::MatrixXcd gram = basis.G.adjoint() * basis.G;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
        const auto& ev = es.eigenvalues();
        CHECK(ev(0) > 0.0);
        CHECK(ev(ev.size() - 1) / ev(0) < 1e6);
      }
    }
  }
}

TEST_CASE("basis files round-trip content, model, and label") {
  BlockGrid grid(4, 4, 1e3);
  oracles::TempDir dir("basis_io");
  for (const Basis& basis : {bwl_basis(grid), dft_basis(grid), block_fading_basis(grid)}) {
    const std::string path = dir.file(basis.id() + ".basis");
    write_basis(path, basis);
    const auto loaded = read_basis(path);
    CHECK(loaded.model == basis.model);
    REQUIRE(loaded.order() == basis.order());
    REQUIRE(loaded.L() == basis.L());
    for (int n = 0; n < basis.order(); ++n) {
      for (int l = 0; l < basis.L(); ++l) {
        CHECK(loaded.G(l, n).real() == static_cast<float>(basis.G(l, n).real()));
        CHECK(loaded.G(l, n).imag() == static_cast<float>(basis.G(l, n).imag()));
      }
    }
  }
}

TEST_CASE("basis reader rejects foreign and truncated files") {
  oracles::TempDir dir("basis_bad");
  {
    std::ofstream out(dir.file("junk.basis"), std::ios::binary);
    out << "MABS1";  // header cut short
  }
  CHECK_THROWS_AS(read_basis(dir.file("junk.basis")), ConfigError);
  CHECK_THROWS_AS(read_basis(dir.file("missing.basis")), ConfigError);
}
