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
// Independent reference implementations used by the tests: everything in
// here recomputes a quantity from first principles (quadrature, naive
// summation, explicit dense linear algebra, exhaustive search) so that the
// library's optimized routines are checked against a second formulation
// rather than against themselves.

#ifndef MACH_TESTS_ORACLES_HPP
#define MACH_TESTS_ORACLES_HPP

#include <unistd.h>

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mach/detector.hpp"
#include "mach/rng.hpp"

namespace oracles {

constexpr double kPi = 3.14159265358979323846;

// --- quadrature ------------------------------------------------------------

// Simpson's rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& fn, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double acc = fn(a) + fn(b);
  for (int i = 1; i < panels; ++i) acc += fn(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Root-raised-cosine impulse response recovered from its frequency response:
// the transmit filter is sqrt(S(f)) with S the raised-cosine spectrum, so
//
//   p(t) = 2 * Integral_0^{(1+b)/2} sqrt(S(f)) cos(2 pi f t) df,
//
// integrated separately on the flat band and the cosine rolloff band so
// the integrand stays smooth on each panel.
inline double rrc_from_spectrum(double t, double rolloff, int panels = 20000) {
  const double f1 = (1.0 - rolloff) / 2.0;
  const double f2 = (1.0 + rolloff) / 2.0;
  const auto flat = [&](double f) { return std::cos(2.0 * kPi * f * t); };
  const auto skirt = [&](double f) {
    const double amplitude = std::cos(kPi / (2.0 * rolloff) * (f - f1));
    return amplitude * std::cos(2.0 * kPi * f * t);
  };
  return 2.0 * (simpson(flat, 0.0, f1, panels) + simpson(skirt, f1, f2, panels));
}

// --- transforms -------------------------------------------------------------

// One output bin of the P-point transform, by direct summation.
inline std::complex<double> dft_bin(const Eigen::VectorXcd& x, int f) {
  const int P = static_cast<int>(x.size());
  std::complex<double> acc = 0.0;
  for (int i = 1; i <= P; ++i) {
    const double angle = -2.0 * kPi * (i - 1.0) * (f - 1.0) / P;
    acc += x(i - 1) * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return acc;
}

// --- statistics -------------------------------------------------------------

// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double c = cdf(samples[i]);
    d = std::max(d, std::abs((i + 1.0) / n - c));
    d = std::max(d, std::abs(c - i / n));
  }
  return d;
}

// Critical value at significance alpha (Stephens' approximation).
inline double ks_critical(std::size_t n, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double root = std::sqrt(static_cast<double>(n));
  return c / (root + 0.12 + 0.11 / root);
}

// --- dense linear-algebra references ----------------------------------------

// Sigma(gamma) assembled densely from the per-user pilot blocks.
inline Eigen::MatrixXcd build_sigma(const mach::EffectivePilotSet& pilots,
                                    const Eigen::VectorXd& gamma, double noise_var) {
  Eigen::MatrixXcd sigma =
      noise_var * Eigen::MatrixXcd::Identity(pilots.L, pilots.L);
  for (int k = 0; k < pilots.K(); ++k) {
    if (gamma(k) != 0.0) sigma += gamma(k) * pilots.S[k] * pilots.S[k].adjoint();
  }
  return sigma;
}

// f(gamma) by explicit LU inverse and determinant (no Cholesky shortcut).
inline double nll_direct(const Eigen::MatrixXcd& sigma, const Eigen::MatrixXcd& sigma_hat) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sigma);
  const Eigen::MatrixXcd inv = lu.inverse();
  double logdet = 0.0;
  for (int i = 0; i < sigma.rows(); ++i) logdet += std::log(std::abs(lu.matrixLU()(i, i)));
  return logdet + (inv * sigma_hat).trace().real();
}

// The 1-D cost along coordinate direction d, written out directly.
inline double line_cost_direct(double d, const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& xi) {
  double acc = 0.0;
  for (int n = 0; n < lambda.size(); ++n) {
    const double denom = 1.0 + d * lambda(n);
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    acc += std::log(denom) - d * xi(n) / denom;
  }
  return acc;
}

struct GridMin {
  double d = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

// Exhaustive minimizer of the 1-D cost on a fixed-step grid over
// [lo, min(hi, clip)], endpoints included.
inline GridMin dense_grid_min(const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi,
                              double lo, double hi, double step, double clip = 1e3) {
  GridMin best;
  const double top = std::min(hi, clip);
  const long steps = static_cast<long>(std::floor((top - lo) / step));
  for (long i = 0; i <= steps; ++i) {
    const double d = lo + i * step;
    const double c = line_cost_direct(d, lambda, xi);
    if (c < best.cost) best = {d, c};
  }
  const double c_top = line_cost_direct(top, lambda, xi);
  if (c_top < best.cost) best = {top, c_top};
  return best;
}

// --- random detector instances ----------------------------------------------

struct Instance {
  mach::EffectivePilotSet pilots;
  mach::SampleCovariance cov;
  double noise_var = 1.0;
  Eigen::VectorXd gamma_true;
};

// A randomized detection problem: random pilots and basis, a sparse true
// gamma, and a finite-snapshot sample covariance drawn from the implied
// Gaussian model (snapshots = 4L keeps SigmaHat close to, but distinct
// from, the exact covariance).
inline Instance random_instance(std::uint64_t seed, int L, int N, int K) {
  mach::Rng rng(mach::derive_stream(seed, {0xabcdULL}));
  Eigen::MatrixXcd phi(L, K);
  for (int k = 0; k < K; ++k) {
    double norm2 = 0.0;
    for (int l = 0; l < L; ++l) {
      phi(l, k) = rng.cnormal();
      norm2 += std::norm(phi(l, k));
    }
    phi.col(k) *= std::sqrt(L / norm2);
  }
  Eigen::MatrixXcd basis(L, N);
  for (int n = 0; n < N; ++n)
    for (int l = 0; l < L; ++l) basis(l, n) = rng.cnormal();

  Instance inst;
  inst.pilots = mach::effective_pilots(phi, basis);
  inst.noise_var = rng.uniform(0.5, 2.0);
  inst.gamma_true = Eigen::VectorXd::Zero(K);
  for (int k = 0; k < K; ++k)
    if (rng.uniform01() < 0.4) inst.gamma_true(k) = rng.uniform(0.1, 1.5);

  const Eigen::MatrixXcd sigma = build_sigma(inst.pilots, inst.gamma_true, inst.noise_var);
  Eigen::LLT<Eigen::MatrixXcd> llt(sigma);
  const int M = 4 * L;
  Eigen::MatrixXcd z(L, M);
  for (int m = 0; m < M; ++m)
    for (int l = 0; l < L; ++l) z(l, m) = rng.cnormal();
  inst.cov = mach::make_sample_covariance(llt.matrixL() * z);
  return inst;
}

// --- filesystem --------------------------------------------------------------

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mach_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracles

#endif  // MACH_TESTS_ORACLES_HPP
