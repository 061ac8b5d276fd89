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
// Covariance-based user-activity detection by coordinate descent on
//
//   f(gamma) = log|Sigma(gamma)| + tr(Sigma(gamma)^-1 SigmaHat),
//   Sigma(gamma) = sum_k gamma_k S_k S_k^H + noise_var * I,
//
// where S_k = diag(phi_k) G stacks the N effective pilots of user k and
// SigmaHat = Y Y^H / M is the received sample covariance. One coordinate
// step perturbs gamma_k by d, a rank-N modification of Sigma handled in
// closed form:
//
//   * eigendecompose Psi_k = S_k^H Sigma^-1 S_k = V diag(lambda) V^H,
//   * with B = Sigma^-1 S_k V and xi_n = b_n^H SigmaHat b_n, the cost
//     change is  delta_f(d) = sum_n [log(1 + d lambda_n)
//                                    - d xi_n / (1 + d lambda_n)],
//   * its stationary points are the real roots of a polynomial of degree
//     2N - 1, so the 1-D minimization over the feasible interval is exact,
//   * Sigma^-1 is then downdated via the matrix inversion lemma and
//     log|Sigma| via the rank-N determinant identity.
//
// Feasibility d >= -gamma_k keeps Sigma positive definite, so every
// 1 + d lambda_n stays positive on the search interval.

#ifndef MACH_DETECTOR_HPP
#define MACH_DETECTOR_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace mach {

// Per-user effective pilot blocks S_k = diag(phi_k) G, each L x N.
struct EffectivePilotSet {
  std::vector<Eigen::MatrixXcd> S;
  int L = 0;
  int N = 0;

  int K() const { return static_cast<int>(S.size()); }
};

// pilots: L x K, one column per user; basis_cols: L x N.
EffectivePilotSet effective_pilots(const Eigen::MatrixXcd& pilots,
                                   const Eigen::MatrixXcd& basis_cols);

// Received sample covariance SigmaHat = Y Y^H / M (Hermitian by
// construction here).
struct SampleCovariance {
  Eigen::MatrixXcd sigma_hat;  // L x L
  int M = 0;                   // antennas averaged
};

SampleCovariance make_sample_covariance(const Eigen::MatrixXcd& received);

enum class ConstraintKind : unsigned char {
  kNonnegative,  // gamma_k >= 0, step capped at d_max per update
  kBox,          // 0 <= gamma_k <= beta_k
};

struct GammaConstraint {
  ConstraintKind kind = ConstraintKind::kNonnegative;
  Eigen::VectorXd beta;  // per-user upper bounds, used when kind == kBox

  static GammaConstraint nonnegative();
  static GammaConstraint box(Eigen::VectorXd beta);
  static GammaConstraint box_uniform(double beta, int K);
};

// Mutable detector state: the iterate, its tracked inverse and cost.
struct GammaState {
  Eigen::VectorXd gamma;       // K, current large-scale gain estimates
  Eigen::MatrixXcd sigma_inv;  // L x L, Sigma(gamma)^-1
  double cost = 0.0;           // f(gamma), tracked incrementally
  double noise_var = 1.0;
  GammaConstraint constraint;
};

// gamma = 0 start: Sigma = noise_var * I, so the initial cost is
// L log(noise_var) + tr(SigmaHat) / noise_var. noise_var must be positive.
GammaState init_gamma_state(int K, const SampleCovariance& cov, double noise_var,
                            const GammaConstraint& constraint);

// f(gamma) recomputed from scratch (Cholesky of the rebuilt Sigma).
double nll_cost(const Eigen::MatrixXcd& sigma, const Eigen::MatrixXcd& sigma_hat);

// Rebuilds Sigma from gamma, refactorizes, and resets sigma_inv and cost;
// called once per sweep to stop incremental-update drift.
void refresh_gamma_state(GammaState& state, const EffectivePilotSet& pilots,
                         const SampleCovariance& cov);

enum class RootMode : unsigned char {
  kCompanion,   // polynomial roots from the companion-matrix eigenvalues
  kBracketing,  // derivative sign changes on a log grid, then bisection
};

struct UpdateOptions {
  RootMode root_mode = RootMode::kCompanion;
  // Step cap for the unbounded constraint: d_max = d_max_factor *
  // tr(SigmaHat) / (L * noise_var).
  double d_max_factor = 1e3;
};

// One-coordinate line-search problem and its solution, exposed for tests.
struct CoordinateUpdateWork {
  Eigen::MatrixXcd psi;      // Psi_k = S_k^H Sigma^-1 S_k
  Eigen::MatrixXcd V;        // eigenvectors of Psi_k, columns match lambda
  Eigen::VectorXd lambda;    // eigenvalues of Psi_k, descending
  Eigen::MatrixXcd xi_full;  // Xi_k = V^H (W^H SigmaHat W) V
  Eigen::VectorXd xi;        // real diagonal of Xi_k (the part consumed)
  double d_lo = 0.0;         // -gamma_k
  double d_hi = 0.0;         // beta_k - gamma_k, or the d_max cap
  std::vector<double> candidates;  // evaluated minimizer candidates
  double d_star = 0.0;             // applied step (after clamping)
  bool at_cap = false;             // d_star hit d_hi under kNonnegative
  bool refactorized = false;       // Woodbury skipped for a full refactorization
};

// delta_f(d); +inf outside the domain of definition.
double line_cost(double d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi);

// d/dd delta_f(d).
double line_deriv(double d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi);

// Real stationary points of delta_f inside [d_lo, d_hi].
std::vector<double> stationary_points(const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi,
                                      double d_lo, double d_hi, RootMode mode);

// Exact coordinate step for user k (0-based). Updates gamma_k, sigma_inv,
// and cost in place; returns the line-search details. If I + d Psi_k is too
// ill conditioned for a safe inverse downdate (condition > 1e12), the state
// is rebuilt by full refactorization instead.
CoordinateUpdateWork coordinate_update(GammaState& state, const EffectivePilotSet& pilots,
                                       const SampleCovariance& cov, int k,
                                       const UpdateOptions& options = {});

struct DetectorConfig {
  int epochs = 10;  // full sweeps over all K users
  double noise_var = 1.0;
  GammaConstraint constraint;
  UpdateOptions update;
  std::uint64_t rng_seed = 0;  // drives the per-sweep user permutations
  bool record_trace = false;
};

struct TraceRow {
  int epoch = 0;        // 1-based sweep index
  long update_idx = 0;  // 1-based global update counter
  int user = 0;         // 1-based user index
  double d_star = 0.0;
  double cost = 0.0;
};

struct DetectionResult {
  Eigen::VectorXd gamma;           // K, final estimates
  std::vector<double> epoch_costs;  // f(gamma) after each sweep, refreshed
  double initial_cost = 0.0;
  long updates = 0;
  long cap_hits = 0;  // steps that ran into the kNonnegative search cap
  std::vector<TraceRow> trace;  // empty unless record_trace
};

// Full coordinate-descent run: `epochs` sweeps, each visiting all users in
// a fresh random order, with a state refresh after every sweep.
DetectionResult run_detection(const EffectivePilotSet& pilots, const SampleCovariance& cov,
                              const DetectorConfig& config);

// Declared active where gamma_k > threshold (threshold >= 0).
std::vector<int> threshold_activities(const Eigen::VectorXd& gamma, double threshold);

}  // namespace mach

#endif  // MACH_DETECTOR_HPP
