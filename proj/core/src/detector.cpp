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

#include "mach/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mach/errors.hpp"
#include "mach/rng.hpp"

namespace mach {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// --- stationary-point polynomial -----------------------------------------
//
// g(d) = sum_n [lambda_n/(1+d lambda_n) - xi_n/(1+d lambda_n)^2] vanishes
// exactly where
//
//   p(d) = sum_n [(lambda_n - xi_n) + d lambda_n^2]
//          * prod_{m != n} (1 + d lambda_m)^2 = 0,
//
// a real polynomial of degree 2N - 1. The variable is rescaled by
// 1/max(lambda) before the companion matrix is formed so the coefficient
// products stay well conditioned.

// poly *= (c0 + c1 u), ascending coefficients.
void mul_linear(std::vector<double>& poly, double c0, double c1) {
  std::vector<double> out(poly.size() + 1, 0.0);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    out[i] += c0 * poly[i];
    out[i + 1] += c1 * poly[i];
  }
  poly = std::move(out);
}

std::vector<double> stationary_poly_scaled(const Eigen::VectorXd& lambda,
                                           const Eigen::VectorXd& xi, double scale) {
  const auto N = lambda.size();
  std::vector<double> poly(static_cast<std::size_t>(2 * N), 0.0);
  for (Eigen::Index n = 0; n < N; ++n) {
    // degree-1 factor in u = scale * d: (lambda_n - xi_n) + u lambda_n^2/scale
    std::vector<double> term{lambda(n) - xi(n), lambda(n) * (lambda(n) / scale)};
    for (Eigen::Index m = 0; m < N; ++m) {
      if (m == n) continue;
      const double lm = lambda(m) / scale;
      mul_linear(term, 1.0, lm);
      mul_linear(term, 1.0, lm);
    }
    for (std::size_t i = 0; i < term.size(); ++i) poly[i] += term[i];
  }
  return poly;
}

std::vector<double> companion_real_roots(std::vector<double> coeffs) {
  double amax = 0.0;
  for (double c : coeffs) amax = std::max(amax, std::abs(c));
  if (amax == 0.0) return {};
  for (double& c : coeffs) c /= amax;

  auto degree = static_cast<long>(coeffs.size()) - 1;
  while (degree > 0 && std::abs(coeffs[static_cast<std::size_t>(degree)]) < 1e-13) --degree;
  if (degree < 1) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  const double lead = coeffs[static_cast<std::size_t>(degree)];
  for (long i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
    if (i + 1 < degree) companion(i + 1, i) = 1.0;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("detector", "stationary_points", "companion eigensolver failed");
  }

  std::vector<double> roots;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> r = es.eigenvalues()(i);
    if (std::abs(r.imag()) <= 1e-8 * (1.0 + std::abs(r.real()))) roots.push_back(r.real());
  }
  return roots;
}

// d/dd of line_deriv, used by the Newton polish.
double line_deriv2(double d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < lambda.size(); ++n) {
    const double t = 1.0 + d * lambda(n);
    if (t <= 0.0) return kInf;
    acc += -lambda(n) * lambda(n) / (t * t) + 2.0 * xi(n) * lambda(n) / (t * t * t);
  }
  return acc;
}

void newton_polish(double& d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi) {
  for (int it = 0; it < 3; ++it) {
    const double g = line_deriv(d, lambda, xi);
    const double gp = line_deriv2(d, lambda, xi);
    if (!std::isfinite(g) || !std::isfinite(gp) || gp == 0.0) return;
    const double next = d - g / gp;
    if (!std::isfinite(line_deriv(next, lambda, xi))) return;
    d = next;
  }
}

double bisect_deriv_root(double lo, double hi, double g_lo, const Eigen::VectorXd& lambda,
                         const Eigen::VectorXd& xi) {
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = line_deriv(mid, lambda, xi);
    if (g_mid == 0.0) return mid;
    if ((g_lo < 0.0) == (g_mid < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Log-spaced magnitudes on both sides of zero covering [d_lo, d_hi],
// endpoints and zero included, ascending.
std::vector<double> log_grid(double d_lo, double d_hi, Eigen::Index N) {
  const int per_decade = std::max<int>(4 * static_cast<int>(N), 8);
  const double decades = 9.0;  // smallest magnitude = |bound| * 1e-9
  std::vector<double> pts{0.0};
  for (const double bound : {d_lo, d_hi}) {
    const double mag = std::abs(bound);
    if (mag <= 0.0) continue;
    const int steps = static_cast<int>(decades * per_decade);
    const double lo = mag * 1e-9;
    for (int i = 0; i <= steps; ++i) {
      const double m = lo * std::pow(mag / lo, static_cast<double>(i) / steps);
      pts.push_back(bound < 0.0 ? -m : m);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::erase_if(pts, [&](double d) { return d < d_lo || d > d_hi; });
  return pts;
}

double golden_section(double lo, double hi, const Eigen::VectorXd& lambda,
                      const Eigen::VectorXd& xi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = line_cost(c, lambda, xi);
  double fd = line_cost(d, lambda, xi);
  for (int it = 0; it < 120 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = line_cost(c, lambda, xi);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = line_cost(d, lambda, xi);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

GammaConstraint GammaConstraint::nonnegative() { return {ConstraintKind::kNonnegative, {}}; }

GammaConstraint GammaConstraint::box(Eigen::VectorXd beta) {
  return {ConstraintKind::kBox, std::move(beta)};
}

GammaConstraint GammaConstraint::box_uniform(double beta, int K) {
  return {ConstraintKind::kBox, Eigen::VectorXd::Constant(K, beta)};
}

EffectivePilotSet effective_pilots(const Eigen::MatrixXcd& pilots,
                                   const Eigen::MatrixXcd& basis_cols) {
  if (pilots.rows() != basis_cols.rows()) {
    throw std::invalid_argument("pilots and basis disagree on L");
  }
  if (pilots.cols() < 1 || basis_cols.cols() < 1) {
    throw std::invalid_argument("need at least one user and one basis column");
  }
  EffectivePilotSet set;
  set.L = static_cast<int>(pilots.rows());
  set.N = static_cast<int>(basis_cols.cols());
  set.S.reserve(static_cast<std::size_t>(pilots.cols()));
  for (Eigen::Index k = 0; k < pilots.cols(); ++k) {
    set.S.push_back(pilots.col(k).asDiagonal() * basis_cols);
  }
  return set;
}

SampleCovariance make_sample_covariance(const Eigen::MatrixXcd& received) {
  if (received.cols() < 1) throw std::invalid_argument("need at least one antenna column");
  SampleCovariance cov;
  cov.M = static_cast<int>(received.cols());
  cov.sigma_hat = (received * received.adjoint()) / static_cast<double>(cov.M);
  cov.sigma_hat = 0.5 * (cov.sigma_hat + cov.sigma_hat.adjoint()).eval();
  return cov;
}

GammaState init_gamma_state(int K, const SampleCovariance& cov, double noise_var,
                            const GammaConstraint& constraint) {
  if (K < 1) throw ConfigError("detector.K", "need at least one user");
  if (!(noise_var > 0.0)) {
    throw ConfigError("detector.noise_var", "must be positive, got " + std::to_string(noise_var));
  }
  if (constraint.kind == ConstraintKind::kBox) {
    if (constraint.beta.size() != K) {
      throw ConfigError("detector.beta", "box needs one upper bound per user (" +
                                             std::to_string(K) + "), got " +
                                             std::to_string(constraint.beta.size()));
    }
    if (!(constraint.beta.minCoeff() > 0.0)) {
      throw ConfigError("detector.beta", "box upper bounds must all be positive");
    }
  }
  const auto L = cov.sigma_hat.rows();
  GammaState state;
  state.gamma = Eigen::VectorXd::Zero(K);
  state.sigma_inv = Eigen::MatrixXcd::Identity(L, L) / noise_var;
  state.cost = static_cast<double>(L) * std::log(noise_var) +
               cov.sigma_hat.trace().real() / noise_var;
  state.noise_var = noise_var;
  state.constraint = constraint;
  return state;
}

double nll_cost(const Eigen::MatrixXcd& sigma, const Eigen::MatrixXcd& sigma_hat) {
  Eigen::LLT<Eigen::MatrixXcd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("detector", "nll_cost", "covariance is not positive definite");
  }
  double logdet = 0.0;
  const auto& chol = llt.matrixLLT();
  for (Eigen::Index i = 0; i < chol.rows(); ++i) logdet += 2.0 * std::log(chol(i, i).real());
  return logdet + llt.solve(sigma_hat).trace().real();
}

void refresh_gamma_state(GammaState& state, const EffectivePilotSet& pilots,
                         const SampleCovariance& cov) {
  const auto L = cov.sigma_hat.rows();
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(L, L);
  sigma.diagonal().setConstant(state.noise_var);
  for (int k = 0; k < pilots.K(); ++k) {
    if (state.gamma(k) != 0.0) {
      sigma.selfadjointView<Eigen::Lower>().rankUpdate(pilots.S[static_cast<std::size_t>(k)],
                                                       state.gamma(k));
    }
  }
  sigma = sigma.selfadjointView<Eigen::Lower>();

  Eigen::LLT<Eigen::MatrixXcd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("detector", "refresh_gamma_state",
                         "covariance lost positive definiteness");
  }
  double logdet = 0.0;
  const auto& chol = llt.matrixLLT();
  for (Eigen::Index i = 0; i < L; ++i) logdet += 2.0 * std::log(chol(i, i).real());
  state.cost = logdet + llt.solve(cov.sigma_hat).trace().real();
  state.sigma_inv = llt.solve(Eigen::MatrixXcd::Identity(L, L));
}

double line_cost(double d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < lambda.size(); ++n) {
    const double t = 1.0 + d * lambda(n);
    if (t <= 0.0) return kInf;
    acc += std::log(t) - d * xi(n) / t;
  }
  return acc;
}

double line_deriv(double d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi) {
  double acc = 0.0;
  for (Eigen::Index n = 0; n < lambda.size(); ++n) {
    const double t = 1.0 + d * lambda(n);
    if (t <= 0.0) return kInf;
    acc += lambda(n) / t - xi(n) / (t * t);
  }
  return acc;
}

std::vector<double> stationary_points(const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi,
                                      double d_lo, double d_hi, RootMode mode) {
  if (lambda.size() != xi.size()) throw std::invalid_argument("lambda/xi size mismatch");
  const auto in_range = [&](double d) { return d >= d_lo && d <= d_hi; };

  std::vector<double> roots;
  if (lambda.size() == 1) {
    // lambda (1 + d lambda) = xi in closed form.
    const double l = lambda(0);
    if (l > 0.0) {
      const double d = (xi(0) - l) / (l * l);
      if (in_range(d)) roots.push_back(d);
    }
    return roots;
  }

  const double lmax = lambda.maxCoeff();
  if (lmax <= 0.0) return roots;  // delta_f is linear; no interior stationary point

  if (mode == RootMode::kCompanion) {
    const std::vector<double> coeffs = stationary_poly_scaled(lambda, xi, lmax);
    for (double u : companion_real_roots(coeffs)) {
      double d = u / lmax;
      newton_polish(d, lambda, xi);
      if (in_range(d)) roots.push_back(d);
    }
  } else {
    const std::vector<double> grid = log_grid(d_lo, d_hi, lambda.size());
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double g0 = line_deriv(grid[i], lambda, xi);
      const double g1 = line_deriv(grid[i + 1], lambda, xi);
      if (!std::isfinite(g0) || !std::isfinite(g1)) continue;
      if (g0 == 0.0) {
        roots.push_back(grid[i]);
      } else if ((g0 < 0.0) != (g1 < 0.0)) {
        double d = bisect_deriv_root(grid[i], grid[i + 1], g0, lambda, xi);
        newton_polish(d, lambda, xi);
        if (in_range(d)) roots.push_back(d);
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) {
                            return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a));
                          }),
              roots.end());
  return roots;
}

CoordinateUpdateWork coordinate_update(GammaState& state, const EffectivePilotSet& pilots,
                                       const SampleCovariance& cov, int k,
                                       const UpdateOptions& options) {
  if (k < 0 || k >= pilots.K()) throw std::invalid_argument("user index out of range");
  const Eigen::MatrixXcd& S = pilots.S[static_cast<std::size_t>(k)];
  const auto L = S.rows();
  const auto N = S.cols();

  // Rank-N pieces: Psi = S^H Sigma^-1 S, B = Sigma^-1 S V, xi = diag(B^H SigmaHat B).
  const Eigen::MatrixXcd W = state.sigma_inv * S;
  Eigen::MatrixXcd psi = S.adjoint() * W;
  psi = 0.5 * (psi + psi.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(psi);
  if (es.info() != Eigen::Success) {
    throw NumericalError("detector", "coordinate_update", "eigendecomposition of Psi failed");
  }
  Eigen::VectorXd lambda = es.eigenvalues().reverse();
  const Eigen::MatrixXcd V = es.eigenvectors().rowwise().reverse();

  const double lmax = std::max(lambda(0), 0.0);
  const double neg_tol = 1e-10 * lmax + 1e-14;
  if (lambda(N - 1) < -neg_tol) {
    throw NumericalError("detector", "coordinate_update",
                         "Psi has a significantly negative eigenvalue; tracked inverse is stale");
  }
  lambda = lambda.cwiseMax(0.0);

  const Eigen::MatrixXcd B = W * V;
  const Eigen::MatrixXcd C = cov.sigma_hat * B;

  CoordinateUpdateWork work;
  work.psi = psi;
  work.V = V;
  work.lambda = lambda;
  work.xi_full = B.adjoint() * C;
  Eigen::VectorXd xi = work.xi_full.diagonal().real().cwiseMax(0.0);
  work.xi = xi;
  work.d_lo = -state.gamma(k);
  if (state.constraint.kind == ConstraintKind::kBox) {
    work.d_hi = state.constraint.beta(k) - state.gamma(k);
  } else {
    work.d_hi = options.d_max_factor * cov.sigma_hat.trace().real() /
                (static_cast<double>(L) * state.noise_var);
  }
  if (work.d_hi < work.d_lo) work.d_hi = work.d_lo;

  work.candidates = stationary_points(lambda, xi, work.d_lo, work.d_hi, options.root_mode);
  work.candidates.push_back(work.d_lo);
  if (0.0 >= work.d_lo && 0.0 <= work.d_hi) work.candidates.push_back(0.0);
  work.candidates.push_back(work.d_hi);
  if (options.root_mode == RootMode::kBracketing) {
    // Insurance against sign changes cancelling between grid points: take
    // the best grid point and polish the bracket around it.
    const std::vector<double> grid = log_grid(work.d_lo, work.d_hi, N);
    std::size_t best = 0;
    double best_cost = kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double c = line_cost(grid[i], lambda, xi);
      if (c < best_cost) {
        best_cost = c;
        best = i;
      }
    }
    if (!grid.empty()) {
      const double lo = grid[best > 0 ? best - 1 : best];
      const double hi = grid[std::min(best + 1, grid.size() - 1)];
      work.candidates.push_back(grid[best]);
      if (hi > lo) work.candidates.push_back(golden_section(lo, hi, lambda, xi));
    }
  }

  // Lowest cost wins; near-exact ties resolve to the smaller |d| so a flat
  // objective leaves gamma_k untouched.
  double best_d = 0.0;
  double best_cost = kInf;
  bool have_best = false;
  for (double d : work.candidates) {
    const double c = line_cost(d, lambda, xi);
    if (!std::isfinite(c)) continue;
    if (!have_best) {
      have_best = true;
      best_d = d;
      best_cost = c;
      continue;
    }
    const double tol = 1e-12 * (1.0 + std::min(std::abs(c), std::abs(best_cost)));
    if (c < best_cost - tol) {
      best_d = d;
      best_cost = c;
    } else if (c <= best_cost + tol && std::abs(d) < std::abs(best_d)) {
      best_d = d;
      best_cost = std::min(best_cost, c);
    }
  }

  // Clamp through the gamma box so the stored iterate and Sigma stay exactly
  // consistent even under floating-point round-off.
  double gamma_new = state.gamma(k) + best_d;
  gamma_new = std::max(gamma_new, 0.0);
  if (state.constraint.kind == ConstraintKind::kBox) {
    gamma_new = std::min(gamma_new, state.constraint.beta(k));
  }
  const double d_applied = gamma_new - state.gamma(k);
  work.d_star = d_applied;
  work.at_cap = state.constraint.kind == ConstraintKind::kNonnegative &&
                work.d_hi > 0.0 && d_applied >= work.d_hi * (1.0 - 1e-12);

  if (d_applied != 0.0) {
    const Eigen::VectorXd denom = (1.0 + d_applied * lambda.array()).matrix();
    if (denom.minCoeff() <= 0.0) {
      throw NumericalError("detector", "coordinate_update",
                           "step left the positive-definite region");
    }
    if (denom.maxCoeff() / denom.minCoeff() > 1e12) {
      // I + d Psi too ill conditioned for a trustworthy inverse downdate.
      state.gamma(k) = gamma_new;
      refresh_gamma_state(state, pilots, cov);
      work.refactorized = true;
    } else {
      state.sigma_inv -= d_applied * (B * denom.cwiseInverse().asDiagonal() * B.adjoint());
      state.sigma_inv = 0.5 * (state.sigma_inv + state.sigma_inv.adjoint()).eval();
      state.cost += line_cost(d_applied, lambda, xi);
      state.gamma(k) = gamma_new;
    }
  }
  return work;
}

DetectionResult run_detection(const EffectivePilotSet& pilots, const SampleCovariance& cov,
                              const DetectorConfig& config) {
  if (pilots.K() < 1) throw ConfigError("detector.K", "need at least one user");
  if (pilots.L != cov.sigma_hat.rows()) {
    throw ConfigError("detector", "pilot length and sample covariance dimension differ");
  }
  if (config.epochs < 1) throw ConfigError("detector.epochs", "must be at least 1");

  GammaState state = init_gamma_state(pilots.K(), cov, config.noise_var, config.constraint);

  DetectionResult result;
  result.initial_cost = state.cost;
  result.epoch_costs.reserve(static_cast<std::size_t>(config.epochs));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng perm_rng(derive_stream(config.rng_seed, {static_cast<std::uint64_t>(epoch)}));
    const std::vector<int> order = random_permutation(pilots.K(), perm_rng);
    for (int k : order) {
      const CoordinateUpdateWork work = coordinate_update(state, pilots, cov, k, config.update);
      ++result.updates;
      if (work.at_cap) ++result.cap_hits;
      if (config.record_trace) {
        result.trace.push_back({epoch, result.updates, k + 1, work.d_star, state.cost});
      }
    }
    refresh_gamma_state(state, pilots, cov);
    result.epoch_costs.push_back(state.cost);
  }
  result.gamma = state.gamma;
  return result;
}

std::vector<int> threshold_activities(const Eigen::VectorXd& gamma, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("activity threshold must be nonnegative");
  std::vector<int> active(static_cast<std::size_t>(gamma.size()));
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    active[static_cast<std::size_t>(k)] = gamma(k) > threshold ? 1 : 0;
  }
  return active;
}

}  // namespace mach
