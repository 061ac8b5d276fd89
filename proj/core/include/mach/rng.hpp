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
// Splittable, reproducible random streams.
//
// Every consumer of randomness (a user/antenna/path triple, a trial, the
// pilot matrix, ...) gets its own stream whose seed is derived from the
// master seed and a fixed integer path. Draws are therefore independent of
// evaluation order and of how work is split across threads, and growing K
// or M never reshuffles the draws of existing streams.
//
// Normal variates use an explicit Box–Muller transform instead of
// std::normal_distribution, whose draw sequence is implementation-defined;
// mt19937_64 itself is pinned by the standard, so streams are reproducible
// across compilers.

#ifndef MACH_RNG_HPP
#define MACH_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace mach {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a decorrelated stream seed from a master seed and an integer
// path, e.g. derive_stream(seed, {kTagChannel, trial, k, m, path}).
// Sequential mixing makes the fold order-sensitive, so permuted paths give
// unrelated streams.
std::uint64_t derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

// Domain separation tags for the top-level stream split.
namespace stream_tag {
inline constexpr std::uint64_t kChannel = 0x01;
inline constexpr std::uint64_t kPilot = 0x02;
inline constexpr std::uint64_t kActivity = 0x03;
inline constexpr std::uint64_t kNoise = 0x04;
inline constexpr std::uint64_t kDetector = 0x05;
inline constexpr std::uint64_t kTrain = 0x06;
}  // namespace stream_tag

class Rng {
 public:
  explicit Rng(std::uint64_t stream_seed) : eng_(stream_seed) {}

  std::uint64_t u64() { return eng_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box–Muller; the second variate of each pair is
  // cached, so draws come in a fixed deterministic sequence.
  double normal();

  // Circularly-symmetric complex normal CN(0, 1).
  std::complex<double> cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * 0.7071067811865476, im * 0.7071067811865476};
  }

  // Unbiased uniform integer in [0, n), rejection sampled.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Deterministic Fisher–Yates permutation of {0, ..., n-1}. std::shuffle is
// not used because its engine-consumption pattern is implementation-defined.
std::vector<int> random_permutation(int n, Rng& rng);

}  // namespace mach

#endif  // MACH_RNG_HPP
