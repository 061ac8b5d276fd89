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
#include <fstream>

#include "doctest.h"
#include "mach/errors.hpp"
#include "mach/pdp.hpp"
#include "mach/pulse.hpp"
#include "oracles.hpp"

using namespace mach;
using oracles::kPi;

TEST_CASE("rrc_pulse takes its analytic limit at t = 0") {
  for (double b : {0.22, 0.35, 1.0}) {
    CHECK(rrc_pulse(0.0, b) == doctest::Approx(1.0 - b + 4.0 * b / kPi).epsilon(1e-12));
  }
}

TEST_CASE("rrc_pulse takes its analytic limit at the second singularity") {
  for (double b : {0.22, 0.5}) {
    const double t = 1.0 / (4.0 * b);
    const double expected = (b / std::sqrt(2.0)) *
                            ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * b)) +
                             (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * b)));
    CHECK(rrc_pulse(t, b) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(rrc_pulse(-t, b) == doctest::Approx(expected).epsilon(1e-9));
    // The singularity is removable: values just off it agree.
    CHECK(rrc_pulse(t + 1e-9, b) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("rrc_pulse matches quadrature of its own spectrum") {
  for (double b : {0.22, 0.5, 1.0}) {
    for (double t : {0.0, 0.3, 1.1, 2.5, 3.7, 4.9}) {
      const double reference = oracles::rrc_from_spectrum(t, b);
      CHECK(std::abs(rrc_pulse(t, b) - reference) < 1e-6);
    }
  }
}

TEST_CASE("rrc_pulse is even") {
  for (double t : {0.4, 1.3, 2.9}) CHECK(rrc_pulse(t, 0.22) == rrc_pulse(-t, 0.22));
}

TEST_CASE("sampled rrc energy follows the exact fractional-delay ripple") {
  // Poisson summation: sum_l p(l - a)^2 = 1 + (2b/pi) cos(2 pi a), because
  // the squared pulse's spectrum overlaps its unit-shifted copy only in the
  // rolloff band, where the crossterm integrates to b/pi. +-8 lags hold the
  // t^-3 tails below 1e-3.
  for (double b : {0.22, 0.5}) {
    for (double a : {0.0, 0.25, 0.5, 0.77}) {
      double energy = 0.0;
      for (int l = -8; l <= 9; ++l) {
        const double p = rrc_pulse(l - a, b);
        energy += p * p;
      }
      const double expected = 1.0 + (2.0 * b / kPi) * std::cos(2.0 * kPi * a);
      CHECK(energy == doctest::Approx(expected).epsilon(1e-3));
    }
  }
}

TEST_CASE("sinc_pulse is the Kronecker delta on integer lags") {
  CHECK(sinc_pulse(0.0) == 1.0);
  for (int l = 1; l <= 6; ++l) {
    CHECK(std::abs(sinc_pulse(l)) < 1e-12);
    CHECK(std::abs(sinc_pulse(-l)) < 1e-12);
  }
  CHECK(sinc_pulse(0.5) == doctest::Approx(2.0 / kPi).epsilon(1e-12));
}

TEST_CASE("pulse lag window is sized from the profile delay spread") {
  const auto ht = PowerDelayProfile::load(std::string(MACH_DATA_DIR) + "/hilly_terrain.pdp");
  // 50 kHz bandwidth: B * tau_max = 0.9008 -> l_max = ceil(0.9008) + 3 = 4.
  const auto pulse = PulseShape::for_profile(PulseKind::kRootRaisedCosine, 0.22, -3, ht, 50e3);
  CHECK(pulse.l_min() == -3);
  CHECK(pulse.l_max() == 4);
  CHECK(pulse.tap_count() == 8);

  // 70 kHz bandwidth: B * tau_max = 1.26 -> l_max = 2 + 3 = 5, P = 9.
  const auto wide = PulseShape::for_profile(PulseKind::kRootRaisedCosine, 0.22, -3, ht, 70e3);
  CHECK(wide.tap_count() == 9);
}

TEST_CASE("pulse parameters are validated") {
  CHECK_THROWS_AS(PulseShape(PulseKind::kRootRaisedCosine, 0.0, -3, 4), ConfigError);
  CHECK_THROWS_AS(PulseShape(PulseKind::kRootRaisedCosine, 1.5, -3, 4), ConfigError);
  CHECK_THROWS_AS(PulseShape(PulseKind::kRootRaisedCosine, 0.22, 1, 4), ConfigError);
}

TEST_CASE("profile file parsing normalizes powers and skips comments") {
  oracles::TempDir dir("pdp");
  {
    std::ofstream out(dir.file("p.pdp"));
    out << "# two-cluster test profile\n"
        << "\n"
        << "0.0   2.0\n"
        << "1.5e-6 1.0  # inline comment after the columns\n";
  }
  const auto pdp = PowerDelayProfile::load(dir.file("p.pdp"));
  REQUIRE(pdp.size() == 2);
  CHECK(pdp.paths()[0].delay_s == doctest::Approx(0.0));
  CHECK(pdp.paths()[1].delay_s == doctest::Approx(1.5e-6));
  CHECK(pdp.paths()[0].power + pdp.paths()[1].power == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pdp.paths()[0].power == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pdp.max_excess_delay_s() == doctest::Approx(1.5e-6));
}

TEST_CASE("profile validation rejects bad paths and missing files") {
  CHECK_THROWS_AS(PowerDelayProfile::from_paths({}), ConfigError);
  CHECK_THROWS_AS(PowerDelayProfile::from_paths({{-1e-6, 1.0}}), ConfigError);
  CHECK_THROWS_AS(PowerDelayProfile::from_paths({{0.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(PowerDelayProfile::from_paths({{1e-6, 1.0}, {0.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(PowerDelayProfile::load("/nonexistent/file.pdp"), ConfigError);

  oracles::TempDir dir("pdp_bad");
  {
    std::ofstream out(dir.file("bad.pdp"));
    out << "0.0 1.0\n1e-6 not_a_number\n";
  }
  CHECK_THROWS_AS(PowerDelayProfile::load(dir.file("bad.pdp")), ConfigError);
}

TEST_CASE("shipped hilly-terrain profile has the documented shape") {
  const auto ht = PowerDelayProfile::load(std::string(MACH_DATA_DIR) + "/hilly_terrain.pdp");
  REQUIRE(ht.size() == 20);
  CHECK(ht.paths().front().delay_s == doctest::Approx(0.0));
  CHECK(ht.max_excess_delay_s() == doctest::Approx(18.016e-6).epsilon(1e-9));
  double total = 0.0;
  double early = 0.0;  // first cluster, delays below 1 us
  for (const auto& p : ht.paths()) {
    total += p.power;
    if (p.delay_s < 1e-6) early += p.power;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // The profile is dominated by its early cluster with a weak far echo.
  CHECK(early > 0.9);
  CHECK(early < 1.0);
}

TEST_CASE("shipped two-path profile splits power 60/40") {
  const auto tp = PowerDelayProfile::load(std::string(MACH_DATA_DIR) + "/twopath.pdp");
  REQUIRE(tp.size() == 2);
  CHECK(tp.paths()[0].power == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(tp.paths()[1].power == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(tp.max_excess_delay_s() == doctest::Approx(20e-6));
}
