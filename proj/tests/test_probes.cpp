// Copyright 2026 The ssml-sense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles/mpfr_oracle.hpp"
#include "ssml/probes.hpp"

using namespace ssml;
constexpr double kPi = std::numbers::pi;

TEST_CASE("NOON success probability examples") {
  CHECK(success_prob(NoonProbe(8), 0.0) == 1.0);
  CHECK(success_prob(NoonProbe(2), kPi / 2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(success_prob(NoonProbe(4), kPi / 8) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(NoonProbe(0), std::invalid_argument);
}

TEST_CASE("NOON infidelity examples") {
  CHECK(infidelity(NoonProbe(1), 0.0) == 0.0);
  CHECK(infidelity(NoonProbe(8), kPi / 8) == doctest::Approx(1.0).epsilon(1e-15));
  const double eps = infidelity(NoonProbe(8), 1e-3);
  CHECK(std::abs(eps - 16e-6) <= 1e-9);
  // Against a 256-bit evaluation of 1 - cos^2.
  CHECK(eps == doctest::Approx(oracle::noon_infidelity(8, 1e-3)).epsilon(1e-13));
}

TEST_CASE("QFI of a NOON probe is m^2") {
  CHECK(qfi(NoonProbe(1)) == 1.0);
  CHECK(qfi(NoonProbe(2)) == 4.0);
  CHECK(qfi(NoonProbe(8)) == 64.0);
}

TEST_CASE("local infidelity model") {
  CHECK(local_infidelity_model(37.0, 0.0) == 0.0);
  CHECK(local_infidelity_model(4.0, 0.1) == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("quadratic model error is fourth order on a log grid") {
  for (int m : {1, 2, 4, 8}) {
    const NoonProbe probe(m);
    const double fq = probe.qfi();
    for (int k = 0; k <= 60; ++k) {
      const double delta = std::pow(10.0, -6.0 + 5.0 * k / 60.0) / m;  // m delta <= 0.1
      const double exact = oracle::noon_infidelity(m, delta);
      const double diff = exact - local_infidelity_model(fq, delta);
      CHECK(std::abs(diff) <= fq * fq * std::pow(delta, 4));
      CHECK(std::abs(infidelity(probe, delta) - exact) <= 1e-15 * std::max(exact, 1e-300) + 1e-300);
    }
  }
}

TEST_CASE("wrap_phase convention (-pi, pi]") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(3 * kPi) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(wrap_phase(-kPi - 1e-6) == doctest::Approx(kPi - 1e-6).epsilon(1e-14));
  CHECK(wrap_phase(-kPi) == kPi);
  CHECK(wrap_phase(kPi) == kPi);
  for (int i = -2000; i <= 2000; ++i) {
    const double a = 0.0173 * i * i * (i < 0 ? -1 : 1);
    const double w = wrap_phase(a);
    CHECK(w > -kPi);
    CHECK(w <= kPi);
    CHECK(wrap_phase(w) == w);
    CHECK(std::remainder(a - w, 2 * kPi) == doctest::Approx(0.0).epsilon(1e-9).scale(1 + std::abs(a)));
  }
}

TEST_CASE("landscape structure: normalization, evenness, period, metric collapse") {
  for (int m : {1, 2, 3, 4, 8}) {
    const NoonProbe probe(m);
    const NoonProbe unit(1);
    const double period = 2 * kPi / m;
    for (int i = -400; i <= 400; ++i) {
      const double d = 0.01 * i;
      const double p = probe.success_prob(d);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      CHECK(probe.success_prob(-d) == p);
      CHECK(probe.success_prob(d + period) == doctest::Approx(p).epsilon(1e-12).scale(1.0));
      CHECK(unit.success_prob(m * d) == doctest::Approx(p).epsilon(1e-15).scale(1.0));
      if ((m & (m - 1)) == 0) CHECK(unit.success_prob(m * d) == p);
    }
  }
}

TEST_CASE("Mismatch keeps metric == depth * physical") {
  const auto a = Mismatch::from_physical(0.125, 8);
  CHECK(a.metric() == 1.0);
  for (int m : {1, 3, 7, 8}) {
    for (double x : {0.1, -2.7, 1e-9, 3.0}) {
      const auto b = Mismatch::from_metric(x, m);
      CHECK(b.metric() == m * b.physical());
      CHECK(b.metric() == doctest::Approx(x).epsilon(1e-15));
    }
  }
}
