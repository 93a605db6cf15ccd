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

#include "ssml/probes.hpp"

#include <cmath>
#include <stdexcept>

namespace ssml {

double wrap_phase(double angle) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (angle > -kPi && angle <= kPi) return angle;
  double r = std::remainder(angle, kTwoPi);  // in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

NoonProbe::NoonProbe(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("NOON depth must be >= 1");
}

double NoonProbe::success_prob(double physical_mismatch) const {
  const double c = std::cos(0.5 * m_ * physical_mismatch);
  return c * c;
}

double NoonProbe::infidelity(double physical_mismatch) const {
  const double s = std::sin(0.5 * m_ * physical_mismatch);
  return s * s;
}

std::optional<double> NoonProbe::success_prob_derivative(double physical_mismatch) const {
  return -0.5 * m_ * std::sin(m_ * physical_mismatch);
}

double success_prob(const SensingProbe& probe, double physical_mismatch) {
  return probe.success_prob(physical_mismatch);
}

double infidelity(const SensingProbe& probe, double physical_mismatch) {
  return probe.infidelity(physical_mismatch);
}

double qfi(const SensingProbe& probe) { return probe.qfi(); }

double local_infidelity_model(double fisher_q, double delta) {
  return 0.25 * fisher_q * delta * delta;
}

}  // namespace ssml
