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

#include "ssml/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssml/probes.hpp"

namespace ssml {

void ProtocolParams::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("step amplitude a must be > 0");
  if (!(b >= 0.0)) throw std::invalid_argument("step exponent b must be >= 0");
  if (m_halt < 1) throw std::invalid_argument("m_halt must be >= 1");
  if (clip && !(*clip >= 0.0)) throw std::invalid_argument("clip half-width must be >= 0");
}

double step_size(const ProtocolParams& params, int m_s_prev) {
  if (params.b == 0.0) return params.a;
  return params.a * std::pow(static_cast<double>(m_s_prev) + 1.0, -params.b);
}

double constrain(const ProtocolParams& params, double x) {
  if (params.wrap) x = wrap_phase(x);
  if (params.clip) x = std::clamp(x, -*params.clip, *params.clip);
  return x;
}

BudgetExhausted::BudgetExhausted(ControllerState partial, std::int64_t failures)
    : std::runtime_error("shot budget exhausted after " + std::to_string(partial.n) +
                         " shots without a full run (m_s = " + std::to_string(partial.m_s) + ")"),
      partial_(partial),
      failures_(failures) {}

namespace detail {
void throw_bad_probability(double p, double x) {
  std::ostringstream os;
  os.precision(17);
  os << "success probability " << p << " at x = " << x << " is outside [0, 1]";
  throw ProbeError(os.str());
}
}  // namespace detail

}  // namespace ssml
