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

#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>

#include "ssml/rng.hpp"

namespace ssml {

/// Controller constants: step law omega = a (M_S + 1)^(-b), halting run
/// length, and the post-update interval policy.
struct ProtocolParams {
  double a = 0.3;
  double b = 0.5;
  int m_halt = 20;
  /// Symmetric clip half-width applied after every failure update.
  std::optional<double> clip;
  /// Reduce x to (-pi, pi] after every failure update.
  bool wrap = false;

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct ControllerState {
  double x = 0.0;        ///< mismatch coordinate
  int m_s = 0;           ///< consecutive successes
  std::int64_t n = 0;    ///< shots consumed
};

struct ShotOutcome {
  bool success = false;
  double step_applied = 0.0;  ///< omega * r before clip/wrap; zero on success
};

struct TrajectoryRecord {
  std::int64_t halt_time = 0;
  double terminal_x = 0.0;
  double terminal_infidelity = 0.0;
  std::int64_t failures = 0;
};

/// A success landscape maps the mismatch coordinate to a probability.
template <typename F>
concept SuccessLandscape = std::regular_invocable<const F&, double> &&
    std::convertible_to<std::invoke_result_t<const F&, double>, double>;

/// Raised when a landscape returns a value outside [0, 1].
class ProbeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by run_to_halt when the shot budget ends before a full run.
class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(ControllerState partial, std::int64_t failures);
  const ControllerState& partial_state() const noexcept { return partial_; }
  std::int64_t failures() const noexcept { return failures_; }

 private:
  ControllerState partial_;
  std::int64_t failures_;
};

/// Partial state of a trajectory that did not halt within its budget.
struct ExhaustedRun {
  ControllerState state;
  std::int64_t failures = 0;
};

inline constexpr std::int64_t kDefaultMaxShots = 1'000'000;

/// omega = a (m_s_prev + 1)^(-b).
double step_size(const ProtocolParams& params, int m_s_prev);

/// Apply the clip/wrap policy of `params` to a freshly updated x.
double constrain(const ProtocolParams& params, double x);

namespace detail {
[[noreturn]] void throw_bad_probability(double p, double x);
}  // namespace detail

/// One shot: Bernoulli draw at the current x, then the success-frozen /
/// failure-randomized update. The step uses the counter held before the
/// failing shot resets it.
template <SuccessLandscape F>
std::pair<ControllerState, ShotOutcome> step(ControllerState state,
                                             const ProtocolParams& params,
                                             const F& success_prob_at, Rng& rng) {
  const double p = success_prob_at(state.x);
  if (!(p >= 0.0 && p <= 1.0)) detail::throw_bad_probability(p, state.x);

  ShotOutcome out;
  ++state.n;
  if (rng.uniform01() < p) {
    out.success = true;
    ++state.m_s;
    return {state, out};
  }
  const double omega = step_size(params, state.m_s);
  const double r = rng.uniform_sym();
  out.step_applied = omega * r;
  state.x = constrain(params, state.x + out.step_applied);
  state.m_s = 0;
  return {state, out};
}

/// Iterate `step` until m_s reaches m_halt or the budget runs out.
template <SuccessLandscape F>
std::variant<TrajectoryRecord, ExhaustedRun> try_run_to_halt(
    double x0, const ProtocolParams& params, const F& success_prob_at, Rng& rng,
    std::int64_t max_shots = kDefaultMaxShots) {
  params.validate();
  if (max_shots < params.m_halt)
    throw std::invalid_argument("max_shots must be >= m_halt");

  ControllerState state{x0, 0, 0};
  std::int64_t failures = 0;
  while (state.m_s < params.m_halt) {
    if (state.n >= max_shots) return ExhaustedRun{state, failures};
    ShotOutcome out;
    std::tie(state, out) = step(state, params, success_prob_at, rng);
    if (!out.success) ++failures;
  }
  TrajectoryRecord rec;
  rec.halt_time = state.n;
  rec.terminal_x = state.x;
  rec.terminal_infidelity = 1.0 - static_cast<double>(success_prob_at(state.x));
  rec.failures = failures;
  return rec;
}

/// Throwing form of try_run_to_halt.
template <SuccessLandscape F>
TrajectoryRecord run_to_halt(double x0, const ProtocolParams& params,
                             const F& success_prob_at, Rng& rng,
                             std::int64_t max_shots = kDefaultMaxShots) {
  auto res = try_run_to_halt(x0, params, success_prob_at, rng, max_shots);
  if (auto* ex = std::get_if<ExhaustedRun>(&res)) throw BudgetExhausted(ex->state, ex->failures);
  return std::get<TrajectoryRecord>(res);
}

}  // namespace ssml
