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

#include <numbers>
#include <optional>

namespace ssml {

/// Principal value of an angle in (-pi, pi].
double wrap_phase(double angle);

/// Compensation-type probe family: the return probability as a function of
/// the physical mismatch theta - theta_tilde, plus its QFI and depth.
class SensingProbe {
 public:
  virtual ~SensingProbe() = default;

  virtual int depth() const = 0;
  virtual double qfi() const = 0;
  virtual double success_prob(double physical_mismatch) const = 0;

  /// 1 - success_prob. Overridden where a cancellation-free form exists.
  virtual double infidelity(double physical_mismatch) const {
    return 1.0 - success_prob(physical_mismatch);
  }

  /// d p_s / d delta when the family has a closed form; callers fall back
  /// to finite differences otherwise.
  virtual std::optional<double> success_prob_derivative(double /*physical_mismatch*/) const {
    return std::nullopt;
  }
};

/// GHZ/NOON probe of depth m: p_s = cos^2(m delta / 2), F_Q = m^2.
class NoonProbe final : public SensingProbe {
 public:
  explicit NoonProbe(int m);

  int depth() const override { return m_; }
  double qfi() const override { return static_cast<double>(m_) * m_; }
  double success_prob(double physical_mismatch) const override;
  double infidelity(double physical_mismatch) const override;
  std::optional<double> success_prob_derivative(double physical_mismatch) const override;

 private:
  int m_;
};

/// A mismatch held in both coordinates; metric == depth * physical.
class Mismatch {
 public:
  static Mismatch from_physical(double physical, int depth) {
    return Mismatch(physical, depth * physical);
  }
  /// The metric value is re-derived from the physical one so the identity
  /// holds exactly in floating point.
  static Mismatch from_metric(double metric, int depth) {
    const double physical = metric / depth;
    return Mismatch(physical, depth * physical);
  }

  double physical() const { return physical_; }
  double metric() const { return metric_; }

 private:
  Mismatch(double physical, double metric) : physical_(physical), metric_(metric) {}
  double physical_;
  double metric_;
};

double success_prob(const SensingProbe& probe, double physical_mismatch);
double infidelity(const SensingProbe& probe, double physical_mismatch);
double qfi(const SensingProbe& probe);

/// Quadratic model F_Q delta^2 / 4 of the infidelity near the optimum.
double local_infidelity_model(double fisher_q, double delta);

}  // namespace ssml
