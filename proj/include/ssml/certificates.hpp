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

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ssml/probes.hpp"

namespace ssml {

/// Probability of a specific run of m_halt successes at fixed infidelity.
double run_probability(double eps, int m_halt);

/// Largest run probability compatible with the null eps >= eps0.
double null_bound(double eps0, int m_halt);

/// Certified infidelity scale 1 - eta^(1/m_halt). Throws on eta outside (0, 1].
double cert_scale(int m_halt, double eta);

/// Leading-order form ln(1/eta) / m_halt.
double cert_scale_asymptotic(int m_halt, double eta);

/// (2 / sqrt(F_Q)) sqrt(cert_scale(m_halt, eta)).
double param_certificate(int m_halt, double eta, double fisher_q);

struct Certificate {
  int m_halt = 1;
  double significance = 0.05;
  double eps_cert = 0.0;
  std::optional<double> param_cert;

  static Certificate make(int m_halt, double eta, std::optional<double> fisher_q = std::nullopt);
};

/// Counter-based infidelity proxy (1 + m_s)^-1.
double monitored_infidelity(int m_s);

/// (2 / sqrt(F_Q)) (1 + m_s)^(-1/2).
double monitored_param(int m_s, double fisher_q);

/// Mean run length (1 - eps) / eps before a failure at frozen control.
double expected_run_length(double eps);

/// Thrown by classical_fisher at p in {0, 1}, where the one-bit Fisher
/// information is 0/0. See classical_fisher_limit.
class DegenerateFisher : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fisher information of one Bernoulli outcome: dp^2 / (p (1 - p)).
double classical_fisher(double p, double dp);

/// Same quantity with 1 - p supplied separately, avoiding cancellation when
/// p is close to one.
double classical_fisher(double p, double one_minus_p, double dp);

/// Value a compensation family's one-bit Fisher information tends to at the
/// lock point: the probe QFI.
double classical_fisher_limit(const SensingProbe& probe);

struct FisherRow {
  double delta = 0.0;
  double i_cl = 0.0;
  double f_q = 0.0;
};

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// I_cl(delta) for each grid point next to the probe QFI. Rows at exact
/// degeneracies with delta == 0 take the limit value; other degenerate
/// points throw DegenerateFisher.
std::vector<FisherRow> fisher_matching_curve(const SensingProbe& probe,
                                             std::span<const double> delta_grid);

}  // namespace ssml
