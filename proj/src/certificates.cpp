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

#include "ssml/certificates.hpp"

#include <cmath>
#include <sstream>

namespace ssml {
namespace {

void require_probability(double eps, const char* what) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    std::ostringstream os;
    os << what << " must lie in [0, 1], got " << eps;
    throw std::invalid_argument(os.str());
  }
}

void require_run_length(int m_halt) {
  if (m_halt < 1) throw std::invalid_argument("m_halt must be >= 1");
}

void require_significance(double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw std::invalid_argument("significance eta must lie in (0, 1]");
}

void require_fisher(double fisher_q) {
  if (!(fisher_q > 0.0)) throw std::invalid_argument("Fisher information must be > 0");
}

}  // namespace

double run_probability(double eps, int m_halt) {
  require_probability(eps, "infidelity");
  require_run_length(m_halt);
  return std::pow(1.0 - eps, m_halt);
}

// (1 - eps)^M is decreasing in eps, so the supremum over eps >= eps0 sits at eps0.
double null_bound(double eps0, int m_halt) { return run_probability(eps0, m_halt); }

double cert_scale(int m_halt, double eta) {
  require_run_length(m_halt);
  require_significance(eta);
  // 1 - exp(ln(eta) / M) without cancellation for large M.
  return -std::expm1(std::log(eta) / m_halt);
}

double cert_scale_asymptotic(int m_halt, double eta) {
  require_run_length(m_halt);
  require_significance(eta);
  return -std::log(eta) / m_halt;
}

double param_certificate(int m_halt, double eta, double fisher_q) {
  require_fisher(fisher_q);
  return 2.0 / std::sqrt(fisher_q) * std::sqrt(cert_scale(m_halt, eta));
}

Certificate Certificate::make(int m_halt, double eta, std::optional<double> fisher_q) {
  Certificate c;
  c.m_halt = m_halt;
  c.significance = eta;
  c.eps_cert = cert_scale(m_halt, eta);
  if (fisher_q) c.param_cert = param_certificate(m_halt, eta, *fisher_q);
  return c;
}

double monitored_infidelity(int m_s) {
  if (m_s < 0) throw std::invalid_argument("counter must be >= 0");
  return 1.0 / (1.0 + m_s);
}

double monitored_param(int m_s, double fisher_q) {
  require_fisher(fisher_q);
  if (m_s < 0) throw std::invalid_argument("counter must be >= 0");
  return 2.0 / std::sqrt(fisher_q) / std::sqrt(1.0 + m_s);
}

double expected_run_length(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("infidelity must lie in (0, 1]");
  return (1.0 - eps) / eps;
}

double classical_fisher(double p, double dp) { return classical_fisher(p, 1.0 - p, dp); }

double classical_fisher(double p, double one_minus_p, double dp) {
  if (!(p > 0.0 && one_minus_p > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "one-bit Fisher information is 0/0 at p = " << p;
    throw DegenerateFisher(os.str());
  }
  return dp * dp / (p * one_minus_p);
}

double classical_fisher_limit(const SensingProbe& probe) { return probe.qfi(); }

std::vector<FisherRow> fisher_matching_curve(const SensingProbe& probe,
                                             std::span<const double> delta_grid) {
  std::vector<FisherRow> rows;
  rows.reserve(delta_grid.size());
  const double f_q = probe.qfi();
  for (double delta : delta_grid) {
    FisherRow row{delta, 0.0, f_q};
    if (delta == 0.0) {
      row.i_cl = classical_fisher_limit(probe);
    } else {
      const double p = probe.success_prob(delta);
      const double q = probe.infidelity(delta);
      double dp;
      if (auto analytic = probe.success_prob_derivative(delta)) {
        dp = *analytic;
      } else {
        const double h = kFiniteDifferenceStep;
        dp = (probe.success_prob(delta + h) - probe.success_prob(delta - h)) / (2.0 * h);
      }
      row.i_cl = classical_fisher(p, q, dp);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ssml
