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
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssml/protocol.hpp"
#include "ssml/stats.hpp"

namespace ssml {

enum class Dataset { Local, Global, Multiscale };

std::string_view to_string(Dataset d);
Dataset dataset_from_string(std::string_view s);

/// Success probability as a function of the metric coordinate x.
using MetricLandscape = std::function<double(double)>;

inline constexpr std::uint64_t kDefaultSeed = 20260415;

/// Branch-resolved fixed-depth sweep over (m, M_H).
struct LocalConfig {
  std::vector<int> depths{1, 2, 4, 8};
  std::vector<int> halts{20, 40, 80, 160, 320, 640};
  int trials = 10'000;
  double a = 0.3;
  double b = 0.5;
  double clip_halfwidth = std::numbers::pi / 2;
  std::uint64_t master_seed = kDefaultSeed;
  std::int64_t max_shots = kDefaultMaxShots;
  /// Significance used for the per-cell certificate-exceedance count.
  double cert_eta = 0.05;
  /// Per-trial streams keyed by (M_H, trial) only, so every depth replays
  /// the same metric trajectories. When false, m joins the key.
  bool share_streams = true;

  void validate() const;
  bool operator==(const LocalConfig&) const = default;
};

/// Single-scale sweep with a global prior and wrapped mismatch.
struct GlobalConfig {
  int depth = 8;
  std::vector<int> halts{20, 40, 80, 160, 320, 640};
  int trials = 10'000;
  double a = 0.3;
  double b = 0.5;
  /// Physical prior half-width; pi is the global prior U[-pi, pi).
  double prior_halfwidth = std::numbers::pi;
  std::uint64_t master_seed = kDefaultSeed;
  std::int64_t max_shots = kDefaultMaxShots;
  double cert_eta = 0.05;

  void validate() const;
  bool operator==(const GlobalConfig&) const = default;
};

/// Coarse-to-fine hand-off with m_j = 2^j and a fixed per-stage M_H.
struct MultiscaleConfig {
  int max_stage = 7;
  int m_halt = 320;
  int trials = 10'000;
  double a = 0.3;
  double b = 0.5;
  double clip_halfwidth = std::numbers::pi / 2;
  std::uint64_t master_seed = kDefaultSeed;
  std::int64_t max_shots = kDefaultMaxShots;

  void validate() const;
  bool operator==(const MultiscaleConfig&) const = default;
};

/// Statistics of one (dataset, m, M_H) cell, over halted trials only.
struct CellResult {
  Dataset dataset = Dataset::Local;
  int m = 1;
  int m_halt = 1;
  int trials = 0;
  int halted = 0;
  int exhausted = 0;
  double nu = 0.0;
  double nu_stderr = 0.0;
  double r_total = 0.0;  ///< m * nu
  double mean_eps = 0.0;
  double eps_stderr = 0.0;
  double rmse_theta = 0.0;
  double rmse_stderr = 0.0;
  /// Halted trials whose terminal infidelity exceeds cert_scale(M_H, eta).
  int cert_exceed = 0;
  double cert_eta = 0.05;
};

struct StageSummary {
  int stage = 0;
  int m = 1;
  double t_mean = 0.0;
  double r_mean = 0.0;  ///< m * t_mean
};

struct MultiscaleResult {
  int max_stage = 0;  ///< J
  int m_halt = 0;
  int trials = 0;
  int halted = 0;
  int exhausted = 0;
  double r_tot_mean = 0.0;
  double r_tot_stderr = 0.0;
  double rmse_final = 0.0;
  double rmse_stderr = 0.0;
  std::vector<StageSummary> stages;
};

std::vector<CellResult> run_local_fixed_depth(const LocalConfig& config, int threads = 1);
/// Same sweep with a caller-supplied metric landscape (default cos^2(x/2)).
std::vector<CellResult> run_local_fixed_depth(const LocalConfig& config,
                                              const MetricLandscape& landscape, int threads = 1);

std::vector<CellResult> run_global_aliasing(const GlobalConfig& config, int threads = 1);
/// `landscape` receives the physical mismatch.
std::vector<CellResult> run_global_aliasing(const GlobalConfig& config,
                                            const MetricLandscape& landscape, int threads = 1);

/// One result per J in [0, max_stage]. Each trial runs all stages once and
/// the result for J uses its first J + 1 stages.
std::vector<MultiscaleResult> run_multiscale(const MultiscaleConfig& config, int threads = 1);

/// Efficient-estimator scale 1 / (m sqrt(nu)).
double crb_overlay(int m, double nu);

// Scaling-law summaries over experiment tables.

struct DepthFit {
  int m = 1;
  FitResult fit;
};

struct GainFit {
  double r_ref = 0.0;  ///< total resource at which depths are compared
  FitResult fit;       ///< sqrt(R) * rmse versus m
};

struct LocalSummary {
  std::optional<FitResult> eps_vs_nu;     ///< all cells pooled
  std::vector<DepthFit> rmse_vs_r;        ///< per depth, full M_H grid
  std::vector<DepthFit> rmse_vs_r_upper;  ///< per depth, top half of the M_H grid
  double rmse_vs_r_mean_slope = std::nan("");  ///< mean of per-depth full-grid slopes
  std::vector<GainFit> gain;              ///< at log-spaced R in the common range
  double gain_mean_slope = std::nan("");
  /// Every entangled cell inside the m = 1 resource range lies below the
  /// interpolated m = 1 curve.
  bool entangled_below_product = false;
};

// Fits are absent when fewer than two cells carry data.
struct GlobalSummary {
  std::optional<FitResult> eps_vs_r;
  std::optional<FitResult> rmse_vs_r;
  std::optional<FitResult> rmse_vs_r_upper;  ///< top half of the M_H grid
};

LocalSummary summarize_local(const std::vector<CellResult>& cells);
GlobalSummary summarize_global(const std::vector<CellResult>& cells);
std::optional<FitResult> summarize_multiscale(const std::vector<MultiscaleResult>& results);

/// Piecewise log-log interpolation of rmse_theta versus r_total over the
/// cells of one depth (sorted by r_total). Empty outside the sampled range.
std::optional<double> interpolate_rmse(const std::vector<CellResult>& cells, int m, double r);

}  // namespace ssml
