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

#include "ssml/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ssml/certificates.hpp"
#include "ssml/parallel.hpp"
#include "ssml/probes.hpp"

namespace ssml {
namespace {

constexpr double kPi = std::numbers::pi;
// Branch-resolved prior on the metric coordinate: x0 ~ U[-pi/2, pi/2].
constexpr double kBranchHalfwidth = kPi / 2;

// Stream keys. Local and multiscale share (M_H, trial) so that stage 0 of a
// multiscale trial replays the matching local m = 1 trajectory.
constexpr std::uint64_t kGlobalStream = 0x676c6f62616cULL;
constexpr std::uint64_t kDepthKeyOffset = 1ULL << 32;

struct TrialOutcome {
  bool halted = false;
  std::int64_t halt_time = 0;
  double eps = 0.0;
  double error = 0.0;  // physical phase error
};

double cos2_half(double x) {
  const double c = std::cos(0.5 * x);
  return c * c;
}

void require_grid(const std::vector<int>& grid, const char* name, int min_value) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
  for (int v : grid)
    if (v < min_value)
      throw std::invalid_argument(std::string(name) + " grid entries must be >= " +
                                  std::to_string(min_value));
}

void require_common(int trials, double a, double b, std::int64_t max_shots) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("a must be > 0");
  if (!(b >= 0.0)) throw std::invalid_argument("b must be >= 0");
  if (max_shots < 1) throw std::invalid_argument("max_shots must be >= 1");
}

void require_eta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("cert_eta must lie in (0, 1)");
}

// Aggregates halted trials in trial-index order.
CellResult aggregate(Dataset dataset, int m, int m_halt, double cert_eta,
                     const std::vector<TrialOutcome>& outcomes) {
  CellResult cell;
  cell.dataset = dataset;
  cell.m = m;
  cell.m_halt = m_halt;
  cell.trials = static_cast<int>(outcomes.size());
  cell.cert_eta = cert_eta;

  std::vector<double> times, eps, errors;
  times.reserve(outcomes.size());
  eps.reserve(outcomes.size());
  errors.reserve(outcomes.size());
  const double eps_cert = cert_scale(m_halt, cert_eta);
  for (const auto& o : outcomes) {
    if (!o.halted) {
      ++cell.exhausted;
      continue;
    }
    times.push_back(static_cast<double>(o.halt_time));
    eps.push_back(o.eps);
    errors.push_back(o.error);
    if (o.eps > eps_cert) ++cell.cert_exceed;
  }
  cell.halted = static_cast<int>(times.size());
  if (times.empty()) {
    cell.nu = cell.nu_stderr = cell.r_total = std::nan("");
    cell.mean_eps = cell.eps_stderr = cell.rmse_theta = cell.rmse_stderr = std::nan("");
    return cell;
  }
  const auto t = mean_stderr(times);
  const auto e = mean_stderr(eps);
  const auto r = rmse_stderr(errors);
  cell.nu = t.mean;
  cell.nu_stderr = t.std_error;
  cell.r_total = m * t.mean;
  cell.mean_eps = e.mean;
  cell.eps_stderr = e.std_error;
  cell.rmse_theta = r.mean;
  cell.rmse_stderr = r.std_error;
  return cell;
}

template <typename Landscape>
std::vector<CellResult> local_impl(const LocalConfig& config, const Landscape& landscape,
                                   int threads) {
  config.validate();
  std::vector<CellResult> cells;
  std::vector<TrialOutcome> outcomes(config.trials);
  for (int m : config.depths) {
    for (int m_halt : config.halts) {
      ProtocolParams params;
      params.a = config.a;
      params.b = config.b;
      params.m_halt = m_halt;
      params.clip = config.clip_halfwidth;
      parallel_for(outcomes.size(), threads, [&](std::size_t trial) {
        const std::uint64_t seed =
            config.share_streams
                ? derive_seed(config.master_seed, {std::uint64_t(m_halt), trial})
                : derive_seed(config.master_seed,
                              {std::uint64_t(m_halt), trial, kDepthKeyOffset + m});
        Rng rng(seed);
        const double x0 = kBranchHalfwidth * rng.uniform_sym();
        auto res = try_run_to_halt(x0, params, landscape, rng, config.max_shots);
        TrialOutcome o;
        if (const auto* rec = std::get_if<TrajectoryRecord>(&res)) {
          o.halted = true;
          o.halt_time = rec->halt_time;
          o.eps = rec->terminal_infidelity;
          o.error = rec->terminal_x / m;
        }
        outcomes[trial] = o;
      });
      cells.push_back(aggregate(Dataset::Local, m, m_halt, config.cert_eta, outcomes));
    }
  }
  return cells;
}

template <typename Landscape>
std::vector<CellResult> global_impl(const GlobalConfig& config, const Landscape& landscape,
                                    int threads) {
  config.validate();
  const int m = config.depth;
  std::vector<CellResult> cells;
  std::vector<TrialOutcome> outcomes(config.trials);
  for (int m_halt : config.halts) {
    // The controller coordinate here is the physical mismatch theta - theta_tilde,
    // so the step is a / m and wrapping is modulo 2 pi. The update moves the
    // mismatch by +omega r; r is symmetric, so this is the same law as moving
    // theta_tilde by +omega r.
    ProtocolParams params;
    params.a = config.a / m;
    params.b = config.b;
    params.m_halt = m_halt;
    params.wrap = true;
    parallel_for(outcomes.size(), threads, [&](std::size_t trial) {
      Rng rng(derive_seed(config.master_seed, {kGlobalStream, std::uint64_t(m_halt), trial}));
      const double delta0 = wrap_phase(config.prior_halfwidth * rng.uniform_sym());
      auto res = try_run_to_halt(delta0, params, landscape, rng, config.max_shots);
      TrialOutcome o;
      if (const auto* rec = std::get_if<TrajectoryRecord>(&res)) {
        o.halted = true;
        o.halt_time = rec->halt_time;
        o.eps = rec->terminal_infidelity;
        o.error = wrap_phase(rec->terminal_x);
      }
      outcomes[trial] = o;
    });
    cells.push_back(aggregate(Dataset::Global, m, m_halt, config.cert_eta, outcomes));
  }
  return cells;
}

std::vector<Point> points_of(const std::vector<CellResult>& cells, auto&& pick_x, auto&& pick_y,
                             auto&& keep) {
  std::vector<Point> pts;
  for (const auto& c : cells)
    if (c.halted > 0 && keep(c)) pts.push_back({pick_x(c), pick_y(c)});
  return pts;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Fit when the points support one: positive values and two distinct x.
std::optional<FitResult> try_fit(const std::vector<Point>& pts) {
  std::vector<double> xs;
  for (const auto& p : pts) {
    if (!(p.x > 0.0 && p.y > 0.0)) return std::nullopt;
    xs.push_back(p.x);
  }
  std::sort(xs.begin(), xs.end());
  if (std::unique(xs.begin(), xs.end()) - xs.begin() < 2) return std::nullopt;
  return ols_loglog(pts);
}

// Smallest M_H belonging to the top half of the grid.
int upper_half_threshold(const std::vector<CellResult>& cells) {
  std::vector<int> halts;
  for (const auto& c : cells) halts.push_back(c.m_halt);
  halts = sorted_unique(std::move(halts));
  return halts.empty() ? 0 : halts[halts.size() / 2];
}

}  // namespace

std::string_view to_string(Dataset d) {
  switch (d) {
    case Dataset::Local: return "local";
    case Dataset::Global: return "global";
    case Dataset::Multiscale: return "multiscale";
  }
  return "unknown";
}

Dataset dataset_from_string(std::string_view s) {
  if (s == "local") return Dataset::Local;
  if (s == "global") return Dataset::Global;
  if (s == "multiscale") return Dataset::Multiscale;
  throw std::invalid_argument("unknown dataset '" + std::string(s) + "'");
}

void LocalConfig::validate() const {
  require_grid(depths, "depths", 1);
  require_grid(halts, "halts", 1);
  require_common(trials, a, b, max_shots);
  require_eta(cert_eta);
  if (!(clip_halfwidth > 0.0)) throw std::invalid_argument("clip_halfwidth must be > 0");
  for (int h : halts)
    if (max_shots < h) throw std::invalid_argument("max_shots must be >= every M_H");
}

void GlobalConfig::validate() const {
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  require_grid(halts, "halts", 1);
  require_common(trials, a, b, max_shots);
  require_eta(cert_eta);
  if (!(prior_halfwidth > 0.0 && prior_halfwidth <= kPi))
    throw std::invalid_argument("prior_halfwidth must lie in (0, pi]");
  for (int h : halts)
    if (max_shots < h) throw std::invalid_argument("max_shots must be >= every M_H");
}

void MultiscaleConfig::validate() const {
  if (max_stage < 0 || max_stage > 30) throw std::invalid_argument("max_stage must lie in [0, 30]");
  if (m_halt < 1) throw std::invalid_argument("m_halt must be >= 1");
  require_common(trials, a, b, max_shots);
  if (!(clip_halfwidth > 0.0)) throw std::invalid_argument("clip_halfwidth must be > 0");
  if (max_shots < m_halt) throw std::invalid_argument("max_shots must be >= m_halt");
}

std::vector<CellResult> run_local_fixed_depth(const LocalConfig& config, int threads) {
  return local_impl(config, cos2_half, threads);
}

std::vector<CellResult> run_local_fixed_depth(const LocalConfig& config,
                                              const MetricLandscape& landscape, int threads) {
  return local_impl(config, landscape, threads);
}

std::vector<CellResult> run_global_aliasing(const GlobalConfig& config, int threads) {
  const NoonProbe probe(config.depth);
  return global_impl(config, [&probe](double delta) { return probe.success_prob(delta); },
                     threads);
}

std::vector<CellResult> run_global_aliasing(const GlobalConfig& config,
                                            const MetricLandscape& landscape, int threads) {
  return global_impl(config, landscape, threads);
}

std::vector<MultiscaleResult> run_multiscale(const MultiscaleConfig& config, int threads) {
  config.validate();
  const int stages = config.max_stage + 1;

  struct Trial {
    int completed = 0;  // stages that halted
    std::vector<std::int64_t> times;
    std::vector<double> residuals;  // physical residual after each stage
  };
  std::vector<Trial> trials(config.trials);

  ProtocolParams params;
  params.a = config.a;
  params.b = config.b;
  params.m_halt = config.m_halt;
  params.clip = config.clip_halfwidth;

  parallel_for(trials.size(), threads, [&](std::size_t index) {
    Rng rng(derive_seed(config.master_seed, {std::uint64_t(config.m_halt), index}));
    Trial t;
    t.times.reserve(stages);
    t.residuals.reserve(stages);
    double x = kBranchHalfwidth * rng.uniform_sym();
    for (int j = 0; j < stages; ++j) {
      auto res = try_run_to_halt(x, params, cos2_half, rng, config.max_shots);
      const auto* rec = std::get_if<TrajectoryRecord>(&res);
      if (!rec) break;
      ++t.completed;
      t.times.push_back(rec->halt_time);
      t.residuals.push_back(std::ldexp(rec->terminal_x, -j));
      // Ideal branch-resolved hand-off to depth 2^(j+1).
      x = std::clamp(2.0 * rec->terminal_x, -config.clip_halfwidth, config.clip_halfwidth);
    }
    trials[index] = std::move(t);
  });

  std::vector<MultiscaleResult> results;
  for (int J = 0; J < stages; ++J) {
    MultiscaleResult res;
    res.max_stage = J;
    res.m_halt = config.m_halt;
    res.trials = config.trials;

    std::vector<double> r_tot, residual;
    std::vector<double> stage_sum(J + 1, 0.0);
    for (const auto& t : trials) {
      if (t.completed <= J) {
        ++res.exhausted;
        continue;
      }
      double r = 0.0;
      for (int j = 0; j <= J; ++j) {
        stage_sum[j] += static_cast<double>(t.times[j]);
        r += std::ldexp(static_cast<double>(t.times[j]), j);
      }
      r_tot.push_back(r);
      residual.push_back(t.residuals[J]);
    }
    res.halted = static_cast<int>(r_tot.size());
    if (res.halted > 0) {
      double total = 0.0;
      for (int j = 0; j <= J; ++j) {
        StageSummary s;
        s.stage = j;
        s.m = 1 << j;
        s.t_mean = stage_sum[j] / res.halted;
        s.r_mean = s.m * s.t_mean;
        total += s.r_mean;
        res.stages.push_back(s);
      }
      res.r_tot_mean = total;
      res.r_tot_stderr = mean_stderr(r_tot).std_error;
      const auto rm = rmse_stderr(residual);
      res.rmse_final = rm.mean;
      res.rmse_stderr = rm.std_error;
    } else {
      res.r_tot_mean = res.r_tot_stderr = res.rmse_final = res.rmse_stderr = std::nan("");
    }
    results.push_back(std::move(res));
  }
  return results;
}

double crb_overlay(int m, double nu) {
  if (m < 1 || !(nu > 0.0)) throw std::invalid_argument("crb_overlay needs m >= 1 and nu > 0");
  return 1.0 / (m * std::sqrt(nu));
}

std::optional<double> interpolate_rmse(const std::vector<CellResult>& cells, int m, double r) {
  std::vector<Point> curve;
  for (const auto& c : cells)
    if (c.m == m && c.halted > 0 && c.rmse_theta > 0.0) curve.push_back({c.r_total, c.rmse_theta});
  std::sort(curve.begin(), curve.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  if (curve.empty() || r < curve.front().x || r > curve.back().x) return std::nullopt;
  if (curve.size() == 1) return curve.front().y;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (r <= curve[i].x) {
      const auto& lo = curve[i - 1];
      const auto& hi = curve[i];
      if (hi.x == lo.x) return lo.y;
      const double t = std::log(r / lo.x) / std::log(hi.x / lo.x);
      return std::exp(std::log(lo.y) + t * std::log(hi.y / lo.y));
    }
  }
  return curve.back().y;
}

LocalSummary summarize_local(const std::vector<CellResult>& cells) {
  LocalSummary s;
  const auto all = [](const CellResult&) { return true; };
  const auto nu = [](const CellResult& c) { return c.nu; };
  const auto r_total = [](const CellResult& c) { return c.r_total; };
  const auto eps = [](const CellResult& c) { return c.mean_eps; };
  const auto rmse_of = [](const CellResult& c) { return c.rmse_theta; };

  s.eps_vs_nu = try_fit(points_of(cells, nu, eps, all));

  std::vector<int> depths;
  for (const auto& c : cells) depths.push_back(c.m);
  depths = sorted_unique(std::move(depths));
  const int upper = upper_half_threshold(cells);

  double slope_sum = 0.0;
  for (int m : depths) {
    const auto same_depth = [m](const CellResult& c) { return c.m == m; };
    const auto upper_cells = [m, upper](const CellResult& c) { return c.m == m && c.m_halt >= upper; };
    if (auto fit = try_fit(points_of(cells, r_total, rmse_of, same_depth))) {
      s.rmse_vs_r.push_back({m, *fit});
      slope_sum += fit->slope;
    }
    if (auto fit = try_fit(points_of(cells, r_total, rmse_of, upper_cells)))
      s.rmse_vs_r_upper.push_back({m, *fit});
  }
  if (!s.rmse_vs_r.empty()) s.rmse_vs_r_mean_slope = slope_sum / s.rmse_vs_r.size();

  // Compare depths at equal total resource inside the range all depths cover.
  if (depths.size() >= 2) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int m : depths) {
      double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
      for (const auto& c : cells)
        if (c.m == m && c.halted > 0) {
          mn = std::min(mn, c.r_total);
          mx = std::max(mx, c.r_total);
        }
      lo = std::max(lo, mn);
      hi = std::min(hi, mx);
    }
    if (lo < hi) {
      constexpr int kRefPoints = 5;
      double gain_sum = 0.0;
      for (int k = 0; k < kRefPoints; ++k) {
        const double r = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (kRefPoints - 1));
        std::vector<Point> pts;
        for (int m : depths)
          if (auto rm = interpolate_rmse(cells, m, r)) pts.push_back({double(m), std::sqrt(r) * *rm});
        auto fit = try_fit(pts);
        if (!fit) continue;
        s.gain.push_back({r, *fit});
        gain_sum += s.gain.back().fit.slope;
      }
      if (!s.gain.empty()) s.gain_mean_slope = gain_sum / s.gain.size();
    }
  }

  int compared = 0;
  bool below = true;
  for (const auto& c : cells) {
    if (c.m <= 1 || c.halted == 0) continue;
    if (auto ref = interpolate_rmse(cells, 1, c.r_total)) {
      ++compared;
      below = below && c.rmse_theta < *ref;
    }
  }
  s.entangled_below_product = compared > 0 && below;
  return s;
}

GlobalSummary summarize_global(const std::vector<CellResult>& cells) {
  GlobalSummary s;
  const auto all = [](const CellResult&) { return true; };
  const auto r_total = [](const CellResult& c) { return c.r_total; };
  const int upper = upper_half_threshold(cells);
  s.eps_vs_r = try_fit(points_of(cells, r_total, [](const CellResult& c) { return c.mean_eps; }, all));
  const auto rmse_of = [](const CellResult& c) { return c.rmse_theta; };
  s.rmse_vs_r = try_fit(points_of(cells, r_total, rmse_of, all));
  s.rmse_vs_r_upper = try_fit(
      points_of(cells, r_total, rmse_of, [upper](const CellResult& c) { return c.m_halt >= upper; }));
  return s;
}

std::optional<FitResult> summarize_multiscale(const std::vector<MultiscaleResult>& results) {
  std::vector<Point> pts;
  for (const auto& r : results)
    if (r.halted > 0 && r.rmse_final > 0.0) pts.push_back({r.r_tot_mean, r.rmse_final});
  return try_fit(pts);
}

}  // namespace ssml
