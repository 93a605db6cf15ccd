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

#include "ssml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ssml {

FitResult ols_loglog(std::span<const Point> points) {
  const std::size_t n = points.size();
  if (n < 2) throw std::invalid_argument("log-log fit needs at least two points");

  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    if (!(p.x > 0.0 && p.y > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.y))
      throw std::invalid_argument("log-log fit needs finite, strictly positive coordinates");
    sx += std::log(p.x);
    sy += std::log(p.y);
  }
  const double mx = sx / n;
  const double my = sy / n;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.x) - mx;
    const double dy = std::log(p.y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("log-log fit needs at least two distinct x values");

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n_points = static_cast<int>(n);
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (const auto& p : points) {
      const double r = std::log(p.y) - (fit.intercept + fit.slope * std::log(p.x));
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;
  }
  return fit;
}

MeanStderr mean_stderr(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("mean of an empty sample");
  const double n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / n;
  if (samples.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double rmse(std::span<const double> errors) {
  if (errors.empty()) throw std::invalid_argument("rmse of an empty sample");
  double ss = 0.0;
  for (double e : errors) ss += e * e;
  return std::sqrt(ss / static_cast<double>(errors.size()));
}

MeanStderr rmse_stderr(std::span<const double> errors) {
  if (errors.empty()) throw std::invalid_argument("rmse of an empty sample");
  std::vector<double> sq;
  sq.reserve(errors.size());
  for (double e : errors) sq.push_back(e * e);
  const auto ms = mean_stderr(sq);
  const double value = std::sqrt(ms.mean);
  return {value, value > 0.0 ? ms.std_error / (2.0 * value) : 0.0};
}

}  // namespace ssml
