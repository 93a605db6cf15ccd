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

#include <span>
#include <utility>
#include <vector>

namespace ssml {

/// Ordinary least squares of ln y on ln x. Intercept is in natural log.
struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_points = 0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Throws std::invalid_argument on non-positive coordinates or fewer than
/// two distinct x values. A constant y series yields r_squared = 1.
FitResult ols_loglog(std::span<const Point> points);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Arithmetic mean and s / sqrt(n) with the n-1 sample deviation; the
/// standard error of a single sample is reported as 0.
MeanStderr mean_stderr(std::span<const double> samples);

/// sqrt(mean(e^2)). Throws on empty input.
double rmse(std::span<const double> errors);

/// RMSE with a delta-method standard error se(mean e^2) / (2 rmse).
MeanStderr rmse_stderr(std::span<const double> errors);

}  // namespace ssml
