/*
 * Copyright 2026 The darank Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "darank/nn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "darank/common/error.h"

namespace darank {
namespace {

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw NumericError(std::string("non-finite loss during gradient check (") +
                       what + ")");
  }
  return value;
}

}  // namespace

GradCheckReport grad_check(const LossWithGradient& loss_fn,
                           std::span<const double> params, double step,
                           std::span<const std::size_t> group_sizes) {
  if (!(step > 0.0)) throw NumericError("gradient check step must be positive");

  std::vector<double> point(params.begin(), params.end());
  std::vector<double> analytic(point.size(), 0.0);
  checked(loss_fn(point, analytic), "analytic");

  GradCheckReport report;
  std::size_t worst_flat = 0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + step;
    const double plus = checked(loss_fn(point, {}), "plus");
    point[i] = saved - step;
    const double minus = checked(loss_fn(point, {}), "minus");
    point[i] = saved;

    const double numeric = (plus - minus) / (2.0 * step);
    const double scale =
        std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
    const double err = std::abs(analytic[i] - numeric) / scale;
    if (err > report.max_relative_error) {
      report.max_relative_error = err;
      worst_flat = i;
    }
  }

  report.worst_index = worst_flat;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (report.worst_index < group_sizes[g]) {
      report.worst_group = g;
      break;
    }
    report.worst_index -= group_sizes[g];
  }
  return report;
}

}  // namespace darank
