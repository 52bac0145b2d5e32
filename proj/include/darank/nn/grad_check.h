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

#ifndef DARANK_NN_GRAD_CHECK_H_
#define DARANK_NN_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace darank {

// Evaluates a scalar loss at `params`. When `grad` is non-empty it has the
// same length as `params` and receives the analytic gradient.
using LossWithGradient =
    std::function<double(std::span<const double> params, std::span<double> grad)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  // Index of the parameter group (per `group_sizes`) and the offset inside it.
  std::size_t worst_group = 0;
  std::size_t worst_index = 0;
};

// Compares the analytic gradient against central differences with the given
// step. Relative error is |a - n| / max(1, |a|, |n|). `group_sizes`, when
// given, partitions the flat vector for reporting.
GradCheckReport grad_check(const LossWithGradient& loss_fn,
                           std::span<const double> params, double step = 1e-5,
                           std::span<const std::size_t> group_sizes = {});

}  // namespace darank

#endif  // DARANK_NN_GRAD_CHECK_H_
