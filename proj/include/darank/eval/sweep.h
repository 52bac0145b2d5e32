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

#ifndef DARANK_EVAL_SWEEP_H_
#define DARANK_EVAL_SWEEP_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "darank/common/json_util.h"
#include "darank/data/dataset.h"
#include "darank/train/config.h"

namespace darank {

struct SweepRow {
  AdaptWeights weights;
  std::uint64_t seed = 0;
  // WMRR on the evaluation set; for diverged runs, of the last finite state.
  double wmrr = 0.0;
  std::string status;  // "ok" or "diverged"
  std::int64_t diverged_step = 0;
};

struct SweepOptions {
  int parallel = 1;
  // Point i trains with seed base.seed + i instead of the shared base seed.
  bool distinct_seeds = false;
};

// One full training run per grid point with `base` and the point's weights,
// scored on `eval_set`. Rows follow grid order regardless of completion
// order. Throws UsageError for an empty grid.
std::vector<SweepRow> sensitivity_sweep(const TrainConfig& base,
                                        std::span<const AdaptWeights> grid,
                                        const Dataset& source, const Dataset& target,
                                        const Dataset& eval_set, const SweepOptions& options = {});

// Either {"points": [{"lambda_d": ..}, ..]} or axis lists such as
// {"lambda_d": [..], "lambda_adv": [..]} expanded as a cartesian product in
// lambda_d, lambda_adv, lambda_mmd, lambda_cov order. Missing weights come
// from `base`. Throws ConfigError.
std::vector<AdaptWeights> grid_from_json(const Json& j, const AdaptWeights& base);

// max - min WMRR over rows with status "ok"; 0 when fewer than two.
double wmrr_spread(std::span<const SweepRow> rows);

// Header lambda_d,lambda_adv,lambda_mmd,wmrr,status.
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace darank

#endif  // DARANK_EVAL_SWEEP_H_
