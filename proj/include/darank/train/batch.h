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

#ifndef DARANK_TRAIN_BATCH_H_
#define DARANK_TRAIN_BATCH_H_

#include <random>
#include <vector>

#include "darank/data/dataset.h"
#include "darank/train/config.h"

namespace darank {

struct Batch {
  std::vector<const QueryExample*> queries;
  std::vector<bool> is_target;
};

// Draws one mini-batch uniformly with replacement. Source-only and
// target-only methods fill the batch from one pool; mixed methods take
// exactly round(target_fraction * batch_size) target queries and the
// rest from source. Source draws come first. Throws ConfigError when a pool
// the method needs is empty.
Batch compose_batch(const std::vector<QueryExample>& source_pool,
                    const std::vector<QueryExample>& target_pool, const TrainConfig& cfg,
                    std::mt19937_64& rng);

}  // namespace darank

#endif  // DARANK_TRAIN_BATCH_H_
