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

#include "darank/train/batch.h"

#include "darank/common/error.h"

namespace darank {
namespace {

void draw(const std::vector<QueryExample>& pool, int count, bool target, std::mt19937_64& rng,
          Batch& out) {
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    out.queries.push_back(&pool[pick(rng)]);
    out.is_target.push_back(target);
  }
}

}  // namespace

Batch compose_batch(const std::vector<QueryExample>& source_pool,
                    const std::vector<QueryExample>& target_pool, const TrainConfig& cfg,
                    std::mt19937_64& rng) {
  int n_target = 0;
  if (is_mixed(cfg.method)) {
    n_target = target_queries_per_batch(cfg);
    if (n_target < 1) {
      throw ConfigError("/target_fraction", to_string(cfg.method) +
                                                " needs at least one target query per batch");
    }
  } else if (uses_target(cfg.method)) {
    n_target = cfg.batch_size;
  }
  const int n_source = cfg.batch_size - n_target;
  if (n_source > 0 && source_pool.empty()) {
    throw ConfigError(to_string(cfg.method) + " needs a non-empty source training set");
  }
  if (n_target > 0 && target_pool.empty()) {
    throw ConfigError(to_string(cfg.method) + " needs a non-empty target training set");
  }
  Batch batch;
  batch.queries.reserve(static_cast<std::size_t>(cfg.batch_size));
  draw(source_pool, n_source, false, rng, batch);
  draw(target_pool, n_target, true, rng, batch);
  return batch;
}

}  // namespace darank
