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

#ifndef DARANK_TRAIN_CHECKPOINT_H_
#define DARANK_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "darank/common/json_util.h"
#include "darank/data/dataset.h"
#include "darank/model/model.h"
#include "darank/train/config.h"

namespace darank {

inline constexpr int kCheckpointVersion = 1;

// Complete training state after `step` updates. Resuming from it continues
// the parameter trajectory exactly.
struct Checkpoint {
  CorpusMeta meta;
  TrainConfig config;
  ModelParams params;
  std::int64_t step = 0;
  // Textual state of the batch-sampling std::mt19937_64.
  std::string rng_state;
  std::optional<ModelParams> adagrad_accumulators;
};

// Hex FNV-1a digests. The architecture fingerprint covers corpus metadata
// and model dimensions; the training fingerprint adds every config field
// that affects the update sequence (not `steps` or `eval_every`).
std::string architecture_fingerprint(const CorpusMeta& meta, const ModelDims& dims);
std::string training_fingerprint(const CorpusMeta& meta, const TrainConfig& cfg);

Json to_json(const Checkpoint& cp);
Checkpoint checkpoint_from_json(const Json& j);

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
// Throws IncompatibleCheckpointError for unknown versions, fingerprints that
// do not match the stored config, or parameter shapes that disagree.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace darank

#endif  // DARANK_TRAIN_CHECKPOINT_H_
