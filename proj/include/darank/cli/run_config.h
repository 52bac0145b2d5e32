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

#ifndef DARANK_CLI_RUN_CONFIG_H_
#define DARANK_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "darank/common/json_util.h"
#include "darank/synthgen/generator.h"
#include "darank/train/config.h"

namespace darank {

struct EvalOptions {
  double split_ratio = 5.0 / 6.0;
  int bins = 50;
  bool centered = true;
  int parallel = 1;
  bool distinct_seeds = false;

  bool operator==(const EvalOptions&) const = default;
};

// One JSON document with optional sections:
//   {"seed": 7, "generate": {...}, "train": {...}, "eval": {...}}
// A top-level seed applies to generate and train unless a section sets its
// own. Unknown keys anywhere are rejected.
struct RunConfig {
  GenConfig generate;
  TrainConfig train;
  EvalOptions eval;

  bool operator==(const RunConfig&) const = default;
};

Json to_json(const GenConfig& cfg);
Json to_json(const EvalOptions& opts);
Json to_json(const RunConfig& cfg);

GenConfig gen_config_from_json(const Json& j, const std::string& pointer, GenConfig base = {});
RunConfig run_config_from_json(const Json& j);

// Throws ConfigError for values outside their documented ranges.
void validate(const EvalOptions& opts);

// Reads `path` (or defaults when empty) and applies a --seed override to
// both the generator and the trainer.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          std::optional<std::uint64_t> seed_override);

}  // namespace darank

#endif  // DARANK_CLI_RUN_CONFIG_H_
