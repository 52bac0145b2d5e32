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

#ifndef DARANK_TRAIN_CONFIG_H_
#define DARANK_TRAIN_CONFIG_H_

#include <cstdint>
#include <string>

#include "darank/adapt/routing.h"
#include "darank/common/json_util.h"
#include "darank/model/model.h"

namespace darank {

enum class Method {
  kTrainOnAll,        // source data only
  kTrainOnDomain,     // target data only
  kReTrain,           // warm start from a checkpoint, target data, lr / divisor
  kBatchBalance,      // fixed share of target queries per batch
  kGradientReversal,  // batch balance + discriminator with reversed gradient
  kMeanDiscrepancy,   // batch balance + embedding mean discrepancy penalty
};

std::string to_string(Method method);
Method method_from_string(const std::string& name);
AdaptMethod adapt_method(Method method);
bool uses_source(Method method);
bool uses_target(Method method);
bool is_mixed(Method method);

enum class OptimizerKind { kSgd, kAdagrad };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string& name);

struct TrainConfig {
  Method method = Method::kTrainOnAll;
  double learning_rate = 0.1;
  double retrain_lr_divisor = 10.0;
  int batch_size = 64;
  double target_fraction = 0.2;
  AdaptWeights adapt_weights;
  std::int64_t steps = 20000;
  std::uint64_t seed = 42;
  LossMode loss_mode = LossMode::kSoftmaxOverCandidates;
  std::int64_t eval_every = 1000;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double adagrad_initial_accumulator = 0.1;
  ModelDims model;

  bool operator==(const TrainConfig&) const = default;
};

// Throws ConfigError (JSON pointer relative to the train section).
void validate(const TrainConfig& cfg);

// Number of target queries per batch for mixed methods.
int target_queries_per_batch(const TrainConfig& cfg);

Json to_json(const ModelDims& dims);
Json to_json(const AdaptWeights& weights);
Json to_json(const TrainConfig& cfg);

// Overlays the fields present in `j` onto `base`. Unknown keys and type
// errors raise ConfigError with pointers under `pointer`. Does not validate.
TrainConfig train_config_from_json(const Json& j, const std::string& pointer,
                                   TrainConfig base = {});

// Learning rate actually applied: ReTrain divides by retrain_lr_divisor.
double effective_learning_rate(const TrainConfig& cfg);

}  // namespace darank

#endif  // DARANK_TRAIN_CONFIG_H_
