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

#ifndef DARANK_TRAIN_OPTIMIZER_H_
#define DARANK_TRAIN_OPTIMIZER_H_

#include <optional>

#include "darank/model/model.h"
#include "darank/train/config.h"

namespace darank {

// Applies descent directions to parameters. SGD: p -= lr g. Adagrad:
// a += g^2, p -= lr g / sqrt(a), with a starting at the initial accumulator.
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, double initial_accumulator,
            const ModelParams& shape);

  void apply(const ModelParams& direction, ModelParams& params);

  OptimizerKind kind() const { return kind_; }
  double learning_rate() const { return learning_rate_; }

  // Adagrad accumulators; empty for SGD.
  const std::optional<ModelParams>& accumulators() const { return accumulators_; }
  void set_accumulators(ModelParams accumulators);

 private:
  OptimizerKind kind_;
  double learning_rate_;
  std::optional<ModelParams> accumulators_;
};

}  // namespace darank

#endif  // DARANK_TRAIN_OPTIMIZER_H_
