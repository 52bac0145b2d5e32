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

#ifndef DARANK_TRAIN_TRAINER_H_
#define DARANK_TRAIN_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "darank/adapt/routing.h"
#include "darank/common/error.h"
#include "darank/data/dataset.h"
#include "darank/train/batch.h"
#include "darank/train/checkpoint.h"
#include "darank/train/config.h"

namespace darank {

inline constexpr double kDivergenceThreshold = 1e6;

struct HistoryRecord {
  std::int64_t step = 0;
  // Means over the steps since the previous record.
  double loss_p = 0.0;
  // L_D for gradient reversal, L_MMD for mean discrepancy, NaN otherwise.
  double loss_aux = 0.0;
  // NaN when no evaluation set was supplied.
  double wmrr_target_eval = 0.0;
};

struct TrainHistory {
  Method method = Method::kTrainOnAll;
  double learning_rate = 0.0;  // as applied, after the ReTrain divisor
  std::vector<HistoryRecord> records;
  // L_P of every step run by this call, in order.
  std::vector<double> loss_p_trace;
};

// CSV with header step,loss_p,loss_aux,wmrr_target_eval. NaN fields are empty.
std::string history_csv(const TrainHistory& history);

struct TrainResult {
  Checkpoint checkpoint;
  TrainHistory history;
};

// A loss or gradient became non-finite or exceeded kDivergenceThreshold.
// `checkpoint()` holds the state before the failing update.
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t step, const std::string& what, TrainResult last)
      : Error("diverged at step " + std::to_string(step) + ": " + what),
        step_(step),
        last_(std::move(last)) {}

  std::int64_t step() const { return step_; }
  const Checkpoint& checkpoint() const { return last_.checkpoint; }
  const TrainHistory& history() const { return last_.history; }

 private:
  std::int64_t step_;
  TrainResult last_;
};

// Observation of one training step, taken before the update is applied.
struct StepTap {
  std::int64_t step = 0;  // 1-based index of the step being taken
  const Batch* batch = nullptr;
  const EmbeddingBatch* embeddings = nullptr;
  const LossBundle* bundle = nullptr;
  const ModelParams* params = nullptr;
  const ModelParams* routed = nullptr;
};

struct TrainOptions {
  // Target evaluation set used for the history's WMRR column.
  const Dataset* eval_set = nullptr;
  std::function<void(const StepTap&)> tap;
};

// Runs cfg.steps SGD (or Adagrad) steps.
//
// Without `init` the model is initialized from cfg.seed; ReTrain requires
// `init`. If `init` was produced by the same method with the same training
// fingerprint, training resumes from it: cfg.steps more steps continue its
// step counter, rng and optimizer state. Otherwise only ReTrain accepts it,
// as a warm start (architecture must match) with a fresh step counter, rng
// and optimizer. Throws UsageError, IncompatibleCheckpointError,
// ConfigError or DivergenceError.
TrainResult train(const Dataset& source, const Dataset& target, const TrainConfig& cfg,
                  const std::optional<Checkpoint>& init = std::nullopt,
                  const TrainOptions& options = {});

}  // namespace darank

#endif  // DARANK_TRAIN_TRAINER_H_
