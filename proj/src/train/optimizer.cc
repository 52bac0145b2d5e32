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

#include "darank/train/optimizer.h"

#include <cmath>
#include <span>
#include <vector>

#include "darank/common/error.h"

namespace darank {
namespace {

std::vector<std::span<double>> blocks(ModelParams& p) {
  std::vector<std::span<double>> out;
  for_each_block(p, [&](std::span<double> b) { out.push_back(b); });
  return out;
}

std::vector<std::span<const double>> blocks(const ModelParams& p) {
  std::vector<std::span<const double>> out;
  for_each_block(p, [&](std::span<const double> b) { out.push_back(b); });
  return out;
}

}  // namespace

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, double initial_accumulator,
                     const ModelParams& shape)
    : kind_(kind), learning_rate_(learning_rate) {
  if (kind_ == OptimizerKind::kAdagrad) {
    ModelParams acc = zeros_like(shape);
    for_each_block(acc, [&](std::span<double> b) {
      for (double& v : b) v = initial_accumulator;
    });
    accumulators_ = std::move(acc);
  }
}

void Optimizer::set_accumulators(ModelParams accumulators) {
  if (kind_ != OptimizerKind::kAdagrad) {
    throw IncompatibleCheckpointError("SGD has no accumulator state");
  }
  if (group_sizes(accumulators) != group_sizes(*accumulators_)) {
    throw IncompatibleCheckpointError("optimizer state does not match the model");
  }
  accumulators_ = std::move(accumulators);
}

void Optimizer::apply(const ModelParams& direction, ModelParams& params) {
  if (kind_ == OptimizerKind::kSgd) {
    axpy(-learning_rate_, direction, params);
    return;
  }
  auto p = blocks(params);
  auto g = blocks(direction);
  auto a = blocks(*accumulators_);
  if (p.size() != g.size() || p.size() != a.size()) throw ShapeError("optimizer block mismatch");
  for (std::size_t b = 0; b < p.size(); ++b) {
    if (p[b].size() != g[b].size() || p[b].size() != a[b].size()) {
      throw ShapeError("optimizer block size mismatch");
    }
    for (std::size_t i = 0; i < p[b].size(); ++i) {
      const double gi = g[b][i];
      if (gi == 0.0) continue;
      a[b][i] += gi * gi;
      p[b][i] -= learning_rate_ * gi / std::sqrt(a[b][i]);
    }
  }
}

}  // namespace darank
