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

#ifndef DARANK_MODEL_MODEL_H_
#define DARANK_MODEL_MODEL_H_

#include <array>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "darank/adapt/discriminator.h"
#include "darank/data/dataset.h"
#include "darank/model/embedder.h"
#include "darank/model/ranker.h"

namespace darank {

struct ModelDims {
  EmbedderDims embedder;
  std::vector<int> ranker_hidden = kDefaultRankerHidden;
  std::vector<int> discriminator_hidden = kDefaultDiscriminatorHidden;

  bool operator==(const ModelDims&) const = default;
};

// The three parameter groups theta_emb, theta_P and theta_D. The
// discriminator is always allocated so that every training method consumes
// the same initialization draws.
struct ModelParams {
  EmbedderParams embedder;
  RankerParams ranker;
  DiscriminatorParams discriminator;
};

enum class ParamGroup : std::size_t { kEmbedding = 0, kPrediction = 1, kDiscriminator = 2 };
inline constexpr std::array<const char*, 3> kParamGroupNames = {"embedding", "prediction",
                                                                "discriminator"};

ModelParams init_model(const CorpusMeta& meta, const ModelDims& dims, std::uint64_t seed);
ModelParams zeros_like(const ModelParams& params);

// Throws ShapeError if the parameters do not fit the corpus.
void check_model(const ModelParams& params, const CorpusMeta& meta);

template <typename Params, typename Fn>
  requires std::same_as<std::remove_const_t<Params>, ModelParams>
void for_each_block(Params& p, Fn&& fn) {
  for_each_block(p.embedder, fn);
  for_each_block(p.ranker.net, fn);
  for_each_block(p.discriminator.net, fn);
}

// Number of scalars in each group, in ParamGroup order.
std::array<std::size_t, 3> group_sizes(const ModelParams& params);

std::vector<double> flatten(const ModelParams& params);
void unflatten(std::span<const double> flat, ModelParams& params);

// params += scale * delta, block by block. Shapes must agree.
void axpy(double scale, const ModelParams& delta, ModelParams& params);

bool all_finite(const ModelParams& params);

}  // namespace darank

#endif  // DARANK_MODEL_MODEL_H_
