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

#include "darank/model/model.h"

#include <cmath>

#include "darank/common/error.h"

namespace darank {

ModelParams init_model(const CorpusMeta& meta, const ModelDims& dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ModelParams p;
  p.embedder = init_embedder(meta, dims.embedder, rng);
  p.ranker = init_ranker(dims.embedder.embed_dim, dims.ranker_hidden, rng);
  p.discriminator = init_discriminator(dims.embedder.embed_dim, dims.discriminator_hidden, rng);
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  return ModelParams{zeros_like(params.embedder), RankerParams{zeros_like(params.ranker.net)},
                     DiscriminatorParams{zeros_like(params.discriminator.net)}};
}

void check_model(const ModelParams& params, const CorpusMeta& meta) {
  check_embedder(params.embedder, meta);
  check_net(params.ranker.net);
  check_net(params.discriminator.net);
  if (params.ranker.net.in_dim() != params.embedder.embed_dim() ||
      params.discriminator.net.in_dim() != params.embedder.embed_dim()) {
    throw ShapeError("ranker/discriminator input width differs from embed_dim " +
                     std::to_string(params.embedder.embed_dim()));
  }
}

std::array<std::size_t, 3> group_sizes(const ModelParams& params) {
  std::array<std::size_t, 3> sizes{0, 0, 0};
  auto counter = [](std::size_t& total) {
    return [&total](std::span<const double> block) { total += block.size(); };
  };
  for_each_block(params.embedder, counter(sizes[0]));
  for_each_block(params.ranker.net, counter(sizes[1]));
  for_each_block(params.discriminator.net, counter(sizes[2]));
  return sizes;
}

std::vector<double> flatten(const ModelParams& params) {
  std::vector<double> flat;
  for_each_block(params, [&](std::span<const double> block) {
    flat.insert(flat.end(), block.begin(), block.end());
  });
  return flat;
}

void unflatten(std::span<const double> flat, ModelParams& params) {
  std::size_t at = 0;
  for_each_block(params, [&](std::span<double> block) {
    if (at + block.size() > flat.size()) throw ShapeError("flat parameter vector too short");
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(at), block.size(), block.begin());
    at += block.size();
  });
  if (at != flat.size()) throw ShapeError("flat parameter vector too long");
}

void axpy(double scale, const ModelParams& delta, ModelParams& params) {
  std::vector<std::span<const double>> blocks;
  for_each_block(delta, [&](std::span<const double> block) { blocks.push_back(block); });
  std::size_t i = 0;
  for_each_block(params, [&](std::span<double> block) {
    if (i >= blocks.size() || blocks[i].size() != block.size()) {
      throw ShapeError("axpy between differently shaped models");
    }
    const auto& src = blocks[i++];
    for (std::size_t k = 0; k < block.size(); ++k) block[k] += scale * src[k];
  });
}

bool all_finite(const ModelParams& params) {
  bool ok = true;
  for_each_block(params, [&](std::span<const double> block) {
    for (double v : block) ok = ok && std::isfinite(v);
  });
  return ok;
}

}  // namespace darank
