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

#ifndef DARANK_SYNTHGEN_GENERATOR_H_
#define DARANK_SYNTHGEN_GENERATOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "darank/data/dataset.h"

namespace darank {

// Configuration of the synthetic click-log generator.
//
// Every query and document has a latent vector drawn from
// N(mu_domain, latent_std^2 I) with mu_source = 0 and mu_target a random
// unit direction scaled by domain_shift. Dense features are an orthonormal
// map of the document latent (standardized) plus noise; sparse n-grams
// quantize latent coordinates into per-coordinate vocabulary buckets.
// Relevance is relevance_scale * (q . d) / (latent_std^2 sqrt(latent_dim))
// + quality_weight * (v . d) / latent_std + relevance_bias
// + N(0, relevance_noise^2) for a fixed random unit vector v, the same
// function in both domains.
struct GenConfig {
  std::uint64_t seed = 42;
  std::int64_t n_source_queries = 50000;
  std::int64_t n_target_queries = 5000;
  std::int64_t vocab_size = 512;
  std::int64_t dense_dim = 8;
  std::int64_t docs_per_query = 6;
  double domain_shift = 1.0;
  // Apply the target offset to query latents as well as documents.
  bool shift_queries = true;
  double relevance_noise = 0.5;
  // Probability that each shown position is examined; position 1 first.
  std::vector<double> examination_probs = {1.0, 0.55, 0.38, 0.29, 0.24, 0.20};
  std::int64_t n_days = 30;

  std::int64_t latent_dim = 8;
  // Bag sizes; each id quantizes one distinct latent coordinate.
  std::int64_t query_ngrams_min = 1;
  std::int64_t query_ngrams_max = 3;
  std::int64_t doc_ngrams_min = 1;
  std::int64_t doc_ngrams_max = 5;
  double latent_std = 0.35;
  double dense_noise = 0.1;
  double relevance_scale = 2.0;
  double relevance_bias = -1.0;
  double quality_weight = 1.0;
  // Scale of the Gumbel noise the legacy ranker adds before ordering.
  double legacy_noise = 1.0;
  std::string target_name = "target";

  bool operator==(const GenConfig&) const = default;
};

// Throws ConfigError (with a JSON pointer such as "/domain_shift").
void validate(const GenConfig& cfg);

struct GenReport {
  std::vector<double> source_latent_mean;
  std::vector<double> target_latent_mean;
  std::vector<double> shift_direction;
  // Count of clicks per shown position (index 0 = position 1).
  std::vector<std::int64_t> source_click_histogram;
  std::vector<std::int64_t> target_click_histogram;
  // Queries that needed more than 1000 click resamples.
  std::int64_t hard_queries = 0;
  double mean_resamples = 0.0;
};

struct GeneratedCorpus {
  Dataset source;
  Dataset target;
  GenReport report;
};

// Deterministic in `cfg`: each query draws from its own engine seeded by
// (seed, domain, index), so output does not depend on generation order.
// Throws ConfigError when more than 1% of queries need over 1000 resamples
// to reach exactly one click.
GeneratedCorpus generate(const GenConfig& cfg);

}  // namespace darank

#endif  // DARANK_SYNTHGEN_GENERATOR_H_
