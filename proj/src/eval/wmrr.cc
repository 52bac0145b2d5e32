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

#include "darank/eval/wmrr.h"

#include <algorithm>

#include "darank/common/error.h"
#include "darank/model/ranker.h"

namespace darank {
namespace {

constexpr std::size_t kChunk = 512;

}  // namespace

double weighted_mrr(std::span<const QueryRank> ranks) {
  if (ranks.empty()) throw Error("WMRR of an empty evaluation set");
  double num = 0.0;
  double den = 0.0;
  for (const QueryRank& r : ranks) {
    num += r.weight * r.reciprocal_rank;
    den += r.weight;
  }
  if (!(den > 0.0)) throw Error("WMRR needs a positive total weight");
  return num / den;
}

std::vector<std::vector<double>> score_queries(const ModelParams& params,
                                               const Dataset& dataset) {
  check_model(params, dataset.meta);
  std::vector<std::vector<double>> out;
  out.reserve(dataset.examples.size());
  std::vector<const QueryExample*> chunk;
  for (std::size_t start = 0; start < dataset.examples.size(); start += kChunk) {
    const std::size_t end = std::min(dataset.examples.size(), start + kChunk);
    chunk.clear();
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&dataset.examples[i]);
    const EmbeddingBatch batch = embed_batch(chunk, params.embedder);
    const Vector scores = score_batch(batch.embeddings, params.ranker);
    for (std::size_t q = 0; q < chunk.size(); ++q) {
      const Eigen::Index b = batch.offsets[q];
      const Eigen::Index e = batch.offsets[q + 1];
      out.emplace_back(scores.data() + b, scores.data() + e);
    }
  }
  return out;
}

EvalReport evaluate_wmrr(const ModelParams& params, const Dataset& eval_set) {
  if (eval_set.examples.empty()) throw Error("WMRR of an empty evaluation set");
  const auto scores = score_queries(params, eval_set);
  EvalReport report;
  report.per_query.reserve(eval_set.examples.size());
  for (std::size_t i = 0; i < eval_set.examples.size(); ++i) {
    const QueryExample& q = eval_set.examples[i];
    const int clicked = static_cast<int>(q.clicked_index());
    const std::vector<int> order = rank_documents(scores[i]);
    const int pos = static_cast<int>(std::find(order.begin(), order.end(), clicked) -
                                     order.begin());
    QueryRank r;
    r.query_id = q.query_id;
    r.clicked_rank = pos + 1;
    r.weight = q.propensity_weight;
    r.reciprocal_rank = 1.0 / r.clicked_rank;
    report.per_query.push_back(std::move(r));
  }
  report.n_queries = report.per_query.size();
  report.wmrr = weighted_mrr(report.per_query);
  return report;
}

}  // namespace darank
