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

#ifndef DARANK_EVAL_WMRR_H_
#define DARANK_EVAL_WMRR_H_

#include <span>
#include <string>
#include <vector>

#include "darank/data/dataset.h"
#include "darank/model/model.h"

namespace darank {

struct QueryRank {
  std::string query_id;
  int clicked_rank = 0;  // 1-based position of the clicked doc in the model ranking
  double weight = 0.0;
  double reciprocal_rank = 0.0;
};

struct EvalReport {
  double wmrr = 0.0;
  std::vector<QueryRank> per_query;
  std::size_t n_queries = 0;
};

// sum(w_i / rank_i) / sum(w_i). Throws Error on an empty list or a
// non-positive total weight.
double weighted_mrr(std::span<const QueryRank> ranks);

// Ranks every query of `eval_set` with the model and weights the clicked
// document's reciprocal rank by its propensity weight. Throws Error on an
// empty set and ShapeError when the model does not fit the corpus.
EvalReport evaluate_wmrr(const ModelParams& params, const Dataset& eval_set);

// Per-document model scores for each query, in stored document order.
std::vector<std::vector<double>> score_queries(const ModelParams& params,
                                               const Dataset& dataset);

}  // namespace darank

#endif  // DARANK_EVAL_WMRR_H_
