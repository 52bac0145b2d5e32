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

#ifndef DARANK_MODEL_RANKER_H_
#define DARANK_MODEL_RANKER_H_

#include <span>
#include <string>
#include <vector>

#include "darank/model/embedder.h"
#include "darank/nn/feed_forward.h"

namespace darank {

// Prediction model P: tanh hidden layers and a linear scalar output.
struct RankerParams {
  FeedForwardNet net;
};

enum class LossMode {
  // -log sigmoid(s_click); unclicked documents do not contribute.
  kLiteralSigmoid,
  // -log softmax(s)_click over the candidate list.
  kSoftmaxOverCandidates,
  // Full binary cross entropy over all documents.
  kBinaryCrossEntropy,
};

std::string to_string(LossMode mode);
LossMode loss_mode_from_string(const std::string& name);

inline const std::vector<int> kDefaultRankerHidden = {256, 128, 64};

RankerParams init_ranker(Eigen::Index embed_dim, std::span<const int> hidden_dims,
                         std::mt19937_64& rng);

double score(const Vector& x, const RankerParams& params);
Vector score_batch(const DenseMatrix& x, const RankerParams& params);

struct QueryLoss {
  double value = 0.0;
  std::vector<double> score_grads;
};

// Loss of one query given its document scores and click flags. Throws
// ValidationError unless exactly one document is clicked.
double query_loss(std::span<const double> scores, std::span<const bool> clicks,
                  LossMode mode);
QueryLoss query_loss_with_grad(std::span<const double> scores,
                               std::span<const bool> clicks, LossMode mode);

struct RankerLoss {
  double value = 0.0;
  RankerParams param_grads;
  // d(L_P)/d(x_d), one row per row of the batch embeddings.
  DenseMatrix embedding_grads;
};

// Mean query loss over the batch, with gradients for the prediction model
// and for each document embedding.
RankerLoss batch_loss(const EmbeddingBatch& batch, const RankerParams& params,
                      LossMode mode);

// Document indices (0-based) ordered by descending score; ties keep the
// lower index first. Throws NumericError on NaN.
std::vector<int> rank_documents(std::span<const double> scores);

}  // namespace darank

#endif  // DARANK_MODEL_RANKER_H_
