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

#include "darank/model/ranker.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "darank/common/error.h"

namespace darank {
namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

std::size_t single_click(std::span<const bool> clicks) {
  std::size_t count = 0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    if (clicks[i]) {
      ++count;
      at = i;
    }
  }
  if (count != 1) {
    throw ValidationError("", "exactly one click required, found " + std::to_string(count));
  }
  return at;
}

}  // namespace

std::string to_string(LossMode mode) {
  switch (mode) {
    case LossMode::kLiteralSigmoid:
      return "LiteralSigmoid";
    case LossMode::kSoftmaxOverCandidates:
      return "SoftmaxOverCandidates";
    case LossMode::kBinaryCrossEntropy:
      return "BinaryCrossEntropy";
  }
  return "?";
}

LossMode loss_mode_from_string(const std::string& name) {
  for (LossMode m : {LossMode::kLiteralSigmoid, LossMode::kSoftmaxOverCandidates,
                     LossMode::kBinaryCrossEntropy}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown loss mode '" + name + "'");
}

RankerParams init_ranker(Eigen::Index embed_dim, std::span<const int> hidden_dims,
                         std::mt19937_64& rng) {
  return RankerParams{init_feed_forward(embed_dim, hidden_dims, rng)};
}

double score(const Vector& x, const RankerParams& params) {
  if (x.size() != params.net.in_dim()) {
    throw ShapeError("ranker expects embeddings of length " +
                     std::to_string(params.net.in_dim()) + ", got " +
                     std::to_string(x.size()));
  }
  return forward_outputs(params.net, x.transpose())[0];
}

Vector score_batch(const DenseMatrix& x, const RankerParams& params) {
  return forward_outputs(params.net, x);
}

QueryLoss query_loss_with_grad(std::span<const double> scores,
                               std::span<const bool> clicks, LossMode mode) {
  if (scores.size() != clicks.size()) {
    throw ShapeError("scores and clicks differ in length");
  }
  if (scores.size() < 2) throw ShapeError("a query needs at least two documents");
  const std::size_t clicked = single_click(clicks);

  QueryLoss out;
  out.score_grads.assign(scores.size(), 0.0);
  switch (mode) {
    case LossMode::kLiteralSigmoid: {
      const double s = scores[clicked];
      out.value = softplus(-s);
      out.score_grads[clicked] = -sigmoid(-s);
      break;
    }
    case LossMode::kSoftmaxOverCandidates: {
      const double top = *std::max_element(scores.begin(), scores.end());
      double total = 0.0;
      for (double s : scores) total += std::exp(s - top);
      out.value = top + std::log(total) - scores[clicked];
      for (std::size_t i = 0; i < scores.size(); ++i) {
        out.score_grads[i] = std::exp(scores[i] - top) / total;
      }
      out.score_grads[clicked] -= 1.0;
      break;
    }
    case LossMode::kBinaryCrossEntropy: {
      for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool c = clicks[i];
        out.value += c ? softplus(-scores[i]) : softplus(scores[i]);
        out.score_grads[i] = sigmoid(scores[i]) - (c ? 1.0 : 0.0);
      }
      break;
    }
  }
  return out;
}

double query_loss(std::span<const double> scores, std::span<const bool> clicks,
                  LossMode mode) {
  return query_loss_with_grad(scores, clicks, mode).value;
}

RankerLoss batch_loss(const EmbeddingBatch& batch, const RankerParams& params,
                      LossMode mode) {
  if (batch.num_queries() == 0) throw ShapeError("batch_loss on an empty batch");
  const ForwardTrace trace = forward(params.net, batch.embeddings);
  const double inv_queries = 1.0 / static_cast<double>(batch.num_queries());

  Vector output_grad = Vector::Zero(trace.outputs.size());
  RankerLoss out;
  for (std::size_t i = 0; i < batch.num_queries(); ++i) {
    const QueryExample& q = *batch.queries[i];
    const Eigen::Index begin = batch.offsets[i];
    const std::size_t n = q.docs.size();
    const auto clicks = std::make_unique<bool[]>(n);
    for (std::size_t j = 0; j < n; ++j) clicks[j] = q.docs[j].clicked;
    QueryLoss ql;
    try {
      ql = query_loss_with_grad(
          std::span<const double>(trace.outputs.data() + begin, n),
          std::span<const bool>(clicks.get(), n), mode);
    } catch (const ValidationError& e) {
      throw ValidationError(q.query_id, e.what());
    }
    out.value += ql.value * inv_queries;
    for (std::size_t j = 0; j < n; ++j) {
      output_grad[begin + static_cast<Eigen::Index>(j)] = ql.score_grads[j] * inv_queries;
    }
  }
  NetGrads grads = backward(params.net, trace, output_grad);
  out.param_grads.net = std::move(grads.params);
  out.embedding_grads = std::move(grads.input);
  return out;
}

std::vector<int> rank_documents(std::span<const double> scores) {
  for (double s : scores) {
    if (std::isnan(s)) throw NumericError("NaN score in rank_documents");
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace darank
