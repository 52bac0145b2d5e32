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

#include "darank/adapt/routing.h"

#include <cmath>
#include <utility>

#include "darank/adapt/discriminator.h"
#include "darank/adapt/mmd.h"
#include "darank/common/error.h"

namespace darank {
namespace {

// Row indices of the batch embeddings split by domain.
struct DomainRows {
  std::vector<Eigen::Index> source;
  std::vector<Eigen::Index> target;
};

DomainRows split_rows(const EmbeddingBatch& batch) {
  DomainRows rows;
  for (std::size_t i = 0; i < batch.num_queries(); ++i) {
    auto& side = batch.is_target[i] ? rows.target : rows.source;
    for (Eigen::Index r = batch.offsets[i]; r < batch.offsets[i + 1]; ++r) side.push_back(r);
  }
  return rows;
}

DenseMatrix gather(const DenseMatrix& m, const std::vector<Eigen::Index>& rows) {
  DenseMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

void scatter(const DenseMatrix& part, const std::vector<Eigen::Index>& rows, DenseMatrix& into) {
  for (std::size_t i = 0; i < rows.size(); ++i) into.row(rows[i]) = part.row(static_cast<Eigen::Index>(i));
}

ModelParams assemble(const EmbeddingBatch& batch, const ModelParams& params,
                     const DenseMatrix& embedding_upstream, const RankerParams& ranker,
                     DiscriminatorParams discriminator) {
  ModelParams out;
  out.embedder = embed_backward(batch, params.embedder, embedding_upstream);
  out.ranker = ranker;
  out.discriminator = std::move(discriminator);
  return out;
}

DiscriminatorParams scaled(const DiscriminatorParams& d, double s) {
  DiscriminatorParams out = d;
  for_each_block(out.net, [s](std::span<double> block) {
    for (double& v : block) v *= s;
  });
  return out;
}

}  // namespace

void check_weights(const AdaptWeights& w) {
  const std::pair<const char*, double> fields[] = {{"/lambda_d", w.lambda_d},
                                                    {"/lambda_adv", w.lambda_adv},
                                                    {"/lambda_mmd", w.lambda_mmd},
                                                    {"/lambda_cov", w.lambda_cov}};
  for (const auto& [pointer, v] : fields) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError(pointer, "adaptation weights must be finite and non-negative");
    }
  }
}

std::string to_string(AdaptMethod method) {
  switch (method) {
    case AdaptMethod::kNone:
      return "None";
    case AdaptMethod::kGradientReversal:
      return "GradientReversal";
    case AdaptMethod::kMeanDiscrepancy:
      return "MeanDiscrepancy";
  }
  return "?";
}

LossBundle compute_loss_bundle(const EmbeddingBatch& batch, const ModelParams& params,
                               AdaptMethod method, const AdaptWeights& weights,
                               LossMode loss_mode) {
  check_weights(weights);
  LossBundle b;
  b.method = method;
  RankerLoss rl = batch_loss(batch, params.ranker, loss_mode);
  b.loss_p = rl.value;
  b.ranker_grad_p = std::move(rl.param_grads);
  b.embedding_grad_p = std::move(rl.embedding_grads);

  const Eigen::Index rows = batch.embeddings.rows();
  const Eigen::Index cols = batch.embeddings.cols();
  b.embedding_grad_d = DenseMatrix::Zero(rows, cols);
  b.embedding_grad_mmd = DenseMatrix::Zero(rows, cols);
  b.embedding_grad_cov = DenseMatrix::Zero(rows, cols);
  b.discriminator_grad_d = DiscriminatorParams{zeros_like(params.discriminator.net)};
  b.total = b.loss_p;
  if (method == AdaptMethod::kNone) return b;

  const DomainRows split = split_rows(batch);
  if (split.source.empty() || split.target.empty()) {
    throw ConfigError(to_string(method) + " needs source and target queries in every batch");
  }
  const DenseMatrix source = gather(batch.embeddings, split.source);
  const DenseMatrix target = gather(batch.embeddings, split.target);

  if (method == AdaptMethod::kGradientReversal) {
    DiscriminatorLoss dl = discriminator_loss(source, target, params.discriminator);
    b.loss_d = dl.value;
    b.loss_adv = adversarial_loss(dl.value);
    b.discriminator_grad_d = std::move(dl.param_grads);
    scatter(dl.source_grads, split.source, b.embedding_grad_d);
    scatter(dl.target_grads, split.target, b.embedding_grad_d);
    b.total = b.loss_p + weights.lambda_d * b.loss_d + weights.lambda_adv * b.loss_adv;
  } else {
    DiscrepancyLoss ml = mmd_loss(source, target);
    b.loss_mmd = ml.value;
    scatter(ml.source_grads, split.source, b.embedding_grad_mmd);
    scatter(ml.target_grads, split.target, b.embedding_grad_mmd);
    b.total = b.loss_p + weights.lambda_mmd * b.loss_mmd;
    if (weights.lambda_cov > 0.0) {
      DiscrepancyLoss cl = covariance_discrepancy(source, target);
      b.loss_cov = cl.value;
      scatter(cl.source_grads, split.source, b.embedding_grad_cov);
      scatter(cl.target_grads, split.target, b.embedding_grad_cov);
      b.total += weights.lambda_cov * b.loss_cov;
    }
  }
  return b;
}

ModelParams route_gradients(const LossBundle& bundle, const AdaptWeights& weights,
                            AdaptMethod method, const EmbeddingBatch& batch,
                            const ModelParams& params) {
  if (bundle.method != method) {
    throw ConfigError("gradients were computed for " + to_string(bundle.method) +
                      " but routed as " + to_string(method));
  }
  switch (method) {
    case AdaptMethod::kNone:
      return assemble(batch, params, bundle.embedding_grad_p, bundle.ranker_grad_p,
                      scaled(bundle.discriminator_grad_d, 0.0));
    case AdaptMethod::kGradientReversal: {
      DenseMatrix upstream = bundle.embedding_grad_p;
      if (weights.lambda_adv != 0.0) upstream -= weights.lambda_adv * bundle.embedding_grad_d;
      return assemble(batch, params, upstream, bundle.ranker_grad_p,
                      scaled(bundle.discriminator_grad_d, weights.lambda_d));
    }
    case AdaptMethod::kMeanDiscrepancy: {
      DenseMatrix upstream = bundle.embedding_grad_p;
      if (weights.lambda_mmd != 0.0) upstream += weights.lambda_mmd * bundle.embedding_grad_mmd;
      if (weights.lambda_cov != 0.0) upstream += weights.lambda_cov * bundle.embedding_grad_cov;
      return assemble(batch, params, upstream, bundle.ranker_grad_p,
                      scaled(bundle.discriminator_grad_d, 0.0));
    }
  }
  throw ConfigError("unknown adaptation method");
}

ModelParams total_loss_gradient(const LossBundle& bundle, const AdaptWeights& weights,
                                const EmbeddingBatch& batch, const ModelParams& params) {
  if (bundle.method != AdaptMethod::kGradientReversal) {
    return route_gradients(bundle, weights, bundle.method, batch, params);
  }
  const double net = weights.lambda_d - weights.lambda_adv;
  DenseMatrix upstream = bundle.embedding_grad_p + net * bundle.embedding_grad_d;
  return assemble(batch, params, upstream, bundle.ranker_grad_p,
                  scaled(bundle.discriminator_grad_d, net));
}

}  // namespace darank
