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

#ifndef DARANK_ADAPT_ROUTING_H_
#define DARANK_ADAPT_ROUTING_H_

#include <string>

#include "darank/model/model.h"

namespace darank {

struct AdaptWeights {
  double lambda_d = 1.0;
  double lambda_adv = 1.0;
  double lambda_mmd = 1.0;
  // Optional covariance-matching term added to the MMD objective.
  double lambda_cov = 0.0;

  bool operator==(const AdaptWeights&) const = default;
};

// Throws ConfigError for negative or non-finite weights.
void check_weights(const AdaptWeights& weights);

enum class AdaptMethod { kNone, kGradientReversal, kMeanDiscrepancy };

std::string to_string(AdaptMethod method);

// Per-loss values and gradients for one mini-batch, all computed from the
// same parameter snapshot. Embedding gradients are laid out like
// `EmbeddingBatch::embeddings`; terms inactive for `method` are zero.
struct LossBundle {
  AdaptMethod method = AdaptMethod::kNone;
  double loss_p = 0.0;
  double loss_d = 0.0;
  double loss_adv = 0.0;
  double loss_mmd = 0.0;
  double loss_cov = 0.0;
  double total = 0.0;

  RankerParams ranker_grad_p;
  DenseMatrix embedding_grad_p;
  DiscriminatorParams discriminator_grad_d;
  DenseMatrix embedding_grad_d;
  DenseMatrix embedding_grad_mmd;
  DenseMatrix embedding_grad_cov;
};

// Evaluates L_P and the correction losses of `method` on `batch`. Source and
// target rows are taken from `batch.is_target`. `total` is
//   GradientReversal: L_P + lambda_d L_D + lambda_adv L_adv  (L_adv = -L_D)
//   MeanDiscrepancy:  L_P + lambda_mmd L_MMD + lambda_cov L_cov
//   None:             L_P
LossBundle compute_loss_bundle(const EmbeddingBatch& batch, const ModelParams& params,
                               AdaptMethod method, const AdaptWeights& weights,
                               LossMode loss_mode);

// Descent directions for each parameter group (the trainer subtracts
// lr * direction):
//   GradientReversal: theta_P <- dL_P, theta_D <- lambda_d dL_D,
//                     theta_emb <- dL_P - lambda_adv dL_D
//   MeanDiscrepancy:  theta_P <- dL_P, theta_D <- 0,
//                     theta_emb <- dL_P + lambda_mmd dL_MMD + lambda_cov dL_cov
//   None:             plain dL_P, theta_D <- 0
// Throws ConfigError if `method` differs from the method of `bundle`.
ModelParams route_gradients(const LossBundle& bundle, const AdaptWeights& weights,
                            AdaptMethod method, const EmbeddingBatch& batch,
                            const ModelParams& params);

// Gradient of the scalar `bundle.total` wrt every parameter. Differs from
// the routed update for gradient reversal, where the total's theta_D and
// theta_emb gradients both carry (lambda_d - lambda_adv) dL_D.
ModelParams total_loss_gradient(const LossBundle& bundle, const AdaptWeights& weights,
                                const EmbeddingBatch& batch, const ModelParams& params);

}  // namespace darank

#endif  // DARANK_ADAPT_ROUTING_H_
