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

#ifndef DARANK_ADAPT_DISCRIMINATOR_H_
#define DARANK_ADAPT_DISCRIMINATOR_H_

#include <random>
#include <span>
#include <vector>

#include "darank/nn/feed_forward.h"

namespace darank {

// Domain classifier D over document embeddings; D(x) is the probability
// that x came from the source domain.
struct DiscriminatorParams {
  FeedForwardNet net;
};

inline const std::vector<int> kDefaultDiscriminatorHidden = {64, 32};

DiscriminatorParams init_discriminator(Eigen::Index embed_dim,
                                       std::span<const int> hidden_dims,
                                       std::mt19937_64& rng);

double discriminator_prob(const Vector& x, const DiscriminatorParams& params);

struct DiscriminatorLoss {
  double value = 0.0;
  DiscriminatorParams param_grads;
  DenseMatrix source_grads;  // d(L_D)/d(row) for each source embedding
  DenseMatrix target_grads;
};

// Cross entropy of the domain classifier:
//   -mean_S log D(x) - mean_T log(1 - D(x))
// Rows are document embeddings. Every query contributes the same number of
// documents, so the per-set row mean equals the mean over queries of the
// per-query document average.
DiscriminatorLoss discriminator_loss(const DenseMatrix& source,
                                     const DenseMatrix& target,
                                     const DiscriminatorParams& params);

// Gradient reversal objective: the negated discriminator loss.
double adversarial_loss(double discriminator_loss_value);

}  // namespace darank

#endif  // DARANK_ADAPT_DISCRIMINATOR_H_
