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

#include "darank/adapt/discriminator.h"

#include <cmath>

#include "darank/common/error.h"

namespace darank {
namespace {

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

DiscriminatorParams init_discriminator(Eigen::Index embed_dim,
                                       std::span<const int> hidden_dims,
                                       std::mt19937_64& rng) {
  return DiscriminatorParams{init_feed_forward(embed_dim, hidden_dims, rng)};
}

double discriminator_prob(const Vector& x, const DiscriminatorParams& params) {
  if (x.size() != params.net.in_dim()) {
    throw ShapeError("discriminator expects embeddings of length " +
                     std::to_string(params.net.in_dim()) + ", got " +
                     std::to_string(x.size()));
  }
  return sigmoid(forward_outputs(params.net, x.transpose())[0]);
}

DiscriminatorLoss discriminator_loss(const DenseMatrix& source,
                                     const DenseMatrix& target,
                                     const DiscriminatorParams& params) {
  if (source.rows() == 0 || target.rows() == 0) {
    throw ShapeError("discriminator loss needs both source and target embeddings");
  }
  if (source.cols() != params.net.in_dim() || target.cols() != params.net.in_dim()) {
    throw ShapeError("embedding width does not match the discriminator input");
  }
  const Eigen::Index ns = source.rows();
  const Eigen::Index nt = target.rows();
  DenseMatrix stacked(ns + nt, source.cols());
  stacked << source, target;

  const ForwardTrace trace = forward(params.net, stacked);
  Vector logit_grad(ns + nt);
  DiscriminatorLoss out;
  // -log D = softplus(-z), -log(1 - D) = softplus(z) for logit z.
  for (Eigen::Index i = 0; i < ns; ++i) {
    const double z = trace.outputs[i];
    out.value += softplus(-z) / static_cast<double>(ns);
    logit_grad[i] = -sigmoid(-z) / static_cast<double>(ns);
  }
  for (Eigen::Index i = 0; i < nt; ++i) {
    const double z = trace.outputs[ns + i];
    out.value += softplus(z) / static_cast<double>(nt);
    logit_grad[ns + i] = sigmoid(z) / static_cast<double>(nt);
  }
  NetGrads grads = backward(params.net, trace, logit_grad);
  out.param_grads.net = std::move(grads.params);
  out.source_grads = grads.input.topRows(ns);
  out.target_grads = grads.input.bottomRows(nt);
  return out;
}

double adversarial_loss(double discriminator_loss_value) {
  return -discriminator_loss_value;
}

}  // namespace darank
