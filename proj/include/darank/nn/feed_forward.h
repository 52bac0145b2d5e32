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

#ifndef DARANK_NN_FEED_FORWARD_H_
#define DARANK_NN_FEED_FORWARD_H_

#include <concepts>
#include <random>
#include <span>
#include <vector>

#include "darank/nn/layer.h"

namespace darank {

// Stack of tanh hidden layers followed by a linear scalar output layer.
// Shared by the ranking model and the domain discriminator.
struct FeedForwardNet {
  std::vector<LayerParams> hidden_layers;
  LayerParams output_layer;

  Eigen::Index in_dim() const;
};

// Throws ShapeError unless consecutive layers chain and the output is scalar.
void check_net(const FeedForwardNet& net);

FeedForwardNet zeros_like(const FeedForwardNet& net);

// Glorot-uniform weights, zero biases.
void glorot_uniform(DenseMatrix& weight, std::mt19937_64& rng);
FeedForwardNet init_feed_forward(Eigen::Index in_dim,
                                 std::span<const int> hidden_dims,
                                 std::mt19937_64& rng);

// activations[0] is the input, activations[i] the output of hidden layer i.
struct ForwardTrace {
  std::vector<DenseMatrix> activations;
  Vector outputs;
};

ForwardTrace forward(const FeedForwardNet& net, const DenseMatrix& x);
Vector forward_outputs(const FeedForwardNet& net, const DenseMatrix& x);

struct NetGrads {
  FeedForwardNet params;
  DenseMatrix input;
};

// `output_grad` holds d(loss)/d(output) for each row of the traced batch.
NetGrads backward(const FeedForwardNet& net, const ForwardTrace& trace,
                  const Vector& output_grad);

// Visits every parameter block in a fixed order (per layer: weight, bias).
template <typename Net, typename Fn>
  requires std::same_as<std::remove_const_t<Net>, FeedForwardNet>
void for_each_block(Net& net, Fn&& fn) {
  for (auto& layer : net.hidden_layers) {
    fn(std::span(layer.weight.data(), layer.weight.size()));
    fn(std::span(layer.bias.data(), layer.bias.size()));
  }
  fn(std::span(net.output_layer.weight.data(), net.output_layer.weight.size()));
  fn(std::span(net.output_layer.bias.data(), net.output_layer.bias.size()));
}

}  // namespace darank

#endif  // DARANK_NN_FEED_FORWARD_H_
