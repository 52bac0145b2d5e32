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

#include "darank/nn/feed_forward.h"

#include <cmath>
#include <string>

#include "darank/common/error.h"

namespace darank {

Eigen::Index FeedForwardNet::in_dim() const {
  return hidden_layers.empty() ? output_layer.in_dim()
                               : hidden_layers.front().in_dim();
}

void check_net(const FeedForwardNet& net) {
  Eigen::Index expected = net.in_dim();
  for (const auto& layer : net.hidden_layers) {
    check_layer(layer);
    if (layer.in_dim() != expected) {
      throw ShapeError("hidden layer input " + std::to_string(layer.in_dim()) +
                       " does not chain from " + std::to_string(expected));
    }
    expected = layer.out_dim();
  }
  check_layer(net.output_layer);
  if (net.output_layer.in_dim() != expected || net.output_layer.out_dim() != 1) {
    throw ShapeError("output layer must map " + std::to_string(expected) +
                     " inputs to a scalar");
  }
}

FeedForwardNet zeros_like(const FeedForwardNet& net) {
  FeedForwardNet out;
  out.hidden_layers.reserve(net.hidden_layers.size());
  for (const auto& layer : net.hidden_layers) {
    out.hidden_layers.push_back(zeros_like(layer));
  }
  out.output_layer = zeros_like(net.output_layer);
  return out;
}

void glorot_uniform(DenseMatrix& weight, std::mt19937_64& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(weight.rows() + weight.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index i = 0; i < weight.size(); ++i) {
    weight.data()[i] = dist(rng);
  }
}

FeedForwardNet init_feed_forward(Eigen::Index in_dim,
                                 std::span<const int> hidden_dims,
                                 std::mt19937_64& rng) {
  FeedForwardNet net;
  Eigen::Index prev = in_dim;
  for (int dim : hidden_dims) {
    LayerParams layer(dim, prev);
    glorot_uniform(layer.weight, rng);
    net.hidden_layers.push_back(std::move(layer));
    prev = dim;
  }
  net.output_layer = LayerParams(1, prev);
  glorot_uniform(net.output_layer.weight, rng);
  return net;
}

ForwardTrace forward(const FeedForwardNet& net, const DenseMatrix& x) {
  ForwardTrace trace;
  trace.activations.reserve(net.hidden_layers.size() + 1);
  trace.activations.push_back(x);
  for (const auto& layer : net.hidden_layers) {
    DenseMatrix h = affine_forward_batch(layer, trace.activations.back());
    activate_in_place(Activation::kTanh, h);
    trace.activations.push_back(std::move(h));
  }
  trace.outputs = affine_forward_batch(net.output_layer, trace.activations.back()).col(0);
  return trace;
}

Vector forward_outputs(const FeedForwardNet& net, const DenseMatrix& x) {
  if (net.hidden_layers.empty()) {
    return affine_forward_batch(net.output_layer, x).col(0);
  }
  DenseMatrix h = x;
  for (const auto& layer : net.hidden_layers) {
    h = affine_forward_batch(layer, h);
    activate_in_place(Activation::kTanh, h);
  }
  return affine_forward_batch(net.output_layer, h).col(0);
}

NetGrads backward(const FeedForwardNet& net, const ForwardTrace& trace,
                  const Vector& output_grad) {
  const Eigen::Index rows = trace.activations.front().rows();
  if (output_grad.size() != rows) {
    throw ShapeError("output gradient has " + std::to_string(output_grad.size()) +
                     " entries for a batch of " + std::to_string(rows));
  }
  NetGrads grads;
  grads.params.hidden_layers.resize(net.hidden_layers.size());

  DenseMatrix upstream = output_grad;  // rows x 1
  const auto& last = trace.activations.back();
  {
    BatchLayerGrads g = layer_backward_batch(
        net.output_layer, Activation::kIdentity, last,
        DenseMatrix::Zero(rows, 1), upstream);
    grads.params.output_layer.weight = std::move(g.weight);
    grads.params.output_layer.bias = std::move(g.bias);
    upstream = std::move(g.input);
  }
  for (std::size_t i = net.hidden_layers.size(); i-- > 0;) {
    BatchLayerGrads g = layer_backward_batch(
        net.hidden_layers[i], Activation::kTanh, trace.activations[i],
        trace.activations[i + 1], upstream);
    grads.params.hidden_layers[i].weight = std::move(g.weight);
    grads.params.hidden_layers[i].bias = std::move(g.bias);
    upstream = std::move(g.input);
  }
  grads.input = std::move(upstream);
  return grads;
}

}  // namespace darank
