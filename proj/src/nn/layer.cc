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

#include "darank/nn/layer.h"

#include <cmath>
#include <string>

#include "darank/common/error.h"

namespace darank {
namespace {

std::string shape_of(Eigen::Index rows, Eigen::Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void check_input(const LayerParams& layer, Eigen::Index in_dim) {
  if (in_dim != layer.in_dim()) {
    throw ShapeError("layer expects input of length " +
                     std::to_string(layer.in_dim()) + ", got " +
                     std::to_string(in_dim));
  }
}

}  // namespace

LayerParams zeros_like(const LayerParams& layer) {
  return LayerParams(layer.out_dim(), layer.in_dim());
}

void check_layer(const LayerParams& layer) {
  if (layer.bias.size() != layer.out_dim()) {
    throw ShapeError("bias of length " + std::to_string(layer.bias.size()) +
                     " for weight " +
                     shape_of(layer.weight.rows(), layer.weight.cols()));
  }
  if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
    throw ShapeError("layer holds non-finite parameters");
  }
}

double tanh_activation(double t) {
  // std::tanh evaluates the same ratio without forming e^{2t}.
  return std::tanh(t);
}

Vector affine_forward(const LayerParams& layer, const Vector& x) {
  check_input(layer, x.size());
  return layer.weight * x + layer.bias;
}

LayerGrads layer_backward(const LayerParams& layer, Activation activation,
                          const Vector& x, const Vector& upstream_grad) {
  check_input(layer, x.size());
  if (upstream_grad.size() != layer.out_dim()) {
    throw ShapeError("upstream gradient of length " +
                     std::to_string(upstream_grad.size()) + " for layer with " +
                     std::to_string(layer.out_dim()) + " outputs");
  }
  Vector pre_grad = upstream_grad;
  if (activation == Activation::kTanh) {
    const Vector pre = affine_forward(layer, x);
    for (Eigen::Index i = 0; i < pre.size(); ++i) {
      const double y = tanh_activation(pre[i]);
      pre_grad[i] *= 1.0 - y * y;
    }
  }
  LayerGrads grads;
  grads.weight = pre_grad * x.transpose();
  grads.bias = pre_grad;
  grads.input = layer.weight.transpose() * pre_grad;
  return grads;
}

DenseMatrix affine_forward_batch(const LayerParams& layer, const DenseMatrix& x) {
  check_input(layer, x.cols());
  DenseMatrix out = x * layer.weight.transpose();
  out.rowwise() += layer.bias.transpose();
  return out;
}

void activate_in_place(Activation activation, DenseMatrix& values) {
  if (activation == Activation::kTanh) {
    values = values.array().tanh();
  }
}

BatchLayerGrads layer_backward_batch(const LayerParams& layer,
                                     Activation activation,
                                     const DenseMatrix& x,
                                     const DenseMatrix& output,
                                     const DenseMatrix& upstream_grad) {
  check_input(layer, x.cols());
  if (upstream_grad.rows() != x.rows() ||
      upstream_grad.cols() != layer.out_dim() ||
      output.rows() != upstream_grad.rows() ||
      output.cols() != upstream_grad.cols()) {
    throw ShapeError("upstream gradient " +
                     shape_of(upstream_grad.rows(), upstream_grad.cols()) +
                     " does not match layer output " +
                     shape_of(x.rows(), layer.out_dim()));
  }
  DenseMatrix pre_grad;
  if (activation == Activation::kTanh) {
    pre_grad = upstream_grad.array() * (1.0 - output.array().square());
  } else {
    pre_grad = upstream_grad;
  }
  BatchLayerGrads grads;
  grads.weight = pre_grad.transpose() * x;
  grads.bias = pre_grad.colwise().sum().transpose();
  grads.input = pre_grad * layer.weight;
  return grads;
}

}  // namespace darank
