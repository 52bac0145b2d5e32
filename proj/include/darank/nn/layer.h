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

#ifndef DARANK_NN_LAYER_H_
#define DARANK_NN_LAYER_H_

#include <Eigen/Dense>

namespace darank {

using Vector = Eigen::VectorXd;
// Row-major so that one row holds one sample and `data()` is the flat
// parameter layout used by checkpoints and gradient checks.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { kIdentity, kTanh };

// Affine layer y = act(W x + b) with W of shape out_dim x in_dim.
struct LayerParams {
  DenseMatrix weight;
  Vector bias;

  LayerParams() = default;
  LayerParams(Eigen::Index out_dim, Eigen::Index in_dim)
      : weight(DenseMatrix::Zero(out_dim, in_dim)), bias(Vector::Zero(out_dim)) {}

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

// Same shape as the layer, filled with zeros.
LayerParams zeros_like(const LayerParams& layer);

// Throws ShapeError if weight/bias disagree or hold non-finite values.
void check_layer(const LayerParams& layer);

// Hyperbolic tangent (e^{2t}-1)/(e^{2t}+1); saturates without overflow.
double tanh_activation(double t);

// W x + b.
Vector affine_forward(const LayerParams& layer, const Vector& x);

struct LayerGrads {
  DenseMatrix weight;
  Vector bias;
  Vector input;
};

// Gradients of act(W x + b) given the upstream gradient wrt the output.
LayerGrads layer_backward(const LayerParams& layer, Activation activation,
                          const Vector& x, const Vector& upstream_grad);

// Batched forms: one sample per row of `x`.
DenseMatrix affine_forward_batch(const LayerParams& layer, const DenseMatrix& x);
void activate_in_place(Activation activation, DenseMatrix& values);

struct BatchLayerGrads {
  DenseMatrix weight;
  Vector bias;
  DenseMatrix input;
};

// `output` is the post-activation value produced by the forward pass; the
// tanh derivative is recovered from it as 1 - y^2.
BatchLayerGrads layer_backward_batch(const LayerParams& layer,
                                     Activation activation,
                                     const DenseMatrix& x,
                                     const DenseMatrix& output,
                                     const DenseMatrix& upstream_grad);

}  // namespace darank

#endif  // DARANK_NN_LAYER_H_
