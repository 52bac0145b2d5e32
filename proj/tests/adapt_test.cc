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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "darank/adapt/discriminator.h"
#include "darank/adapt/mmd.h"
#include "darank/adapt/routing.h"
#include "darank/common/error.h"
#include "darank/nn/grad_check.h"
#include "test_util.h"

namespace darank {
namespace {

using testing::micro_dims;
using testing::micro_meta;
using testing::pointers;
using testing::random_queries;

DenseMatrix random_rows(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                        double offset = 0.0) {
  std::normal_distribution<double> n(offset, 1.0);
  DenseMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

DenseMatrix reversed_rows(const DenseMatrix& m) { return m.colwise().reverse(); }

void jitter(FeedForwardNet& net, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 0.3);
  for_each_block(net, [&](std::span<double> b) {
    for (double& v : b) v += n(rng);
  });
}

std::vector<double> flat_net(const FeedForwardNet& net) {
  std::vector<double> out;
  for_each_block(net, [&](std::span<const double> b) { out.insert(out.end(), b.begin(), b.end()); });
  return out;
}

void load_net(std::span<const double> v, FeedForwardNet& net) {
  std::size_t k = 0;
  for_each_block(net, [&](std::span<double> b) {
    for (double& x : b) x = v[k++];
  });
}

std::vector<double> flat_embedder(const EmbedderParams& p) {
  std::vector<double> out;
  for_each_block(p, [&](std::span<const double> b) { out.insert(out.end(), b.begin(), b.end()); });
  return out;
}

// ---- discriminator ----

TEST(DiscriminatorTest, ZeroParamsGiveHalf) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {4};
  DiscriminatorParams p = init_discriminator(3, hidden, rng);
  for_each_block(p.net, [](std::span<double> b) { std::fill(b.begin(), b.end(), 0.0); });
  EXPECT_DOUBLE_EQ(discriminator_prob(Vector::Random(3), p), 0.5);
  const DiscriminatorLoss l =
      discriminator_loss(random_rows(4, 3, rng), random_rows(5, 3, rng), p);
  EXPECT_NEAR(l.value, 1.386294, 1e-6);
}

TEST(DiscriminatorTest, HandEvaluationAndMonotoneBias) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {1};
  DiscriminatorParams p = init_discriminator(1, hidden, rng);
  p.net.hidden_layers[0].weight(0, 0) = 1.0;
  p.net.output_layer.weight(0, 0) = 2.0;
  p.net.output_layer.bias[0] = 1.0;
  Vector x(1);
  x[0] = 0.5;
  const double expect = 1.0 / (1.0 + std::exp(-(2.0 * std::tanh(0.5) + 1.0)));
  EXPECT_NEAR(discriminator_prob(x, p), expect, 1e-12);
  double prev = discriminator_prob(x, p);
  for (int i = 0; i < 5; ++i) {
    p.net.output_layer.bias[0] += 0.5;
    const double now = discriminator_prob(x, p);
    EXPECT_GT(now, prev);
    prev = now;
  }
}

TEST(DiscriminatorTest, PerfectSeparationLimit) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {1};
  DiscriminatorParams p = init_discriminator(1, hidden, rng);
  p.net.hidden_layers[0].weight(0, 0) = 1.0;
  p.net.output_layer.weight(0, 0) = 60.0;
  DenseMatrix s = DenseMatrix::Constant(3, 1, 5.0), t = DenseMatrix::Constant(3, 1, -5.0);
  EXPECT_LT(discriminator_loss(s, t, p).value, 1e-20);
}

TEST(DiscriminatorTest, EmptySideThrows) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {2};
  const DiscriminatorParams p = init_discriminator(3, hidden, rng);
  EXPECT_THROW(discriminator_loss(DenseMatrix(0, 3), random_rows(2, 3, rng), p), ShapeError);
}

TEST(DiscriminatorTest, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(2);
  const std::vector<int> hidden = {5, 3};
  DiscriminatorParams p = init_discriminator(4, hidden, rng);
  jitter(p.net, rng);
  const DenseMatrix s = random_rows(6, 4, rng, 0.3), t = random_rows(9, 4, rng, -0.3);
  LossWithGradient fn = [&](std::span<const double> v, std::span<double> grad) {
    DiscriminatorParams local = p;
    load_net(v, local.net);
    const DiscriminatorLoss l = discriminator_loss(s, t, local);
    if (!grad.empty()) {
      const auto g = flat_net(l.param_grads.net);
      std::copy(g.begin(), g.end(), grad.begin());
    }
    return l.value;
  };
  const auto flat = flat_net(p.net);
  EXPECT_LT(grad_check(fn, flat).max_relative_error, 1e-5);

  const DiscriminatorLoss l = discriminator_loss(s, t, p);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    DenseMatrix a = s, b = s;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    const double fd =
        (discriminator_loss(a, t, p).value - discriminator_loss(b, t, p).value) / 2e-6;
    EXPECT_NEAR(l.source_grads.data()[i], fd, 1e-7);
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    DenseMatrix a = t, b = t;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    const double fd =
        (discriminator_loss(s, a, p).value - discriminator_loss(s, b, p).value) / 2e-6;
    EXPECT_NEAR(l.target_grads.data()[i], fd, 1e-7);
  }
}

TEST(AdversarialLossTest, Negation) {
  EXPECT_DOUBLE_EQ(adversarial_loss(1.386294), -1.386294);
  EXPECT_EQ(adversarial_loss(0.0), 0.0);
}

// ---- MMD ----

TEST(MmdTest, Examples) {
  std::mt19937_64 rng(3);
  const DenseMatrix s = random_rows(5, 3, rng);
  EXPECT_EQ(mmd_loss(s, s).value, 0.0);
  DenseMatrix a(2, 2), b(2, 2);
  a << 2, 0, 0, 0;  // mean (1, 0)
  b << 0, 1, 0, 1;  // mean (0, 1)
  EXPECT_NEAR(mmd_loss(a, b).value, 1.414214, 1e-6);
}

TEST(MmdTest, ZeroDiscrepancyUsesZeroSubgradient) {
  DenseMatrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 3, 4, 1, 2;
  const DiscrepancyLoss l = mmd_loss(a, b);
  EXPECT_LE(l.value, 1e-12);
  EXPECT_EQ(l.source_grads.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(l.target_grads.cwiseAbs().maxCoeff(), 0.0);
}

TEST(MmdTest, SymmetricAndPermutationInvariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix s = random_rows(7, 4, rng), t = random_rows(3, 4, rng, 0.5);
    const double v = mmd_loss(s, t).value;
    EXPECT_NEAR(mmd_loss(t, s).value, v, 1e-12);
    EXPECT_NEAR(mmd_loss(reversed_rows(s), t).value, v, 1e-12);
    const Eigen::RowVectorXd diff = s.colwise().mean() - t.colwise().mean();
    EXPECT_NEAR(v, diff.norm(), 1e-12);
  }
}

TEST(MmdTest, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(5);
  const DenseMatrix s = random_rows(5, 3, rng), t = random_rows(4, 3, rng, 1.0);
  const DiscrepancyLoss l = mmd_loss(s, t);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    DenseMatrix a = s, b = s;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    EXPECT_NEAR(l.source_grads.data()[i], (mmd_loss(a, t).value - mmd_loss(b, t).value) / 2e-6,
                1e-6);
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    DenseMatrix a = t, b = t;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    EXPECT_NEAR(l.target_grads.data()[i], (mmd_loss(s, a).value - mmd_loss(s, b).value) / 2e-6,
                1e-6);
  }
}

TEST(MmdTest, DimensionMismatchThrows) {
  EXPECT_THROW(mmd_loss(DenseMatrix::Zero(2, 3), DenseMatrix::Zero(2, 4)), ShapeError);
}

TEST(CovarianceTest, Examples) {
  std::mt19937_64 rng(6);
  const DenseMatrix s = random_rows(5, 3, rng);
  EXPECT_NEAR(covariance_discrepancy(s, s).value, 0.0, 1e-15);
  DenseMatrix a(2, 1), b(2, 1);
  // Sample variances (n - 1): 1 and 4.
  a << 0, std::sqrt(2.0);
  b << 0, std::sqrt(8.0);
  EXPECT_NEAR(covariance_discrepancy(a, b).value, 3.0, 1e-12);
  EXPECT_THROW(covariance_discrepancy(DenseMatrix::Zero(1, 2), DenseMatrix::Zero(3, 2)),
               ShapeError);
}

TEST(CovarianceTest, PermutationInvariantAndFiniteDifferences) {
  std::mt19937_64 rng(7);
  const DenseMatrix s = random_rows(6, 3, rng), t = random_rows(5, 3, rng, 0.2);
  const DiscrepancyLoss l = covariance_discrepancy(s, t);
  EXPECT_NEAR(covariance_discrepancy(reversed_rows(s), reversed_rows(t)).value, l.value, 1e-12);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    DenseMatrix a = s, b = s;
    a.data()[i] += 1e-6;
    b.data()[i] -= 1e-6;
    const double fd =
        (covariance_discrepancy(a, t).value - covariance_discrepancy(b, t).value) / 2e-6;
    EXPECT_NEAR(l.source_grads.data()[i], fd, 1e-6);
  }
}

// ---- routing ----

struct RoutingFixture : ::testing::Test {
  CorpusMeta meta = micro_meta();
  std::mt19937_64 rng{11};
  ModelParams params = init_model(meta, micro_dims(), 7);
  std::vector<QueryExample> queries = random_queries(meta, rng, 3, 2);
  std::vector<const QueryExample*> ptrs = pointers(queries);
  std::vector<bool> is_target = {false, false, false, true, true};
  AdaptWeights weights{0.7, 0.4, 0.9, 0.0};

  void SetUp() override {
    jitter(params.ranker.net, rng);
    jitter(params.discriminator.net, rng);
    for (auto& q : queries) {
      if (!q.is_source()) {
        for (auto& d : q.docs) {
          for (double& v : d.dense_features) v += 1.5;
        }
      }
    }
  }

  EmbeddingBatch batch(const ModelParams& p) const {
    return embed_batch(ptrs, is_target, p.embedder);
  }
  LossBundle bundle(const ModelParams& p, AdaptMethod m, const AdaptWeights& w) const {
    return compute_loss_bundle(batch(p), p, m, w, LossMode::kSoftmaxOverCandidates);
  }
  ModelParams routed(AdaptMethod m, const AdaptWeights& w) const {
    const EmbeddingBatch b = batch(params);
    return route_gradients(bundle(params, m, w), w, m, b, params);
  }
};

TEST_F(RoutingFixture, AdversarialLossIsNegatedDiscriminatorLoss) {
  const LossBundle b = bundle(params, AdaptMethod::kGradientReversal, weights);
  EXPECT_EQ(b.loss_adv, -b.loss_d);
  EXPECT_NEAR(b.total, b.loss_p + weights.lambda_d * b.loss_d + weights.lambda_adv * b.loss_adv,
              1e-12);
}

TEST_F(RoutingFixture, TotalLossGradientMatchesFiniteDifferences) {
  for (AdaptMethod m : {AdaptMethod::kMeanDiscrepancy, AdaptMethod::kGradientReversal}) {
    AdaptWeights w = weights;
    if (m == AdaptMethod::kMeanDiscrepancy) w.lambda_cov = 0.3;
    LossWithGradient fn = [&](std::span<const double> v, std::span<double> grad) {
      ModelParams local = params;
      unflatten(v, local);
      const EmbeddingBatch b = batch(local);
      const LossBundle lb =
          compute_loss_bundle(b, local, m, w, LossMode::kSoftmaxOverCandidates);
      if (!grad.empty()) {
        const auto g = flatten(total_loss_gradient(lb, w, b, local));
        std::copy(g.begin(), g.end(), grad.begin());
      }
      return lb.total;
    };
    const auto flat = flatten(params);
    const auto sizes = group_sizes(params);
    const std::vector<std::size_t> groups(sizes.begin(), sizes.end());
    EXPECT_LT(grad_check(fn, flat, 1e-5, groups).max_relative_error, 1e-5) << to_string(m);
  }
}

TEST_F(RoutingFixture, GradientReversalGroups) {
  const ModelParams gr = routed(AdaptMethod::kGradientReversal, weights);
  const ModelParams plain = routed(AdaptMethod::kNone, weights);
  // theta_P sees only L_P.
  EXPECT_EQ(flat_net(gr.ranker.net), flat_net(plain.ranker.net));
  // theta_D sees lambda_d dL_D.
  const EmbeddingBatch b = batch(params);
  const LossBundle lb = bundle(params, AdaptMethod::kGradientReversal, weights);
  const auto gd = flat_net(gr.discriminator.net);
  const auto raw = flat_net(lb.discriminator_grad_d.net);
  for (std::size_t i = 0; i < gd.size(); ++i) EXPECT_NEAR(gd[i], weights.lambda_d * raw[i], 1e-15);
  EXPECT_EQ(flat_net(plain.discriminator.net), std::vector<double>(gd.size(), 0.0));
}

TEST_F(RoutingFixture, ZeroAdversaryWeightDecouplesEmbedder) {
  AdaptWeights w = weights;
  w.lambda_adv = 0.0;
  EXPECT_EQ(flat_embedder(routed(AdaptMethod::kGradientReversal, w).embedder),
            flat_embedder(routed(AdaptMethod::kNone, w).embedder));
}

TEST_F(RoutingFixture, ZeroDiscriminatorWeightFreezesDiscriminator) {
  AdaptWeights w = weights;
  w.lambda_d = 0.0;
  for (double v : flat_net(routed(AdaptMethod::kGradientReversal, w).discriminator.net)) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST_F(RoutingFixture, EmbedderStepWithFrozenRankerIncreasesDiscriminatorLoss) {
  const ModelParams gr = routed(AdaptMethod::kGradientReversal, weights);
  const ModelParams plain = routed(AdaptMethod::kNone, weights);
  const double before = bundle(params, AdaptMethod::kGradientReversal, weights).loss_d;
  ModelParams stepped = params;
  // Only the adversarial part of the embedder update: gr - plain.
  ModelParams adv = zeros_like(params);
  adv.embedder = gr.embedder;
  axpy(-1.0, ModelParams{plain.embedder, adv.ranker, adv.discriminator}, adv);
  axpy(-1e-3, adv, stepped);
  const double after = bundle(stepped, AdaptMethod::kGradientReversal, weights).loss_d;
  EXPECT_GT(after, before);
}

TEST_F(RoutingFixture, MeanDiscrepancyGroups) {
  const ModelParams mmd = routed(AdaptMethod::kMeanDiscrepancy, weights);
  const ModelParams plain = routed(AdaptMethod::kNone, weights);
  EXPECT_EQ(flat_net(mmd.ranker.net), flat_net(plain.ranker.net));
  for (double v : flat_net(mmd.discriminator.net)) EXPECT_EQ(v, 0.0);
  EXPECT_NE(flat_embedder(mmd.embedder), flat_embedder(plain.embedder));
  AdaptWeights off = weights;
  off.lambda_mmd = 0.0;
  EXPECT_EQ(flatten(routed(AdaptMethod::kMeanDiscrepancy, off)), flatten(plain));
}

TEST_F(RoutingFixture, MethodMismatchThrows) {
  const EmbeddingBatch b = batch(params);
  const LossBundle lb = bundle(params, AdaptMethod::kMeanDiscrepancy, weights);
  EXPECT_THROW(route_gradients(lb, weights, AdaptMethod::kGradientReversal, b, params),
               ConfigError);
}

TEST(WeightsTest, NegativeOrNonFiniteRejectedWithPointer) {
  AdaptWeights w;
  EXPECT_NO_THROW(check_weights(w));
  w.lambda_mmd = -0.1;
  try {
    check_weights(w);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.pointer(), "/lambda_mmd");
  }
  w = AdaptWeights{};
  w.lambda_adv = std::nan("");
  EXPECT_THROW(check_weights(w), ConfigError);
}

}  // namespace
}  // namespace darank
