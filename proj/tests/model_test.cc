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
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "darank/common/error.h"
#include "darank/model/embedder.h"
#include "darank/model/model.h"
#include "darank/model/ranker.h"
#include "darank/nn/grad_check.h"
#include "test_util.h"

namespace darank {
namespace {

using testing::micro_dims;
using testing::micro_meta;
using testing::pointers;
using testing::random_queries;

template <typename P>
std::vector<double> flat_blocks(const P& p) {
  std::vector<double> out;
  for_each_block(p, [&](std::span<const double> b) { out.insert(out.end(), b.begin(), b.end()); });
  return out;
}

template <typename P>
void load_blocks(std::span<const double> values, P& p) {
  std::size_t k = 0;
  for_each_block(p, [&](std::span<double> b) {
    for (double& v : b) v = values[k++];
  });
}

// Perturbs every parameter so biases are nonzero and tanh is off its linear part.
template <typename P>
void jitter(P& p, std::mt19937_64& rng, double scale = 0.3) {
  std::normal_distribution<double> n(0.0, scale);
  for_each_block(p, [&](std::span<double> b) {
    for (double& v : b) v += n(rng);
  });
}

std::vector<bool> clicks_of(const QueryExample& q) {
  std::vector<bool> c;
  for (const auto& d : q.docs) c.push_back(d.clicked);
  return c;
}

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// ---- embedder ----

struct EmbedderFixture : ::testing::Test {
  CorpusMeta meta = micro_meta();
  std::mt19937_64 rng{4};
  EmbedderParams params = init_embedder(meta, micro_dims().embedder, rng);
};

TEST_F(EmbedderFixture, ZeroNetworkGivesZeroEmbeddings) {
  const EmbedderParams zero = zeros_like(params);
  const auto qs = random_queries(meta, rng, 2, 0);
  EXPECT_EQ(embed(qs[0], zero).cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(EmbedderFixture, OneHotLookupHandComputation) {
  EmbedderParams p = zeros_like(params);
  // query_dim 4: row 0 of the query table is e_0; final layer copies slot 0.
  p.query_table(0, 0) = 1.0;
  p.final_layer.weight(0, 0) = 1.0;
  QueryExample q = random_queries(meta, rng, 1, 0)[0];
  q.query_ngram_ids = {0};
  for (auto& d : q.docs) std::fill(d.dense_features.begin(), d.dense_features.end(), 0.0);
  const DenseMatrix x = embed(q, p);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    EXPECT_NEAR(x(r, 0), std::tanh(1.0), 1e-15);
    EXPECT_EQ(x.row(r).tail(x.cols() - 1).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST_F(EmbedderFixture, MeanPoolingWithMultiplicity) {
  EmbedderParams p = zeros_like(params);
  p.query_table(1, 0) = 3.0;
  p.query_table(2, 0) = 6.0;
  p.final_layer.weight(0, 0) = 0.1;
  QueryExample q = random_queries(meta, rng, 1, 0)[0];
  for (auto& d : q.docs) std::fill(d.dense_features.begin(), d.dense_features.end(), 0.0);
  q.query_ngram_ids = {1, 2, 2};
  EXPECT_NEAR(embed(q, p)(0, 0), std::tanh(0.1 * 5.0), 1e-15);
}

TEST_F(EmbedderFixture, PermutingIdsLeavesEmbeddingUnchanged) {
  QueryExample q = random_queries(meta, rng, 1, 0)[0];
  q.query_ngram_ids = {3, 7, 11, 7};
  q.docs[0].sparse_ngram_ids = {1, 2, 19};
  const DenseMatrix before = embed(q, params);
  std::reverse(q.query_ngram_ids.begin(), q.query_ngram_ids.end());
  std::rotate(q.docs[0].sparse_ngram_ids.begin(), q.docs[0].sparse_ngram_ids.begin() + 1,
              q.docs[0].sparse_ngram_ids.end());
  EXPECT_LT((embed(q, params) - before).cwiseAbs().maxCoeff(), 1e-15);
}

TEST_F(EmbedderFixture, EmptyBagsAreZeroSlots) {
  QueryExample q = random_queries(meta, rng, 1, 0)[0];
  q.query_ngram_ids.clear();
  for (auto& d : q.docs) d.sparse_ngram_ids.clear();
  EmbedderParams p = params;
  p.query_table.setConstant(100.0);
  p.doc_table.setConstant(100.0);
  EXPECT_LT((embed(q, p) - embed(q, params)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST_F(EmbedderFixture, DenseFeaturesMatter) {
  QueryExample q = random_queries(meta, rng, 1, 0)[0];
  const DenseMatrix before = embed(q, params);
  for (auto& d : q.docs) {
    for (double& v : d.dense_features) v *= 2.0;
  }
  EXPECT_GT((embed(q, params) - before).cwiseAbs().maxCoeff(), 1e-6);
}

TEST_F(EmbedderFixture, BatchRowsMatchPerQueryEmbedding) {
  const auto qs = random_queries(meta, rng, 2, 2);
  const auto ptrs = pointers(qs);
  const EmbeddingBatch b = embed_batch(ptrs, params);
  ASSERT_EQ(b.offsets.size(), 5u);
  EXPECT_EQ(b.offsets.back(), b.embeddings.rows());
  EXPECT_EQ(b.embeddings.cols(), 8);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const DenseMatrix single = embed(qs[i], params);
    EXPECT_EQ(b.embeddings.middleRows(b.offsets[i], single.rows()), single);
  }
}

TEST_F(EmbedderFixture, OutOfRangeIdIsVocabError) {
  QueryExample q = random_queries(meta, rng, 1, 0)[0];
  q.query_ngram_ids.push_back(meta.vocab_size);
  EXPECT_THROW(embed(q, params), VocabError);
  q.query_ngram_ids.back() = 0;
  q.docs[2].sparse_ngram_ids.push_back(-3);
  EXPECT_THROW(embed(q, params), VocabError);
}

TEST_F(EmbedderFixture, BackwardMatchesFiniteDifferences) {
  jitter(params, rng);
  const auto qs = random_queries(meta, rng, 1, 0);
  const auto ptrs = pointers(qs);
  const EmbeddingBatch b = embed_batch(ptrs, params);
  std::normal_distribution<double> n(0.0, 1.0);
  DenseMatrix up(b.embeddings.rows(), b.embeddings.cols());
  for (Eigen::Index i = 0; i < up.size(); ++i) up.data()[i] = n(rng);

  LossWithGradient fn = [&](std::span<const double> p, std::span<double> grad) {
    EmbedderParams local = params;
    load_blocks(p, local);
    const EmbeddingBatch lb = embed_batch(ptrs, local);
    if (!grad.empty()) {
      const auto g = flat_blocks(embed_backward(lb, local, up));
      std::copy(g.begin(), g.end(), grad.begin());
    }
    return (lb.embeddings.array() * up.array()).sum();
  };
  const auto flat = flat_blocks(params);
  EXPECT_LT(grad_check(fn, flat).max_relative_error, 1e-6);
}

TEST_F(EmbedderFixture, UnusedRowsGetExactlyZeroGradient) {
  const auto qs = random_queries(meta, rng, 2, 0);
  const auto ptrs = pointers(qs);
  const EmbeddingBatch b = embed_batch(ptrs, params);
  const EmbedderParams g =
      embed_backward(b, params, DenseMatrix::Ones(b.embeddings.rows(), b.embeddings.cols()));
  std::vector<bool> qused(meta.vocab_size, false), dused(meta.vocab_size, false);
  for (const auto& q : qs) {
    for (auto id : q.query_ngram_ids) qused[id] = true;
    for (const auto& d : q.docs) {
      for (auto id : d.sparse_ngram_ids) dused[id] = true;
    }
  }
  for (std::int64_t r = 0; r < meta.vocab_size; ++r) {
    if (!qused[r]) EXPECT_EQ(g.query_table.row(r).cwiseAbs().maxCoeff(), 0.0) << r;
    if (!dused[r]) EXPECT_EQ(g.doc_table.row(r).cwiseAbs().maxCoeff(), 0.0) << r;
  }
  const EmbedderParams z = embed_backward(b, params, DenseMatrix::Zero(b.embeddings.rows(),
                                                                       b.embeddings.cols()));
  for (double v : flat_blocks(z)) EXPECT_EQ(v, 0.0);
}

// ---- ranker ----

TEST(RankerTest, ZeroParamsScoreZero) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {5, 3};
  RankerParams p = init_ranker(4, hidden, rng);
  for_each_block(p.net, [](std::span<double> b) { std::fill(b.begin(), b.end(), 0.0); });
  EXPECT_EQ(score(Vector::Random(4), p), 0.0);
}

TEST(RankerTest, HandEvaluatedSingleUnit) {
  std::mt19937_64 rng(1);
  const std::vector<int> hidden = {1};
  RankerParams p = init_ranker(1, hidden, rng);
  p.net.hidden_layers[0].weight(0, 0) = 1.0;
  p.net.hidden_layers[0].bias[0] = 0.0;
  p.net.output_layer.weight(0, 0) = 2.0;
  p.net.output_layer.bias[0] = 1.0;
  Vector x(1);
  x[0] = 0.5;
  EXPECT_NEAR(score(x, p), 1.924234, 1e-6);
}

TEST(RankerTest, ScoresIndependentOfBatchComposition) {
  std::mt19937_64 rng(2);
  const std::vector<int> hidden = {6};
  const RankerParams p = init_ranker(3, hidden, rng);
  DenseMatrix x = DenseMatrix::Random(5, 3);
  const Vector all = score_batch(x, p);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    EXPECT_DOUBLE_EQ(all[r], score(x.row(r).transpose(), p));
  }
}

TEST(RankerTest, ShapeMismatchThrows) {
  std::mt19937_64 rng(2);
  const std::vector<int> hidden = {6};
  const RankerParams p = init_ranker(3, hidden, rng);
  EXPECT_THROW(score(Vector::Zero(4), p), ShapeError);
}

TEST(QueryLossTest, ZeroScores) {
  const std::vector<double> s(6, 0.0);
  const bool c[] = {false, false, true, false, false, false};
  EXPECT_NEAR(query_loss(s, c, LossMode::kLiteralSigmoid), 0.693147, 1e-6);
  EXPECT_NEAR(query_loss(s, c, LossMode::kSoftmaxOverCandidates), 1.791759, 1e-6);
}

TEST(QueryLossTest, PerfectConfidenceLimit) {
  std::vector<double> s = {0.0, 800.0, -3.0};
  const bool c[] = {false, true, false};
  EXPECT_NEAR(query_loss(s, c, LossMode::kLiteralSigmoid), 0.0, 1e-12);
  EXPECT_NEAR(query_loss(s, c, LossMode::kSoftmaxOverCandidates), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(query_loss(std::vector<double>{-800.0, 800.0, 0.0}, c,
                                       LossMode::kLiteralSigmoid)));
}

TEST(QueryLossTest, ShiftInvarianceOnlyForSoftmax) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 2.0);
  const bool c[] = {false, false, false, true, false, false};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(6), t(6);
    const double shift = n(rng) * 10;
    for (int i = 0; i < 6; ++i) {
      s[i] = n(rng);
      t[i] = s[i] + shift;
    }
    EXPECT_NEAR(query_loss(s, c, LossMode::kSoftmaxOverCandidates),
                query_loss(t, c, LossMode::kSoftmaxOverCandidates), 1e-9);
    EXPECT_GT(std::abs(query_loss(s, c, LossMode::kLiteralSigmoid) -
                       query_loss(t, c, LossMode::kLiteralSigmoid)),
              1e-6);
    for (LossMode m : {LossMode::kLiteralSigmoid, LossMode::kSoftmaxOverCandidates,
                       LossMode::kBinaryCrossEntropy}) {
      EXPECT_GT(query_loss(s, c, m), 0.0);
    }
  }
}

TEST(QueryLossTest, MatchesDirectFormulas) {
  const std::vector<double> s = {0.3, -1.2, 2.0, 0.7};
  const bool c[] = {false, true, false, false};
  double z = 0.0;
  for (double v : s) z += std::exp(v);
  EXPECT_NEAR(query_loss(s, c, LossMode::kSoftmaxOverCandidates), -std::log(std::exp(-1.2) / z),
              1e-12);
  EXPECT_NEAR(query_loss(s, c, LossMode::kLiteralSigmoid), -std::log(logistic(-1.2)), 1e-12);
  double bce = -std::log(logistic(-1.2));
  for (int i : {0, 2, 3}) bce -= std::log(1.0 - logistic(s[i]));
  EXPECT_NEAR(query_loss(s, c, LossMode::kBinaryCrossEntropy), bce, 1e-12);
}

TEST(QueryLossTest, GradientsMatchFiniteDifferences) {
  const bool c[] = {false, false, true, false, false};
  for (LossMode m : {LossMode::kLiteralSigmoid, LossMode::kSoftmaxOverCandidates,
                     LossMode::kBinaryCrossEntropy}) {
    std::vector<double> s = {0.5, -0.2, 1.1, 0.0, -2.0};
    const QueryLoss ql = query_loss_with_grad(s, c, m);
    for (std::size_t i = 0; i < s.size(); ++i) {
      auto p = s, q = s;
      p[i] += 1e-6;
      q[i] -= 1e-6;
      EXPECT_NEAR(ql.score_grads[i], (query_loss(p, c, m) - query_loss(q, c, m)) / 2e-6, 1e-8);
    }
  }
}

TEST(QueryLossTest, ClickCountEnforced) {
  const std::vector<double> s(3, 0.0);
  const bool none[] = {false, false, false};
  const bool two[] = {true, false, true};
  EXPECT_THROW(query_loss(s, none, LossMode::kSoftmaxOverCandidates), ValidationError);
  EXPECT_THROW(query_loss(s, two, LossMode::kSoftmaxOverCandidates), ValidationError);
}

struct BatchLossFixture : ::testing::Test {
  CorpusMeta meta = micro_meta();
  std::mt19937_64 rng{6};
  ModelParams params = init_model(meta, micro_dims(), 3);
};

TEST_F(BatchLossFixture, SingleQueryEqualsQueryLoss) {
  const auto qs = random_queries(meta, rng, 1, 0);
  const auto ptrs = pointers(qs);
  const EmbeddingBatch b = embed_batch(ptrs, params.embedder);
  const Vector s = score_batch(b.embeddings, params.ranker);
  const auto clicks = clicks_of(qs[0]);
  std::vector<double> sv(s.data(), s.data() + s.size());
  std::unique_ptr<bool[]> cb(new bool[clicks.size()]);
  for (std::size_t i = 0; i < clicks.size(); ++i) cb[i] = clicks[i];
  for (LossMode m : {LossMode::kLiteralSigmoid, LossMode::kSoftmaxOverCandidates}) {
    EXPECT_NEAR(batch_loss(b, params.ranker, m).value,
                query_loss(sv, std::span<const bool>(cb.get(), clicks.size()), m), 1e-12);
  }
}

TEST_F(BatchLossFixture, DuplicatedQueryKeepsMean) {
  const auto qs = random_queries(meta, rng, 1, 0);
  const std::vector<const QueryExample*> one = {&qs[0]}, two = {&qs[0], &qs[0]};
  const double a = batch_loss(embed_batch(one, params.embedder), params.ranker,
                              LossMode::kSoftmaxOverCandidates).value;
  const double b = batch_loss(embed_batch(two, params.embedder), params.ranker,
                              LossMode::kSoftmaxOverCandidates).value;
  EXPECT_NEAR(a, b, 1e-12);
}

TEST_F(BatchLossFixture, GradientsMatchFiniteDifferences) {
  jitter(params.ranker.net, rng);
  const auto qs = random_queries(meta, rng, 2, 1);
  const auto ptrs = pointers(qs);
  const EmbeddingBatch b = embed_batch(ptrs, params.embedder);
  for (LossMode m : {LossMode::kLiteralSigmoid, LossMode::kSoftmaxOverCandidates,
                     LossMode::kBinaryCrossEntropy}) {
    LossWithGradient fn = [&](std::span<const double> p, std::span<double> grad) {
      RankerParams local = params.ranker;
      load_blocks(p, local.net);
      const RankerLoss l = batch_loss(b, local, m);
      if (!grad.empty()) {
        const auto g = flat_blocks(l.param_grads.net);
        std::copy(g.begin(), g.end(), grad.begin());
      }
      return l.value;
    };
    const auto flat = flat_blocks(params.ranker.net);
    EXPECT_LT(grad_check(fn, flat).max_relative_error, 1e-5);

    const RankerLoss l = batch_loss(b, params.ranker, m);
    for (Eigen::Index i = 0; i < b.embeddings.size(); ++i) {
      EmbeddingBatch p = b, q = b;
      p.embeddings.data()[i] += 1e-6;
      q.embeddings.data()[i] -= 1e-6;
      const double fd = (batch_loss(p, params.ranker, m).value -
                         batch_loss(q, params.ranker, m).value) / 2e-6;
      EXPECT_NEAR(l.embedding_grads.data()[i], fd, 1e-7);
    }
  }
}

TEST(RankDocumentsTest, Examples) {
  EXPECT_EQ(rank_documents(std::vector<double>{0.9, 0.1, 0.5}), (std::vector<int>{0, 2, 1}));
  EXPECT_EQ(rank_documents(std::vector<double>(5, 1.0)), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_THROW(rank_documents(std::vector<double>{0.0, std::nan("")}), NumericError);
}

TEST(RankDocumentsTest, MatchesBruteForceArgsort) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> coarse(0, 4);  // forces ties
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(6);
    for (double& v : s) v = coarse(rng) * 0.25;
    // Oracle: repeatedly take the first index holding the current maximum.
    std::vector<int> expect;
    std::vector<bool> taken(6, false);
    for (int k = 0; k < 6; ++k) {
      int best = -1;
      for (int i = 0; i < 6; ++i) {
        if (!taken[i] && (best < 0 || s[i] > s[best])) best = i;
      }
      taken[best] = true;
      expect.push_back(best);
    }
    const auto got = rank_documents(s);
    EXPECT_EQ(got, expect);
    std::vector<double> shifted = s;
    for (double& v : shifted) v += 3.0;
    EXPECT_EQ(rank_documents(shifted), got);
  }
}

// ---- whole model ----

TEST(ModelTest, InitDeterministicAndShaped) {
  const CorpusMeta meta = micro_meta();
  const ModelParams a = init_model(meta, micro_dims(), 5);
  EXPECT_EQ(flatten(a), flatten(init_model(meta, micro_dims(), 5)));
  EXPECT_NE(flatten(a), flatten(init_model(meta, micro_dims(), 6)));
  EXPECT_NO_THROW(check_model(a, meta));
  EXPECT_EQ(a.embedder.embed_dim(), 8);
  EXPECT_EQ(a.ranker.net.hidden_layers.size(), 2u);
  CorpusMeta other = meta;
  other.vocab_size = 21;
  EXPECT_THROW(check_model(a, other), ShapeError);
}

TEST(ModelTest, FlattenRoundTripAndGroups) {
  const ModelParams a = init_model(micro_meta(), micro_dims(), 5);
  const auto flat = flatten(a);
  const auto sizes = group_sizes(a);
  EXPECT_EQ(sizes[0] + sizes[1] + sizes[2], flat.size());
  ModelParams b = zeros_like(a);
  unflatten(flat, b);
  EXPECT_EQ(flatten(b), flat);
  axpy(-1.0, a, b);
  for (double v : flatten(b)) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(all_finite(a));
  b.ranker.net.output_layer.bias[0] = INFINITY;
  EXPECT_FALSE(all_finite(b));
}

TEST(ModelTest, DefaultDimensions) {
  const ModelDims d;
  EXPECT_EQ(d.embedder.embed_dim, 32);
  EXPECT_EQ(d.ranker_hidden, (std::vector<int>{256, 128, 64}));
}

}  // namespace
}  // namespace darank
