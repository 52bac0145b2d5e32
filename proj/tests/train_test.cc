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
#include <map>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "darank/common/error.h"
#include "darank/common/json_util.h"
#include "darank/synthgen/generator.h"
#include "darank/train/batch.h"
#include "darank/train/checkpoint.h"
#include "darank/train/config.h"
#include "darank/train/optimizer.h"
#include "darank/train/trainer.h"
#include "test_util.h"

namespace darank {
namespace {

using testing::micro_dims;
using testing::micro_meta;
using testing::random_queries;
using testing::temp_dir;

// Small generated corpus shared by the training tests.
const GeneratedCorpus& corpus() {
  static const GeneratedCorpus c = [] {
    GenConfig g;
    g.n_source_queries = 1500;
    g.n_target_queries = 400;
    g.vocab_size = 64;
    g.seed = 5;
    return generate(g);
  }();
  return c;
}

TrainConfig small_config(Method method, std::int64_t steps = 50) {
  TrainConfig cfg;
  cfg.method = method;
  cfg.steps = steps;
  cfg.batch_size = 16;
  cfg.eval_every = 10;
  cfg.model = micro_dims(8);
  return cfg;
}

std::string pointer_of(const TrainConfig& cfg) {
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "none";
}

// ---- batch composition ----

TEST(BatchTest, MixedBatchHasExactTargetShare) {
  std::mt19937_64 rng(1);
  const auto pool = random_queries(micro_meta(), rng, 5, 5);
  const std::vector<QueryExample> src(pool.begin(), pool.begin() + 5), tgt(pool.begin() + 5,
                                                                            pool.end());
  TrainConfig cfg;
  cfg.batch_size = 10;
  cfg.target_fraction = 0.2;
  for (Method m : {Method::kBatchBalance, Method::kGradientReversal, Method::kMeanDiscrepancy}) {
    cfg.method = m;
    const Batch b = compose_batch(src, tgt, cfg, rng);
    ASSERT_EQ(b.queries.size(), 10u);
    EXPECT_EQ(std::count(b.is_target.begin(), b.is_target.end(), true), 2);
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_FALSE(b.is_target[i]);
      EXPECT_TRUE(b.queries[i]->is_source());
    }
    for (std::size_t i = 8; i < 10; ++i) EXPECT_FALSE(b.queries[i]->is_source());
  }
}

TEST(BatchTest, SingleDomainMethods) {
  std::mt19937_64 rng(1);
  const auto pool = random_queries(micro_meta(), rng, 3, 3);
  const std::vector<QueryExample> src(pool.begin(), pool.begin() + 3), tgt(pool.begin() + 3,
                                                                            pool.end());
  TrainConfig cfg;
  cfg.batch_size = 7;
  cfg.method = Method::kTrainOnAll;
  Batch b = compose_batch(src, tgt, cfg, rng);
  EXPECT_EQ(std::count(b.is_target.begin(), b.is_target.end(), true), 0);
  for (Method m : {Method::kTrainOnDomain, Method::kReTrain}) {
    cfg.method = m;
    b = compose_batch(src, tgt, cfg, rng);
    EXPECT_EQ(std::count(b.is_target.begin(), b.is_target.end(), true), 7);
  }
  cfg.method = Method::kTrainOnDomain;
  EXPECT_THROW(compose_batch(src, {}, cfg, rng), ConfigError);
  cfg.method = Method::kBatchBalance;
  EXPECT_THROW(compose_batch({}, tgt, cfg, rng), ConfigError);
}

TEST(BatchTest, SameSeedSameSequence) {
  std::mt19937_64 g(2);
  const auto pool = random_queries(micro_meta(), g, 20, 0);
  TrainConfig cfg;
  cfg.batch_size = 8;
  std::mt19937_64 a(77), b(77);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(compose_batch(pool, {}, cfg, a).queries, compose_batch(pool, {}, cfg, b).queries);
  }
}

TEST(BatchTest, SamplingIsUniformOverPool) {
  std::mt19937_64 g(3);
  const auto pool = random_queries(micro_meta(), g, 8, 0);
  TrainConfig cfg;
  cfg.batch_size = 50;
  std::mt19937_64 rng(4);
  std::map<const QueryExample*, std::int64_t> counts;
  const int batches = 400;
  for (int i = 0; i < batches; ++i) {
    for (const QueryExample* q : compose_batch(pool, {}, cfg, rng).queries) ++counts[q];
  }
  const double expect = batches * 50 / 8.0;
  double x2 = 0;
  for (const auto& q : pool) x2 += std::pow(counts[&q] - expect, 2) / expect;
  EXPECT_LT(x2, boost::math::quantile(boost::math::chi_squared(7), 0.999));
}

// ---- config ----

TEST(TrainConfigTest, DefaultsAndRounding) {
  TrainConfig cfg;
  EXPECT_EQ(cfg.learning_rate, 0.1);
  EXPECT_EQ(cfg.retrain_lr_divisor, 10.0);
  EXPECT_EQ(cfg.target_fraction, 0.2);
  EXPECT_EQ(cfg.steps, 20000);
  EXPECT_EQ(cfg.loss_mode, LossMode::kSoftmaxOverCandidates);
  EXPECT_EQ(target_queries_per_batch(cfg), 13);  // round(12.8)
  cfg.method = Method::kReTrain;
  EXPECT_NEAR(effective_learning_rate(cfg), 0.01, 1e-15);
}

TEST(TrainConfigTest, ValidationPointers) {
  TrainConfig cfg;
  EXPECT_EQ(pointer_of(cfg), "none");
  cfg.learning_rate = 0.0;
  EXPECT_EQ(pointer_of(cfg), "/learning_rate");
  cfg = TrainConfig{};
  cfg.method = Method::kBatchBalance;
  cfg.target_fraction = 0.0;
  EXPECT_EQ(pointer_of(cfg), "/target_fraction");
  cfg.method = Method::kTrainOnAll;
  EXPECT_EQ(pointer_of(cfg), "none");
  cfg = TrainConfig{};
  cfg.method = Method::kGradientReversal;
  cfg.target_fraction = 1.0;
  EXPECT_EQ(pointer_of(cfg), "/target_fraction");
  cfg = TrainConfig{};
  cfg.adapt_weights.lambda_d = -1.0;
  EXPECT_EQ(pointer_of(cfg), "/adapt_weights/lambda_d");
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_EQ(pointer_of(cfg), "/batch_size");
}

TEST(TrainConfigTest, JsonRoundTripAndStrictKeys) {
  TrainConfig cfg;
  cfg.method = Method::kMeanDiscrepancy;
  cfg.optimizer = OptimizerKind::kAdagrad;
  cfg.adapt_weights.lambda_mmd = 0.25;
  cfg.model.ranker_hidden = {9, 3};
  cfg.seed = 123456789012345ull;
  EXPECT_EQ(train_config_from_json(to_json(cfg), "/train"), cfg);

  Json j = {{"method", "GradientReversal"}, {"adapt_weights", {{"lambda_adv", 0.5}}}};
  const TrainConfig partial = train_config_from_json(j, "/train");
  EXPECT_EQ(partial.method, Method::kGradientReversal);
  EXPECT_EQ(partial.adapt_weights.lambda_adv, 0.5);
  EXPECT_EQ(partial.adapt_weights.lambda_d, 1.0);

  auto error_pointer = [](const Json& bad) {
    try {
      train_config_from_json(bad, "/train");
    } catch (const ConfigError& e) {
      return e.pointer();
    }
    return std::string("none");
  };
  EXPECT_EQ(error_pointer({{"lerning_rate", 0.1}}), "/train/lerning_rate");
  EXPECT_EQ(error_pointer({{"method", "Bogus"}}), "/train/method");
  EXPECT_EQ(error_pointer({{"batch_size", "big"}}), "/train/batch_size");
  EXPECT_EQ(error_pointer({{"adapt_weights", {{"lambda_x", 1}}}}),
            "/train/adapt_weights/lambda_x");
}

TEST(TrainConfigTest, MethodNames) {
  for (Method m : {Method::kTrainOnAll, Method::kTrainOnDomain, Method::kReTrain,
                   Method::kBatchBalance, Method::kGradientReversal, Method::kMeanDiscrepancy}) {
    EXPECT_EQ(method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(method_from_string("MMD2"), ConfigError);
}

// ---- optimizer ----

TEST(OptimizerTest, SgdAndAdagradUpdates) {
  const ModelParams shape = init_model(micro_meta(), micro_dims(), 1);
  ModelParams dir = zeros_like(shape);
  dir.ranker.net.output_layer.bias[0] = 2.0;

  ModelParams p = shape;
  Optimizer sgd(OptimizerKind::kSgd, 0.1, 0.1, shape);
  sgd.apply(dir, p);
  EXPECT_NEAR(p.ranker.net.output_layer.bias[0], shape.ranker.net.output_layer.bias[0] - 0.2,
              1e-15);
  EXPECT_FALSE(sgd.accumulators().has_value());

  p = shape;
  Optimizer ada(OptimizerKind::kAdagrad, 0.1, 0.1, shape);
  ada.apply(dir, p);
  ada.apply(dir, p);
  const double b0 = shape.ranker.net.output_layer.bias[0];
  const double expect = b0 - 0.1 * 2 / std::sqrt(4.1) - 0.1 * 2 / std::sqrt(8.1);
  EXPECT_NEAR(p.ranker.net.output_layer.bias[0], expect, 1e-14);
  EXPECT_NEAR(ada.accumulators()->ranker.net.output_layer.bias[0], 8.1, 1e-14);
  // Entries with zero gradient neither move nor accumulate.
  EXPECT_EQ(p.embedder.doc_table, shape.embedder.doc_table);
  EXPECT_EQ(p.discriminator.net.output_layer.weight, shape.discriminator.net.output_layer.weight);
  EXPECT_NEAR(ada.accumulators()->embedder.doc_table(0, 0), 0.1, 1e-15);

  ModelParams wrong = init_model(micro_meta(), micro_dims(4), 1);
  EXPECT_THROW(ada.set_accumulators(wrong), IncompatibleCheckpointError);
}

// ---- training ----

TEST(TrainTest, ZeroStepsReturnsInitialization) {
  TrainConfig cfg = small_config(Method::kTrainOnAll, 0);
  const TrainResult r = train(corpus().source, corpus().target, cfg);
  EXPECT_EQ(flatten(r.checkpoint.params), flatten(init_model(corpus().source.meta, cfg.model,
                                                             cfg.seed)));
  EXPECT_TRUE(r.history.records.empty());
  EXPECT_EQ(r.checkpoint.step, 0);
}

TEST(TrainTest, FullDeterminism) {
  const TrainConfig cfg = small_config(Method::kGradientReversal);
  const TrainResult a = train(corpus().source, corpus().target, cfg);
  const TrainResult b = train(corpus().source, corpus().target, cfg);
  EXPECT_EQ(flatten(a.checkpoint.params), flatten(b.checkpoint.params));
  EXPECT_EQ(a.history.loss_p_trace, b.history.loss_p_trace);
  EXPECT_EQ(history_csv(a.history), history_csv(b.history));
  TrainConfig other = cfg;
  other.seed = 43;
  EXPECT_NE(train(corpus().source, corpus().target, other).history.loss_p_trace,
            a.history.loss_p_trace);
}

TEST(TrainTest, ZeroMmdWeightMatchesBatchBalanceStepForStep) {
  TrainConfig mmd = small_config(Method::kMeanDiscrepancy);
  mmd.adapt_weights.lambda_mmd = 0.0;
  TrainConfig bb = small_config(Method::kBatchBalance);
  const TrainResult a = train(corpus().source, corpus().target, mmd);
  const TrainResult b = train(corpus().source, corpus().target, bb);
  EXPECT_EQ(a.history.loss_p_trace, b.history.loss_p_trace);
  EXPECT_EQ(flatten(a.checkpoint.params), flatten(b.checkpoint.params));
}

TEST(TrainTest, HistoryRecordsAndCsv) {
  TrainConfig cfg = small_config(Method::kMeanDiscrepancy, 25);
  const TrainResult r = train(corpus().source, corpus().target, cfg, std::nullopt,
                              TrainOptions{&corpus().target, {}});
  std::vector<std::int64_t> steps;
  for (const auto& rec : r.history.records) {
    steps.push_back(rec.step);
    EXPECT_TRUE(std::isfinite(rec.loss_aux));
    EXPECT_GT(rec.wmrr_target_eval, 0.0);
  }
  EXPECT_EQ(steps, (std::vector<std::int64_t>{10, 20, 25}));
  const std::string csv = history_csv(r.history);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "step,loss_p,loss_aux,wmrr_target_eval");

  cfg.method = Method::kTrainOnAll;
  const TrainResult plain = train(corpus().source, corpus().target, cfg);
  EXPECT_TRUE(std::isnan(plain.history.records[0].loss_aux));
  const std::string pcsv = history_csv(plain.history);
  const std::string row = pcsv.substr(pcsv.find('\n') + 1);
  EXPECT_EQ(row.substr(0, 3), "10,");
  EXPECT_NE(row.find(",,\n"), std::string::npos);
}

TEST(TrainTest, ResumeEqualsUninterrupted) {
  for (OptimizerKind opt : {OptimizerKind::kSgd, OptimizerKind::kAdagrad}) {
    TrainConfig full = small_config(Method::kGradientReversal, 40);
    full.optimizer = opt;
    TrainConfig half = full;
    half.steps = 20;
    const TrainResult uninterrupted = train(corpus().source, corpus().target, full);
    const TrainResult first = train(corpus().source, corpus().target, half);
    const auto dir = temp_dir("resume");
    save_checkpoint(first.checkpoint, dir / "cp.json");
    const Checkpoint loaded = load_checkpoint(dir / "cp.json");
    const TrainResult second = train(corpus().source, corpus().target, half, loaded);
    EXPECT_EQ(second.checkpoint.step, 40);
    EXPECT_EQ(flatten(second.checkpoint.params), flatten(uninterrupted.checkpoint.params));
    std::vector<double> joined = first.history.loss_p_trace;
    joined.insert(joined.end(), second.history.loss_p_trace.begin(),
                  second.history.loss_p_trace.end());
    EXPECT_EQ(joined, uninterrupted.history.loss_p_trace);
  }
}

TEST(TrainTest, RetrainWarmStartsWithLowerRate) {
  const TrainResult base = train(corpus().source, corpus().target,
                                 small_config(Method::kTrainOnAll, 20));
  TrainConfig rt = small_config(Method::kReTrain, 15);
  const TrainResult r = train(corpus().source, corpus().target, rt, base.checkpoint);
  EXPECT_NEAR(r.history.learning_rate, 0.01, 1e-15);
  EXPECT_EQ(r.checkpoint.step, 15);
  EXPECT_NE(flatten(r.checkpoint.params), flatten(base.checkpoint.params));
  EXPECT_THROW(train(corpus().source, corpus().target, rt), UsageError);
}

TEST(TrainTest, IncompatibleCheckpoints) {
  const TrainResult base = train(corpus().source, corpus().target,
                                 small_config(Method::kTrainOnAll, 5));
  TrainConfig other = small_config(Method::kReTrain, 5);
  other.model.embedder.embed_dim = 6;
  EXPECT_THROW(train(corpus().source, corpus().target, other, base.checkpoint),
               IncompatibleCheckpointError);
  // A different method may not continue someone else's run.
  EXPECT_THROW(train(corpus().source, corpus().target, small_config(Method::kBatchBalance, 5),
                     base.checkpoint),
               IncompatibleCheckpointError);
}

TEST(TrainTest, DiscriminatorGetsNoPredictionOrAdversaryGradient) {
  TrainConfig cfg = small_config(Method::kGradientReversal, 8);
  cfg.adapt_weights = AdaptWeights{0.6, 2.0, 1.0, 0.0};
  int seen = 0;
  TrainOptions opts;
  opts.tap = [&](const StepTap& tap) {
    ++seen;
    std::vector<double> routed, raw;
    for_each_block(tap.routed->discriminator.net,
                   [&](std::span<const double> b) { routed.insert(routed.end(), b.begin(), b.end()); });
    for_each_block(tap.bundle->discriminator_grad_d.net,
                   [&](std::span<const double> b) { raw.insert(raw.end(), b.begin(), b.end()); });
    for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_NEAR(routed[i], 0.6 * raw[i], 1e-15);
  };
  train(corpus().source, corpus().target, cfg, std::nullopt, opts);
  EXPECT_EQ(seen, 8);
}

TEST(TrainTest, DivergenceCarriesLastFiniteCheckpoint) {
  TrainConfig cfg = small_config(Method::kGradientReversal, 500);
  cfg.learning_rate = 1e9;
  try {
    train(corpus().source, corpus().target, cfg);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.step(), 1);
    EXPECT_EQ(e.checkpoint().step, e.step() - 1);
    EXPECT_TRUE(all_finite(e.checkpoint().params));
  }
}

TEST(TrainTest, MismatchedCorporaRejected) {
  Dataset other = corpus().target;
  other.meta.dense_dim += 1;
  EXPECT_THROW(train(corpus().source, other, small_config(Method::kTrainOnAll, 1)), ShapeError);
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

// Median L_P of the last tenth of the steps is below that of the first tenth.
TEST(TrainTest, LossFallsForEveryMethod) {
  TrainConfig base_cfg = small_config(Method::kTrainOnAll, 1500);
  base_cfg.batch_size = 32;
  const TrainResult base = train(corpus().source, corpus().target, base_cfg);
  for (Method m : {Method::kTrainOnAll, Method::kTrainOnDomain, Method::kReTrain,
                   Method::kBatchBalance, Method::kGradientReversal, Method::kMeanDiscrepancy}) {
    TrainConfig cfg = base_cfg;
    cfg.method = m;
    const TrainResult r = m == Method::kReTrain
                              ? train(corpus().source, corpus().target, cfg, base.checkpoint)
                              : train(corpus().source, corpus().target, cfg);
    const auto& t = r.history.loss_p_trace;
    const std::size_t tenth = t.size() / 10;
    const double first = median(std::vector<double>(t.begin(), t.begin() + tenth));
    const double last = median(std::vector<double>(t.end() - tenth, t.end()));
    EXPECT_LT(last, first) << to_string(m);
  }
}

// ---- checkpoints ----

TEST(CheckpointTest, LosslessRoundTrip) {
  TrainConfig cfg = small_config(Method::kMeanDiscrepancy, 5);
  cfg.optimizer = OptimizerKind::kAdagrad;
  const TrainResult r = train(corpus().source, corpus().target, cfg);
  const auto dir = temp_dir("checkpoint");
  save_checkpoint(r.checkpoint, dir / "cp.json");
  const Checkpoint c = load_checkpoint(dir / "cp.json");
  EXPECT_EQ(c.meta, r.checkpoint.meta);
  EXPECT_EQ(c.config, r.checkpoint.config);
  EXPECT_EQ(c.step, r.checkpoint.step);
  EXPECT_EQ(c.rng_state, r.checkpoint.rng_state);
  EXPECT_EQ(flatten(c.params), flatten(r.checkpoint.params));
  ASSERT_TRUE(c.adagrad_accumulators.has_value());
  EXPECT_EQ(flatten(*c.adagrad_accumulators), flatten(*r.checkpoint.adagrad_accumulators));
}

TEST(CheckpointTest, TamperingDetected) {
  const TrainResult r =
      train(corpus().source, corpus().target, small_config(Method::kTrainOnAll, 2));
  Json j = to_json(r.checkpoint);
  EXPECT_NO_THROW(checkpoint_from_json(j));
  Json bad = j;
  bad["version"] = kCheckpointVersion + 1;
  EXPECT_THROW(checkpoint_from_json(bad), IncompatibleCheckpointError);
  bad = j;
  bad["config"]["learning_rate"] = 0.5;
  EXPECT_THROW(checkpoint_from_json(bad), IncompatibleCheckpointError);
  bad = j;
  bad["params"]["prediction"].erase(0);
  EXPECT_THROW(checkpoint_from_json(bad), IncompatibleCheckpointError);
  EXPECT_THROW(load_checkpoint("/nonexistent/cp.json"), IoError);
}

TEST(CheckpointTest, FingerprintsSeparateArchitectureFromTraining) {
  const CorpusMeta meta = micro_meta();
  TrainConfig a;
  TrainConfig b = a;
  b.steps = 7;
  b.eval_every = 3;
  EXPECT_EQ(training_fingerprint(meta, a), training_fingerprint(meta, b));
  b.learning_rate = 0.2;
  EXPECT_NE(training_fingerprint(meta, a), training_fingerprint(meta, b));
  EXPECT_EQ(architecture_fingerprint(meta, a.model), architecture_fingerprint(meta, b.model));
  b.model.embedder.embed_dim = 31;
  EXPECT_NE(architecture_fingerprint(meta, a.model), architecture_fingerprint(meta, b.model));
}

}  // namespace
}  // namespace darank
