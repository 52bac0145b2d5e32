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

#include "darank/train/config.h"

#include <cmath>
#include <optional>

#include "darank/common/error.h"

namespace darank {

std::string to_string(Method method) {
  switch (method) {
    case Method::kTrainOnAll:
      return "TrainOnAll";
    case Method::kTrainOnDomain:
      return "TrainOnDomain";
    case Method::kReTrain:
      return "ReTrain";
    case Method::kBatchBalance:
      return "BatchBalance";
    case Method::kGradientReversal:
      return "GradientReversal";
    case Method::kMeanDiscrepancy:
      return "MeanDiscrepancy";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::kTrainOnAll, Method::kTrainOnDomain, Method::kReTrain,
                   Method::kBatchBalance, Method::kGradientReversal,
                   Method::kMeanDiscrepancy}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown training method '" + name + "'");
}

AdaptMethod adapt_method(Method method) {
  switch (method) {
    case Method::kGradientReversal:
      return AdaptMethod::kGradientReversal;
    case Method::kMeanDiscrepancy:
      return AdaptMethod::kMeanDiscrepancy;
    default:
      return AdaptMethod::kNone;
  }
}

bool is_mixed(Method method) {
  return method == Method::kBatchBalance || method == Method::kGradientReversal ||
         method == Method::kMeanDiscrepancy;
}

bool uses_source(Method method) { return method == Method::kTrainOnAll || is_mixed(method); }

bool uses_target(Method method) { return method != Method::kTrainOnAll; }

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adagrad";
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adagrad") return OptimizerKind::kAdagrad;
  throw ConfigError("unknown optimizer '" + name + "'");
}

int target_queries_per_batch(const TrainConfig& cfg) {
  return static_cast<int>(std::lround(cfg.target_fraction * cfg.batch_size));
}

double effective_learning_rate(const TrainConfig& cfg) {
  return cfg.method == Method::kReTrain ? cfg.learning_rate / cfg.retrain_lr_divisor
                                        : cfg.learning_rate;
}

void validate(const TrainConfig& cfg) {
  if (!(std::isfinite(cfg.learning_rate) && cfg.learning_rate > 0.0)) {
    throw ConfigError("/learning_rate", "must be positive");
  }
  if (!(std::isfinite(cfg.retrain_lr_divisor) && cfg.retrain_lr_divisor > 0.0)) {
    throw ConfigError("/retrain_lr_divisor", "must be positive");
  }
  if (cfg.batch_size < 1) throw ConfigError("/batch_size", "must be positive");
  if (!(cfg.target_fraction >= 0.0 && cfg.target_fraction <= 1.0)) {
    throw ConfigError("/target_fraction", "must lie in [0, 1]");
  }
  if (cfg.steps < 0) throw ConfigError("/steps", "must be non-negative");
  if (cfg.eval_every < 1) throw ConfigError("/eval_every", "must be positive");
  if (!(std::isfinite(cfg.adagrad_initial_accumulator) && cfg.adagrad_initial_accumulator > 0.0)) {
    throw ConfigError("/adagrad_initial_accumulator", "must be positive");
  }
  try {
    check_weights(cfg.adapt_weights);
  } catch (const ConfigError& e) {
    throw e.nested("/adapt_weights");
  }
  if (is_mixed(cfg.method)) {
    const int target = target_queries_per_batch(cfg);
    if (target < 1) {
      throw ConfigError("/target_fraction", to_string(cfg.method) +
                                                " needs at least one target query per batch "
                                                "(target_fraction * batch_size >= 1)");
    }
    if (cfg.method != Method::kBatchBalance && target >= cfg.batch_size) {
      throw ConfigError("/target_fraction", to_string(cfg.method) +
                                                " needs at least one source query per batch");
    }
  }
  const auto& d = cfg.model.embedder;
  if (d.query_dim < 1 || d.doc_dim < 1 || d.embed_dim < 1) {
    throw ConfigError("/model", "embedding dimensions must be positive");
  }
  for (int h : cfg.model.ranker_hidden) {
    if (h < 1) throw ConfigError("/model/ranker_hidden", "layer widths must be positive");
  }
  for (int h : cfg.model.discriminator_hidden) {
    if (h < 1) throw ConfigError("/model/discriminator_hidden", "layer widths must be positive");
  }
}

Json to_json(const ModelDims& dims) {
  return Json{{"query_dim", dims.embedder.query_dim},
              {"doc_dim", dims.embedder.doc_dim},
              {"embed_dim", dims.embedder.embed_dim},
              {"ranker_hidden", dims.ranker_hidden},
              {"discriminator_hidden", dims.discriminator_hidden}};
}

Json to_json(const AdaptWeights& w) {
  return Json{{"lambda_d", w.lambda_d},
              {"lambda_adv", w.lambda_adv},
              {"lambda_mmd", w.lambda_mmd},
              {"lambda_cov", w.lambda_cov}};
}

Json to_json(const TrainConfig& cfg) {
  return Json{{"method", to_string(cfg.method)},
              {"learning_rate", cfg.learning_rate},
              {"retrain_lr_divisor", cfg.retrain_lr_divisor},
              {"batch_size", cfg.batch_size},
              {"target_fraction", cfg.target_fraction},
              {"adapt_weights", to_json(cfg.adapt_weights)},
              {"steps", cfg.steps},
              {"seed", cfg.seed},
              {"loss_mode", to_string(cfg.loss_mode)},
              {"eval_every", cfg.eval_every},
              {"optimizer", to_string(cfg.optimizer)},
              {"adagrad_initial_accumulator", cfg.adagrad_initial_accumulator},
              {"model", to_json(cfg.model)}};
}

namespace {

template <typename Parse>
auto parse_enum(ObjectReader& r, const std::string& key, Parse parse)
    -> std::optional<decltype(parse(std::string()))> {
  const Json* v = r.take(key);
  if (v == nullptr) return std::nullopt;
  const std::string pointer = r.pointer_of(key);
  const auto name = ObjectReader::convert<std::string>(*v, pointer);
  try {
    return parse(name);
  } catch (const ConfigError& e) {
    throw e.nested(pointer);
  }
}

}  // namespace

TrainConfig train_config_from_json(const Json& j, const std::string& pointer, TrainConfig base) {
  ObjectReader r(j, pointer);
  TrainConfig cfg = std::move(base);
  if (auto m = parse_enum(r, "method", method_from_string)) cfg.method = *m;
  r.read("learning_rate", cfg.learning_rate);
  r.read("retrain_lr_divisor", cfg.retrain_lr_divisor);
  r.read("batch_size", cfg.batch_size);
  r.read("target_fraction", cfg.target_fraction);
  if (const Json* w = r.take("adapt_weights")) {
    ObjectReader wr(*w, r.pointer_of("adapt_weights"));
    wr.read("lambda_d", cfg.adapt_weights.lambda_d);
    wr.read("lambda_adv", cfg.adapt_weights.lambda_adv);
    wr.read("lambda_mmd", cfg.adapt_weights.lambda_mmd);
    wr.read("lambda_cov", cfg.adapt_weights.lambda_cov);
    wr.finish();
  }
  r.read("steps", cfg.steps);
  r.read("seed", cfg.seed);
  if (auto m = parse_enum(r, "loss_mode", loss_mode_from_string)) cfg.loss_mode = *m;
  r.read("eval_every", cfg.eval_every);
  if (auto o = parse_enum(r, "optimizer", optimizer_from_string)) cfg.optimizer = *o;
  r.read("adagrad_initial_accumulator", cfg.adagrad_initial_accumulator);
  if (const Json* m = r.take("model")) {
    ObjectReader mr(*m, r.pointer_of("model"));
    mr.read("query_dim", cfg.model.embedder.query_dim);
    mr.read("doc_dim", cfg.model.embedder.doc_dim);
    mr.read("embed_dim", cfg.model.embedder.embed_dim);
    mr.read("ranker_hidden", cfg.model.ranker_hidden);
    mr.read("discriminator_hidden", cfg.model.discriminator_hidden);
    mr.finish();
  }
  r.finish();
  return cfg;
}

}  // namespace darank
