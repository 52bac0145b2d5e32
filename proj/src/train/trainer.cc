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

#include "darank/train/trainer.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "darank/eval/wmrr.h"
#include "darank/train/optimizer.h"

namespace darank {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::mt19937_64 batch_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x62617463u};
  return std::mt19937_64(seq);
}

std::string rng_to_string(const std::mt19937_64& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

std::mt19937_64 rng_from_string(const std::string& s) {
  std::istringstream in(s);
  std::mt19937_64 rng;
  in >> rng;
  if (!in) throw IncompatibleCheckpointError("checkpoint rng state is unreadable");
  return rng;
}

std::string csv_field(double v) { return std::isnan(v) ? "" : format_double(v); }

// Returns a reason string when the step must not be applied.
std::string divergence_reason(const LossBundle& b, const ModelParams& routed) {
  const std::pair<const char*, double> losses[] = {{"L_P", b.loss_p},     {"L_D", b.loss_d},
                                                   {"L_MMD", b.loss_mmd}, {"L_cov", b.loss_cov},
                                                   {"total loss", b.total}};
  for (const auto& [name, v] : losses) {
    if (!std::isfinite(v)) return std::string(name) + " is not finite";
    if (std::abs(v) > kDivergenceThreshold) {
      return std::string(name) + " = " + format_double(v) + " exceeds " +
             format_double(kDivergenceThreshold);
    }
  }
  if (!all_finite(routed)) return "gradient is not finite";
  return "";
}

}  // namespace

std::string history_csv(const TrainHistory& history) {
  std::string out = "step,loss_p,loss_aux,wmrr_target_eval\n";
  for (const HistoryRecord& r : history.records) {
    out += std::to_string(r.step) + "," + csv_field(r.loss_p) + "," + csv_field(r.loss_aux) +
           "," + csv_field(r.wmrr_target_eval) + "\n";
  }
  return out;
}

TrainResult train(const Dataset& source, const Dataset& target, const TrainConfig& cfg,
                  const std::optional<Checkpoint>& init, const TrainOptions& options) {
  validate(cfg);
  if (!(source.meta == target.meta)) {
    throw ShapeError("source and target corpora have different metadata");
  }
  const CorpusMeta& meta = source.meta;

  TrainResult result;
  Checkpoint& state = result.checkpoint;
  state.meta = meta;
  state.config = cfg;
  result.history.method = cfg.method;
  result.history.learning_rate = effective_learning_rate(cfg);

  std::mt19937_64 rng;
  bool resume = false;
  if (init) {
    if (!(init->meta == meta) ||
        architecture_fingerprint(init->meta, init->config.model) !=
            architecture_fingerprint(meta, cfg.model)) {
      throw IncompatibleCheckpointError(
          "checkpoint architecture does not match the corpus and model config");
    }
    resume = init->config.method == cfg.method &&
             training_fingerprint(init->meta, init->config) == training_fingerprint(meta, cfg);
    if (!resume && cfg.method != Method::kReTrain) {
      throw IncompatibleCheckpointError(
          "checkpoint was trained with a different configuration; only ReTrain warm-starts "
          "from it");
    }
    check_model(init->params, meta);
    state.params = init->params;
  } else if (cfg.method == Method::kReTrain) {
    throw UsageError("ReTrain needs an initial checkpoint (--init)");
  } else {
    state.params = init_model(meta, cfg.model, cfg.seed);
  }

  Optimizer optimizer(cfg.optimizer, effective_learning_rate(cfg),
                      cfg.adagrad_initial_accumulator, state.params);
  if (resume) {
    state.step = init->step;
    rng = rng_from_string(init->rng_state);
    if (cfg.optimizer == OptimizerKind::kAdagrad) {
      if (!init->adagrad_accumulators) {
        throw IncompatibleCheckpointError("checkpoint lacks Adagrad accumulators");
      }
      optimizer.set_accumulators(*init->adagrad_accumulators);
    }
  } else {
    rng = batch_rng(cfg.seed);
  }

  const AdaptMethod adapt = adapt_method(cfg.method);
  auto snapshot = [&](const ModelParams& params, std::int64_t step,
                      const std::mt19937_64& r) {
    TrainResult out;
    out.checkpoint = state;
    out.checkpoint.params = params;
    out.checkpoint.step = step;
    out.checkpoint.rng_state = rng_to_string(r);
    out.checkpoint.adagrad_accumulators = optimizer.accumulators();
    out.history = result.history;
    return out;
  };

  double sum_p = 0.0;
  double sum_aux = 0.0;
  std::int64_t interval = 0;
  const std::int64_t first = state.step;
  const std::int64_t last = first + cfg.steps;
  result.history.loss_p_trace.reserve(static_cast<std::size_t>(cfg.steps));
  for (std::int64_t step = first + 1; step <= last; ++step) {
    const std::mt19937_64 rng_before = rng;
    const Batch batch = compose_batch(source.examples, target.examples, cfg, rng);
    const EmbeddingBatch emb = embed_batch(batch.queries, batch.is_target, state.params.embedder);
    const LossBundle bundle =
        compute_loss_bundle(emb, state.params, adapt, cfg.adapt_weights, cfg.loss_mode);
    const ModelParams routed =
        route_gradients(bundle, cfg.adapt_weights, adapt, emb, state.params);
    if (options.tap) {
      options.tap(StepTap{step, &batch, &emb, &bundle, &state.params, &routed});
    }
    if (std::string why = divergence_reason(bundle, routed); !why.empty()) {
      throw DivergenceError(step, why, snapshot(state.params, step - 1, rng_before));
    }
    ModelParams before = state.params;
    optimizer.apply(routed, state.params);
    if (!all_finite(state.params)) {
      throw DivergenceError(step, "parameters overflowed", snapshot(before, step - 1, rng_before));
    }

    result.history.loss_p_trace.push_back(bundle.loss_p);
    sum_p += bundle.loss_p;
    sum_aux += adapt == AdaptMethod::kGradientReversal ? bundle.loss_d : bundle.loss_mmd;
    ++interval;
    if (step % cfg.eval_every == 0 || step == last) {
      HistoryRecord rec;
      rec.step = step;
      rec.loss_p = sum_p / static_cast<double>(interval);
      rec.loss_aux = adapt == AdaptMethod::kNone ? kNaN : sum_aux / static_cast<double>(interval);
      rec.wmrr_target_eval = options.eval_set != nullptr
                                 ? evaluate_wmrr(state.params, *options.eval_set).wmrr
                                 : kNaN;
      result.history.records.push_back(rec);
      sum_p = sum_aux = 0.0;
      interval = 0;
    }
  }
  state.step = last;
  state.rng_state = rng_to_string(rng);
  state.adagrad_accumulators = optimizer.accumulators();
  return result;
}

}  // namespace darank
