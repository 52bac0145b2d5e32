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

#include "darank/eval/sweep.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <thread>

#include "darank/common/error.h"
#include "darank/eval/wmrr.h"
#include "darank/train/trainer.h"

namespace darank {
namespace {

SweepRow run_point(const TrainConfig& base, const AdaptWeights& w, std::size_t index,
                   const Dataset& source, const Dataset& target, const Dataset& eval_set,
                   const SweepOptions& options) {
  TrainConfig cfg = base;
  cfg.adapt_weights = w;
  if (options.distinct_seeds) cfg.seed = base.seed + index;
  SweepRow row;
  row.weights = w;
  row.seed = cfg.seed;
  try {
    const TrainResult result = train(source, target, cfg);
    row.wmrr = evaluate_wmrr(result.checkpoint.params, eval_set).wmrr;
    row.status = "ok";
  } catch (const DivergenceError& e) {
    row.status = "diverged";
    row.diverged_step = e.step();
    row.wmrr = evaluate_wmrr(e.checkpoint().params, eval_set).wmrr;
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sensitivity_sweep(const TrainConfig& base,
                                        std::span<const AdaptWeights> grid,
                                        const Dataset& source, const Dataset& target,
                                        const Dataset& eval_set, const SweepOptions& options) {
  if (grid.empty()) throw UsageError("sweep grid is empty");
  validate(base);
  for (const AdaptWeights& w : grid) check_weights(w);

  std::vector<std::optional<SweepRow>> rows(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        rows[i] = run_point(base, grid[i], i, source, target, eval_set, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers =
      std::clamp<int>(options.parallel, 1, static_cast<int>(grid.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

std::vector<AdaptWeights> grid_from_json(const Json& j, const AdaptWeights& base) {
  ObjectReader r(j, "");
  std::vector<AdaptWeights> grid;
  if (const Json* points = r.take("points")) {
    if (!points->is_array()) throw ConfigError("/points", "expected an array");
    for (std::size_t i = 0; i < points->size(); ++i) {
      ObjectReader pr((*points)[i], "/points/" + std::to_string(i));
      AdaptWeights w = base;
      pr.read("lambda_d", w.lambda_d);
      pr.read("lambda_adv", w.lambda_adv);
      pr.read("lambda_mmd", w.lambda_mmd);
      pr.read("lambda_cov", w.lambda_cov);
      pr.finish();
      grid.push_back(w);
    }
    for (const char* axis : {"lambda_d", "lambda_adv", "lambda_mmd", "lambda_cov"}) {
      if (j.contains(axis)) {
        throw ConfigError(std::string("/") + axis, "cannot combine axis lists with points");
      }
    }
    r.finish();
  } else {
    std::vector<double> axes[4];
    const char* names[4] = {"lambda_d", "lambda_adv", "lambda_mmd", "lambda_cov"};
    const double defaults[4] = {base.lambda_d, base.lambda_adv, base.lambda_mmd, base.lambda_cov};
    bool any = false;
    for (int a = 0; a < 4; ++a) {
      if (r.take(names[a]) != nullptr) {
        r.read(names[a], axes[a]);
        any = true;
        if (axes[a].empty()) return {};
      } else {
        axes[a] = {defaults[a]};
      }
    }
    r.finish();
    if (!any) return {};
    for (double d : axes[0]) {
      for (double adv : axes[1]) {
        for (double mmd : axes[2]) {
          for (double cov : axes[3]) grid.push_back(AdaptWeights{d, adv, mmd, cov});
        }
      }
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      check_weights(grid[i]);
    } catch (const ConfigError& e) {
      throw e.nested("/points/" + std::to_string(i));
    }
  }
  return grid;
}

double wmrr_spread(std::span<const SweepRow> rows) {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  for (const SweepRow& r : rows) {
    if (r.status != "ok") continue;
    lo = n == 0 ? r.wmrr : std::min(lo, r.wmrr);
    hi = n == 0 ? r.wmrr : std::max(hi, r.wmrr);
    ++n;
  }
  return n < 2 ? 0.0 : hi - lo;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "lambda_d,lambda_adv,lambda_mmd,wmrr,status\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.weights.lambda_d) + "," + format_double(r.weights.lambda_adv) + "," +
           format_double(r.weights.lambda_mmd) + "," + format_double(r.wmrr) + "," + r.status +
           "\n";
  }
  return out;
}

}  // namespace darank
