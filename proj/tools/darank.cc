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

// Command-line entry point: generate | train | evaluate | diagnose | sweep.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "darank/cli/commands.h"

namespace {

using darank::fs::path;

std::optional<path> opt_path(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<path>(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"darank: domain adaptation for click-based learning to rank"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string data;
  std::string init;
  std::string grid;
  std::string checkpoint;
  std::string compare;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallel;
  std::vector<std::string> splits;
  std::vector<std::string> domains;
  std::string split = "eval";
  double split_ratio = 5.0 / 6.0;
  int bins = 50;
  bool uncentered = false;
  bool source_only = false;

  auto* gen = app.add_subcommand("generate", "generate a synthetic source/target corpus");
  gen->add_option("--config", config, "run config JSON");
  gen->add_option("--seed", seed, "seed for generation and training");
  gen->add_option("--out", out, "output directory")->required();

  auto* tr = app.add_subcommand("train", "train one method on a generated corpus");
  tr->add_option("--config", config, "run config JSON");
  tr->add_option("--seed", seed, "seed for generation and training");
  tr->add_option("--data", data, "corpus directory")->required();
  tr->add_option("--out", out, "output directory")->required();
  tr->add_option("--init", init, "checkpoint to warm-start (ReTrain) or resume from");

  auto* ev = app.add_subcommand("evaluate", "WMRR of a checkpoint, optionally compared");
  ev->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  ev->add_option("--data", data, "corpus directory")->required();
  ev->add_option("--out", out, "output directory")->required();
  ev->add_option("--compare", compare, "second checkpoint for a paired t-test");
  ev->add_option("--split", splits, "all, train or eval (repeatable; default eval)");
  ev->add_option("--domain", domains, "source or target (repeatable; default both)");
  ev->add_option("--split-ratio", split_ratio, "temporal split ratio");

  auto* dg = app.add_subcommand("diagnose", "embedding mean norms and projection histograms");
  dg->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  dg->add_option("--data", data, "corpus directory")->required();
  dg->add_option("--out", out, "output directory")->required();
  dg->add_option("--split", split, "all, train or eval");
  dg->add_option("--split-ratio", split_ratio, "temporal split ratio");
  dg->add_option("--bins", bins, "histogram bins");
  dg->add_flag("--uncentered", uncentered, "skip column centering before the SVD");
  dg->add_flag("--source-only", source_only, "use the source set on both sides");

  auto* sw = app.add_subcommand("sweep", "train one run per adaptation-weight grid point");
  sw->add_option("--config", config, "run config JSON");
  sw->add_option("--seed", seed, "seed for generation and training");
  sw->add_option("--data", data, "corpus directory")->required();
  sw->add_option("--grid", grid, "grid JSON")->required();
  sw->add_option("--out", out, "output directory")->required();
  sw->add_option("--parallel", parallel, "concurrent training runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? darank::kExitOk : darank::kExitUsage;
  }

  try {
    if (*gen) {
      darank::cmd_generate(darank::load_run_config(opt_path(config), seed), out);
    } else if (*tr) {
      darank::cmd_train(darank::load_run_config(opt_path(config), seed), data, out,
                        opt_path(init));
    } else if (*ev) {
      darank::EvaluateArgs args;
      args.checkpoint = checkpoint;
      args.data_dir = data;
      args.out_dir = out;
      args.compare = opt_path(compare);
      args.split_ratio = split_ratio;
      if (!domains.empty()) args.domains = domains;
      if (!splits.empty()) {
        args.splits.clear();
        for (const auto& s : splits) args.splits.push_back(darank::split_part_from_string(s));
      }
      darank::cmd_evaluate(args);
    } else if (*dg) {
      darank::DiagnoseArgs args;
      args.checkpoint = checkpoint;
      args.data_dir = data;
      args.out_dir = out;
      args.split = darank::split_part_from_string(split);
      args.split_ratio = split_ratio;
      args.bins = bins;
      args.centered = !uncentered;
      args.source_only = source_only;
      darank::cmd_diagnose(args);
    } else if (*sw) {
      darank::RunConfig cfg = darank::load_run_config(opt_path(config), seed);
      if (parallel) cfg.eval.parallel = *parallel;
      darank::validate(cfg.eval);
      darank::cmd_sweep(cfg, data, grid, out);
    }
  } catch (...) {
    return darank::report_exception();
  }
  return darank::kExitOk;
}
