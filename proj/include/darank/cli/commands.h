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

#ifndef DARANK_CLI_COMMANDS_H_
#define DARANK_CLI_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "darank/cli/run_config.h"

namespace darank {

namespace fs = std::filesystem;

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitDivergence = 4;
inline constexpr int kExitIo = 5;

// Maps the active exception onto an exit status and prints it to stderr.
int report_exception();

// Writes source.jsonl, target.jsonl, meta.json and gen_report.json (which
// also carries the resolved config). Creates `out_dir` if needed.
void cmd_generate(const RunConfig& cfg, const fs::path& out_dir);

// Trains on the temporal train splits of the corpus in `data_dir`, logging
// target eval-split WMRR. Writes checkpoint.json, history.csv and
// resolved_config.json. On divergence the last finite checkpoint and the
// partial history are written before the error propagates.
void cmd_train(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir,
               const std::optional<fs::path>& init);

enum class SplitPart { kAll, kTrain, kEval };

std::string to_string(SplitPart part);
SplitPart split_part_from_string(const std::string& name);

struct EvaluateArgs {
  fs::path checkpoint;
  fs::path data_dir;
  fs::path out_dir;
  std::vector<std::string> domains = {"source", "target"};
  std::vector<SplitPart> splits = {SplitPart::kEval};
  double split_ratio = 5.0 / 6.0;
  std::optional<fs::path> compare;
};

// Writes eval.csv (method,domain,wmrr,n_queries) with one row per checkpoint,
// domain and split; the domain column reads "<domain>:<split>". With a
// comparison checkpoint, ttest.csv gets one row per evaluated set.
void cmd_evaluate(const EvaluateArgs& args);

struct DiagnoseArgs {
  fs::path checkpoint;
  fs::path data_dir;
  fs::path out_dir;
  SplitPart split = SplitPart::kEval;
  double split_ratio = 5.0 / 6.0;
  int bins = 50;
  bool centered = true;
  // Use the source set on both sides (sanity mode).
  bool source_only = false;
};

// Writes diagnostics.json: the norm triple and the projection histograms.
void cmd_diagnose(const DiagnoseArgs& args);

// Writes sweep.csv and resolved_config.json. Throws UsageError for an
// empty grid.
void cmd_sweep(const RunConfig& cfg, const fs::path& data_dir, const fs::path& grid_path,
               const fs::path& out_dir);

}  // namespace darank

#endif  // DARANK_CLI_COMMANDS_H_
