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

#include "darank/cli/commands.h"

#include <iostream>

#include "darank/common/error.h"
#include "darank/data/dataset.h"
#include "darank/data/split.h"
#include "darank/eval/diagnostics.h"
#include "darank/eval/sweep.h"
#include "darank/eval/ttest.h"
#include "darank/eval/wmrr.h"
#include "darank/nn/singular.h"
#include "darank/train/trainer.h"

namespace darank {
namespace {

struct Corpus {
  Dataset source;
  Dataset target;
};

Corpus load_corpus(const fs::path& data_dir) {
  const CorpusMeta meta = load_meta(data_dir / "meta.json");
  return Corpus{load_jsonl(data_dir / "source.jsonl", meta),
                load_jsonl(data_dir / "target.jsonl", meta)};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

Dataset select(const Dataset& ds, SplitPart part, double ratio) {
  if (part == SplitPart::kAll) return ds;
  TemporalSplit s = temporal_split(ds, ratio);
  return part == SplitPart::kTrain ? std::move(s.train) : std::move(s.eval);
}

Json gen_report_json(const GenReport& r) {
  return Json{{"source_latent_mean", r.source_latent_mean},
              {"target_latent_mean", r.target_latent_mean},
              {"shift_direction", r.shift_direction},
              {"source_click_histogram", r.source_click_histogram},
              {"target_click_histogram", r.target_click_histogram},
              {"hard_queries", r.hard_queries},
              {"mean_resamples", r.mean_resamples}};
}

}  // namespace

int report_exception() {
  try {
    throw;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const VocabError& e) {
    std::cerr << "vocabulary error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IncompatibleCheckpointError& e) {
    std::cerr << "incompatible checkpoint: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ShapeError& e) {
    std::cerr << "shape mismatch: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SplitError& e) {
    std::cerr << "split error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

void cmd_generate(const RunConfig& cfg, const fs::path& out_dir) {
  const GeneratedCorpus corpus = generate(cfg.generate);
  ensure_dir(out_dir);
  save_jsonl(corpus.source, out_dir / "source.jsonl");
  save_jsonl(corpus.target, out_dir / "target.jsonl");
  save_meta(corpus.source.meta, out_dir / "meta.json");
  Json report = gen_report_json(corpus.report);
  report["resolved_config"] = to_json(cfg);
  write_json_file(report, out_dir / "gen_report.json");
}

void cmd_train(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir,
               const std::optional<fs::path>& init) {
  if (cfg.train.method == Method::kReTrain && !init) {
    throw UsageError("method ReTrain requires --init <checkpoint>");
  }
  std::optional<Checkpoint> start;
  if (init) start = load_checkpoint(*init);
  const Corpus corpus = load_corpus(data_dir);
  const TemporalSplit src = temporal_split(corpus.source, cfg.eval.split_ratio);
  const TemporalSplit tgt = temporal_split(corpus.target, cfg.eval.split_ratio);
  ensure_dir(out_dir);

  Json resolved = to_json(cfg);
  resolved["data"] = data_dir.string();
  if (init) resolved["init"] = init->string();
  write_json_file(resolved, out_dir / "resolved_config.json");

  TrainOptions options;
  options.eval_set = &tgt.eval;
  try {
    const TrainResult result = train(src.train, tgt.train, cfg.train, start, options);
    save_checkpoint(result.checkpoint, out_dir / "checkpoint.json");
    write_text_file(history_csv(result.history), out_dir / "history.csv");
  } catch (const DivergenceError& e) {
    save_checkpoint(e.checkpoint(), out_dir / "checkpoint.json");
    write_text_file(history_csv(e.history()), out_dir / "history.csv");
    throw;
  }
}

std::string to_string(SplitPart part) {
  switch (part) {
    case SplitPart::kAll:
      return "all";
    case SplitPart::kTrain:
      return "train";
    case SplitPart::kEval:
      return "eval";
  }
  return "?";
}

SplitPart split_part_from_string(const std::string& name) {
  if (name == "all") return SplitPart::kAll;
  if (name == "train") return SplitPart::kTrain;
  if (name == "eval") return SplitPart::kEval;
  throw UsageError("unknown split '" + name + "' (use all, train or eval)");
}

void cmd_evaluate(const EvaluateArgs& args) {
  if (args.domains.empty() || args.splits.empty()) {
    throw UsageError("evaluate needs at least one domain and one split");
  }
  const Checkpoint model = load_checkpoint(args.checkpoint);
  std::optional<Checkpoint> other;
  if (args.compare) other = load_checkpoint(*args.compare);
  const Corpus corpus = load_corpus(args.data_dir);
  ensure_dir(args.out_dir);

  std::string eval_csv = "method,domain,wmrr,n_queries\n";
  std::string ttest_csv = "method_a,method_b,t,df,p,significant\n";
  const std::string name_a = to_string(model.config.method);
  for (const std::string& domain : args.domains) {
    if (domain != "source" && domain != "target") {
      throw UsageError("unknown domain '" + domain + "' (use source or target)");
    }
    const Dataset& full = domain == "source" ? corpus.source : corpus.target;
    for (SplitPart part : args.splits) {
      const Dataset set = select(full, part, args.split_ratio);
      const std::string label = domain + ":" + to_string(part);
      const EvalReport a = evaluate_wmrr(model.params, set);
      eval_csv += name_a + "," + label + "," + format_double(a.wmrr) + "," +
                  std::to_string(a.n_queries) + "\n";
      if (other) {
        const std::string name_b = to_string(other->config.method);
        const EvalReport b = evaluate_wmrr(other->params, set);
        eval_csv += name_b + "," + label + "," + format_double(b.wmrr) + "," +
                    std::to_string(b.n_queries) + "\n";
        const TTestResult t = paired_ttest(a, b);
        ttest_csv += name_a + "," + name_b + "," + format_double(t.t_statistic) + "," +
                     std::to_string(t.degrees_of_freedom) + "," + format_double(t.p_value) + "," +
                     (t.significant_at_99 ? "true" : "false") + "\n";
      }
    }
  }
  write_text_file(eval_csv, args.out_dir / "eval.csv");
  if (other) write_text_file(ttest_csv, args.out_dir / "ttest.csv");

  Json resolved{{"checkpoint", args.checkpoint.string()},
                {"data", args.data_dir.string()},
                {"domains", args.domains},
                {"split_ratio", args.split_ratio}};
  Json splits = Json::array();
  for (SplitPart p : args.splits) splits.push_back(to_string(p));
  resolved["splits"] = splits;
  if (args.compare) resolved["compare"] = args.compare->string();
  resolved["model_config"] = to_json(model.config);
  write_json_file(resolved, args.out_dir / "resolved_config.json");
}

void cmd_diagnose(const DiagnoseArgs& args) {
  const Checkpoint model = load_checkpoint(args.checkpoint);
  const Corpus corpus = load_corpus(args.data_dir);
  const Dataset source = select(corpus.source, args.split, args.split_ratio);
  const Dataset target =
      args.source_only ? source : select(corpus.target, args.split, args.split_ratio);
  ensure_dir(args.out_dir);
  Json out = to_json(diagnose(model.params, source, target, args.bins, args.centered));
  out["config"] = Json{{"checkpoint", args.checkpoint.string()},
                       {"data", args.data_dir.string()},
                       {"split", to_string(args.split)},
                       {"split_ratio", args.split_ratio},
                       {"bins", args.bins},
                       {"centered", args.centered},
                       {"source_only", args.source_only},
                       {"model_config", to_json(model.config)}};
  write_json_file(out, args.out_dir / "diagnostics.json");
}

void cmd_sweep(const RunConfig& cfg, const fs::path& data_dir, const fs::path& grid_path,
               const fs::path& out_dir) {
  const std::vector<AdaptWeights> grid =
      grid_from_json(read_json_file(grid_path), cfg.train.adapt_weights);
  if (grid.empty()) throw UsageError("sweep grid " + grid_path.string() + " has no points");
  const Corpus corpus = load_corpus(data_dir);
  const TemporalSplit src = temporal_split(corpus.source, cfg.eval.split_ratio);
  const TemporalSplit tgt = temporal_split(corpus.target, cfg.eval.split_ratio);
  ensure_dir(out_dir);
  Json resolved = to_json(cfg);
  resolved["data"] = data_dir.string();
  resolved["grid"] = grid_path.string();
  write_json_file(resolved, out_dir / "resolved_config.json");

  SweepOptions options;
  options.parallel = cfg.eval.parallel;
  options.distinct_seeds = cfg.eval.distinct_seeds;
  const std::vector<SweepRow> rows =
      sensitivity_sweep(cfg.train, grid, src.train, tgt.train, tgt.eval, options);
  write_text_file(sweep_csv(rows), out_dir / "sweep.csv");
}

}  // namespace darank
