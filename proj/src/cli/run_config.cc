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

#include "darank/cli/run_config.h"

#include <cmath>

#include "darank/common/error.h"

namespace darank {

Json to_json(const GenConfig& c) {
  return Json{{"seed", c.seed},
              {"n_source_queries", c.n_source_queries},
              {"n_target_queries", c.n_target_queries},
              {"vocab_size", c.vocab_size},
              {"dense_dim", c.dense_dim},
              {"docs_per_query", c.docs_per_query},
              {"domain_shift", c.domain_shift},
              {"shift_queries", c.shift_queries},
              {"relevance_noise", c.relevance_noise},
              {"examination_probs", c.examination_probs},
              {"n_days", c.n_days},
              {"latent_dim", c.latent_dim},
              {"query_ngrams_min", c.query_ngrams_min},
              {"query_ngrams_max", c.query_ngrams_max},
              {"doc_ngrams_min", c.doc_ngrams_min},
              {"doc_ngrams_max", c.doc_ngrams_max},
              {"latent_std", c.latent_std},
              {"dense_noise", c.dense_noise},
              {"relevance_scale", c.relevance_scale},
              {"relevance_bias", c.relevance_bias},
              {"quality_weight", c.quality_weight},
              {"legacy_noise", c.legacy_noise},
              {"target_name", c.target_name}};
}

GenConfig gen_config_from_json(const Json& j, const std::string& pointer, GenConfig c) {
  ObjectReader r(j, pointer);
  r.read("seed", c.seed);
  r.read("n_source_queries", c.n_source_queries);
  r.read("n_target_queries", c.n_target_queries);
  r.read("vocab_size", c.vocab_size);
  r.read("dense_dim", c.dense_dim);
  r.read("docs_per_query", c.docs_per_query);
  r.read("domain_shift", c.domain_shift);
  r.read("shift_queries", c.shift_queries);
  r.read("relevance_noise", c.relevance_noise);
  r.read("examination_probs", c.examination_probs);
  r.read("n_days", c.n_days);
  r.read("latent_dim", c.latent_dim);
  r.read("query_ngrams_min", c.query_ngrams_min);
  r.read("query_ngrams_max", c.query_ngrams_max);
  r.read("doc_ngrams_min", c.doc_ngrams_min);
  r.read("doc_ngrams_max", c.doc_ngrams_max);
  r.read("latent_std", c.latent_std);
  r.read("dense_noise", c.dense_noise);
  r.read("relevance_scale", c.relevance_scale);
  r.read("relevance_bias", c.relevance_bias);
  r.read("quality_weight", c.quality_weight);
  r.read("legacy_noise", c.legacy_noise);
  r.read("target_name", c.target_name);
  r.finish();
  return c;
}

Json to_json(const EvalOptions& o) {
  return Json{{"split_ratio", o.split_ratio},
              {"bins", o.bins},
              {"centered", o.centered},
              {"parallel", o.parallel},
              {"distinct_seeds", o.distinct_seeds}};
}

Json to_json(const RunConfig& c) {
  return Json{{"generate", to_json(c.generate)},
              {"train", to_json(c.train)},
              {"eval", to_json(c.eval)}};
}

void validate(const EvalOptions& o) {
  if (!(o.split_ratio > 0.0 && o.split_ratio < 1.0)) {
    throw ConfigError("/eval/split_ratio", "must lie in (0, 1)");
  }
  if (o.bins < 1) throw ConfigError("/eval/bins", "must be positive");
  if (o.parallel < 1) throw ConfigError("/eval/parallel", "must be positive");
}

RunConfig run_config_from_json(const Json& j) {
  ObjectReader r(j, "");
  RunConfig c;
  std::optional<std::uint64_t> seed;
  if (const Json* s = r.take("seed")) seed = ObjectReader::convert<std::uint64_t>(*s, "/seed");
  if (seed) {
    c.generate.seed = *seed;
    c.train.seed = *seed;
  }
  if (const Json* g = r.take("generate")) c.generate = gen_config_from_json(*g, "/generate", c.generate);
  if (const Json* t = r.take("train")) c.train = train_config_from_json(*t, "/train", c.train);
  if (const Json* e = r.take("eval")) {
    ObjectReader er(*e, "/eval");
    er.read("split_ratio", c.eval.split_ratio);
    er.read("bins", c.eval.bins);
    er.read("centered", c.eval.centered);
    er.read("parallel", c.eval.parallel);
    er.read("distinct_seeds", c.eval.distinct_seeds);
    er.finish();
  }
  r.finish();
  return c;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          std::optional<std::uint64_t> seed_override) {
  RunConfig c = path ? run_config_from_json(read_json_file(*path)) : RunConfig{};
  if (seed_override) {
    c.generate.seed = *seed_override;
    c.train.seed = *seed_override;
  }
  try {
    validate(c.generate);
  } catch (const ConfigError& e) {
    throw e.nested("/generate");
  }
  try {
    validate(c.train);
  } catch (const ConfigError& e) {
    throw e.nested("/train");
  }
  validate(c.eval);
  return c;
}

}  // namespace darank
