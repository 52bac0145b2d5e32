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

#include "darank/train/checkpoint.h"

#include <cstdio>
#include <span>
#include <vector>

#include "darank/common/error.h"

namespace darank {
namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json meta_json(const CorpusMeta& meta) {
  return Json{{"vocab_size", meta.vocab_size},
              {"dense_dim", meta.dense_dim},
              {"docs_per_query", meta.docs_per_query}};
}

Json params_json(const ModelParams& params) {
  const std::vector<double> flat = flatten(params);
  const auto sizes = group_sizes(params);
  Json out = Json::object();
  std::size_t offset = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    out[kParamGroupNames[g]] = std::vector<double>(flat.begin() + offset,
                                                   flat.begin() + offset + sizes[g]);
    offset += sizes[g];
  }
  return out;
}

ModelParams params_from_json(const Json& j, const CorpusMeta& meta, const ModelDims& dims,
                             const std::string& what) {
  ModelParams params = zeros_like(init_model(meta, dims, 0));
  const auto sizes = group_sizes(params);
  std::vector<double> flat;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const auto it = j.find(kParamGroupNames[g]);
    if (it == j.end() || !it->is_array()) {
      throw IncompatibleCheckpointError(what + " lacks group " + kParamGroupNames[g]);
    }
    if (it->size() != sizes[g]) {
      throw IncompatibleCheckpointError(what + " group " + kParamGroupNames[g] + " has " +
                                        std::to_string(it->size()) + " values, model needs " +
                                        std::to_string(sizes[g]));
    }
    for (const auto& v : *it) {
      if (!v.is_number()) throw IncompatibleCheckpointError(what + " holds a non-number");
      flat.push_back(v.get<double>());
    }
  }
  unflatten(flat, params);
  return params;
}

}  // namespace

std::string architecture_fingerprint(const CorpusMeta& meta, const ModelDims& dims) {
  return fnv1a_hex(Json{{"meta", meta_json(meta)}, {"model", to_json(dims)}}.dump());
}

std::string training_fingerprint(const CorpusMeta& meta, const TrainConfig& cfg) {
  Json c = to_json(cfg);
  c.erase("steps");
  c.erase("eval_every");
  return fnv1a_hex(Json{{"meta", meta_json(meta)}, {"train", c}}.dump());
}

Json to_json(const Checkpoint& cp) {
  Json j{{"format", "darank-checkpoint"},
         {"version", kCheckpointVersion},
         {"architecture_fingerprint", architecture_fingerprint(cp.meta, cp.config.model)},
         {"training_fingerprint", training_fingerprint(cp.meta, cp.config)},
         {"meta", meta_json(cp.meta)},
         {"config", to_json(cp.config)},
         {"step", cp.step},
         {"rng_state", cp.rng_state},
         {"params", params_json(cp.params)}};
  if (cp.adagrad_accumulators) j["adagrad_accumulators"] = params_json(*cp.adagrad_accumulators);
  return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "darank-checkpoint") {
    throw IncompatibleCheckpointError("not a darank checkpoint");
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    throw IncompatibleCheckpointError("unsupported checkpoint version");
  }
  Checkpoint cp;
  try {
    const Json& m = j.at("meta");
    cp.meta.vocab_size = m.at("vocab_size").get<std::int64_t>();
    cp.meta.dense_dim = m.at("dense_dim").get<std::int64_t>();
    cp.meta.docs_per_query = m.at("docs_per_query").get<std::int64_t>();
    cp.config = train_config_from_json(j.at("config"), "/config");
    cp.step = j.at("step").get<std::int64_t>();
    cp.rng_state = j.at("rng_state").get<std::string>();
  } catch (const Json::exception& e) {
    throw IncompatibleCheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw IncompatibleCheckpointError(std::string("malformed checkpoint config: ") + e.what());
  }
  if (j.value("architecture_fingerprint", "") !=
          architecture_fingerprint(cp.meta, cp.config.model) ||
      j.value("training_fingerprint", "") != training_fingerprint(cp.meta, cp.config)) {
    throw IncompatibleCheckpointError("checkpoint fingerprint does not match its config");
  }
  if (!j.contains("params")) throw IncompatibleCheckpointError("checkpoint has no params");
  cp.params = params_from_json(j.at("params"), cp.meta, cp.config.model, "params");
  if (j.contains("adagrad_accumulators")) {
    cp.adagrad_accumulators =
        params_from_json(j.at("adagrad_accumulators"), cp.meta, cp.config.model,
                         "adagrad_accumulators");
  }
  return cp;
}

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
  write_text_file(to_json(cp).dump() + "\n", path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json_file(path));
}

}  // namespace darank
