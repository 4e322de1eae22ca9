// Copyright 2026 The sjlstm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SJLSTM_CHECKPOINT_HPP_
#define SJLSTM_CHECKPOINT_HPP_

// Self-describing JSON checkpoint: dims, vocabulary, label map and every
// parameter tensor in declared order. Doubles are written in shortest
// round-trip form, so save -> load reproduces parameters exactly.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sjlstm/corpus.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/status.hpp"

namespace sjlstm {

inline constexpr std::string_view kCheckpointFormat = "sjlstm-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelParams params;
  Vocabulary vocab;
  LabelMap labels;
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

inline nlohmann::ordered_json checkpoint_to_json(const Checkpoint& ck) {
  const ModelDims& dims = ck.params.dims();
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["format_version"] = kCheckpointVersion;
  j["dims"] = {{"hidden", dims.hidden}, {"vocab", dims.vocab}, {"classes", dims.classes}};
  nlohmann::ordered_json vocab = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ck.vocab.size(); ++i) vocab.push_back(ck.vocab.word(i));
  j["vocab"] = std::move(vocab);
  j["labels"] = ck.labels.labels();
  nlohmann::ordered_json params = nlohmann::ordered_json::array();
  for (const auto& p : ck.params.store()) {
    nlohmann::ordered_json e;
    e["name"] = p.name;
    e["shape"] = p.value.shape();
    e["values"] = std::vector<double>(p.value.values().begin(), p.value.values().end());
    params.push_back(std::move(e));
  }
  j["params"] = std::move(params);
  j["metadata"] = ck.metadata;
  return j;
}

inline std::string serialize_checkpoint(const Checkpoint& ck) {
  return checkpoint_to_json(ck).dump() + "\n";
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& m) -> void { throw Error("checkpoint", m); };
  try {
    if (j.value("format", std::string()) != kCheckpointFormat) fail("not a checkpoint file");
    const int version = j.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      fail("unsupported format_version " + std::to_string(version));
    }
    ModelDims dims;
    dims.hidden = j.at("dims").at("hidden").get<std::size_t>();
    dims.vocab = j.at("dims").at("vocab").get<std::size_t>();
    dims.classes = j.at("dims").at("classes").get<std::size_t>();

    const auto words = j.at("vocab").get<std::vector<std::string>>();
    if (words.empty() || words.front() != Vocabulary::kOovToken) {
      fail("vocab must start with the OOV entry");
    }
    if (words.size() != dims.vocab) fail("vocab size does not match dims.vocab");
    Vocabulary vocab(std::vector<std::string>(words.begin() + 1, words.end()));
    if (vocab.size() != dims.vocab) fail("duplicate vocabulary entries");

    LabelMap labels(j.at("labels").get<std::vector<std::string>>());
    if (labels.size() != dims.classes) fail("label count does not match dims.classes");

    ModelParams params(dims);
    const auto& ps = j.at("params");
    if (ps.size() != params.store().size()) fail("unexpected number of parameter tensors");
    for (std::size_t k = 0; k < ps.size(); ++k) {
      Parameter& p = params.store()[k];
      if (ps[k].at("name").get<std::string>() != p.name) {
        fail("parameter " + std::to_string(k) + " should be '" + p.name + "'");
      }
      if (ps[k].at("shape").get<std::vector<std::size_t>>() != p.value.shape()) {
        fail("shape mismatch for '" + p.name + "'");
      }
      auto values = ps[k].at("values").get<std::vector<double>>();
      if (values.size() != p.value.size()) fail("value count mismatch for '" + p.name + "'");
      p.value = Tensor::FromValues(p.value.shape(), std::move(values));
      p.value.check_finite(p.name);
    }
    Checkpoint ck{std::move(params), std::move(vocab), std::move(labels)};
    if (j.contains("metadata")) ck.metadata = j.at("metadata");
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw Error("checkpoint", std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write checkpoint " + path);
  out << serialize_checkpoint(ck);
  if (!out) throw Error("io", "write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("checkpoint", path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace sjlstm

#endif  // SJLSTM_CHECKPOINT_HPP_
