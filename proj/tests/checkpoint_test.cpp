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

#include "sjlstm/checkpoint.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <string>

#include "test_util.hpp"

namespace sjlstm {
namespace {

using testing_util::RandomParams;
using testing_util::ReadFile;
using testing_util::TempDir;

Checkpoint Sample() {
  Vocabulary vocab(std::vector<std::string>{"a", "b", ","});
  ModelParams p = RandomParams(ModelDims{3, vocab.size(), 2}, 5);
  // Values that need all 17 significant digits.
  p.value(Slot::kEmbedding)[0] = 0.1 + 0.2;
  p.value(Slot::kEmbedding)[1] = std::numeric_limits<double>::denorm_min();
  p.value(Slot::kEmbedding)[2] = -1.0 / 3.0;
  Checkpoint ck{std::move(p), std::move(vocab), LabelMap({"pos", "neg"})};
  ck.metadata["epoch"] = 4;
  return ck;
}

TEST(CheckpointTest, ExactRoundTrip) {
  Checkpoint ck = Sample();
  auto path = (TempDir("ckpt") / "c.json").string();
  save_checkpoint(path, ck);
  Checkpoint back = load_checkpoint(path);
  EXPECT_EQ(back.params.dims(), ck.params.dims());
  for (std::size_t k = 0; k < ck.params.store().size(); ++k) {
    EXPECT_EQ(back.params.store()[k].value, ck.params.store()[k].value)
        << ck.params.store()[k].name;
  }
  EXPECT_EQ(back.vocab.words(), ck.vocab.words());
  EXPECT_EQ(back.labels, ck.labels);
  EXPECT_EQ(back.metadata["epoch"], 4);
  EXPECT_EQ(serialize_checkpoint(back), ReadFile(path));
}

TEST(CheckpointTest, RejectsCorruptFiles) {
  auto j = nlohmann::json::parse(serialize_checkpoint(Sample()));
  auto expect_kind = [](const nlohmann::json& bad) {
    try {
      checkpoint_from_json(bad);
      ADD_FAILURE() << "accepted a corrupt checkpoint";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), "checkpoint") << e.what();
    }
  };
  auto bad = j;
  bad["format"] = "other";
  expect_kind(bad);
  bad = j;
  bad["format_version"] = 2;
  expect_kind(bad);
  bad = j;
  bad["params"][3]["values"].erase(0);
  expect_kind(bad);
  bad = j;
  bad["params"][0]["name"] = "emb";
  expect_kind(bad);
  bad = j;
  bad["labels"] = {"x"};
  expect_kind(bad);
  bad = j;
  bad["vocab"][0] = "a";
  expect_kind(bad);
  bad = j;
  bad.erase("dims");
  expect_kind(bad);
  EXPECT_THROW(load_checkpoint("/nonexistent/ck.json"), Error);
}

}  // namespace
}  // namespace sjlstm
