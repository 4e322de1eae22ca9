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

#include "sjlstm/evaluation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "sjlstm/baseline.hpp"
#include "sjlstm/training.hpp"
#include "test_util.hpp"

namespace sjlstm {
namespace {

using testing_util::MakeDoc;
using testing_util::RandomDoc;
using testing_util::RandomParams;
using testing_util::ReadFile;
using testing_util::TempDir;

// d = 2, C = 2, zero LSTM weights so every read leaves h = 0.
//   "a" embeds to [1, 0]: skip logits tie, greedy reads.
//   "b" embeds to [0, 5]: skip logit 5, greedy skips.
//   The jump agent prefers to_doc_end; the classifier always says class 0.
struct ToyFixture {
  Vocabulary vocab;
  std::vector<Document> docs;
  ModelParams params{ModelDims{2, 3, 2}};

  ToyFixture() {
    docs.push_back(MakeDoc("a a a a", 0, vocab));
    docs.push_back(MakeDoc("b a", 1, vocab));
    const auto a = vocab.lookup("a"), b = vocab.lookup("b");
    params.value(Slot::kEmbedding).at(a, 0) = 1.0;
    params.value(Slot::kEmbedding).at(b, 1) = 5.0;
    params.value(Slot::kSkipWeight).at(1, 3) = 1.0;
    params.value(Slot::kJumpBias)[3] = 1.0;
    params.value(Slot::kClassifierBias)[0] = 1.0;
  }
};

TEST(EvaluateTest, HandComputedToyMetrics) {
  ToyFixture f;
  auto indices = build_indices(f.docs);
  std::vector<ReadingTrace> traces;
  Metrics m = evaluate(f.params, f.docs, indices, ReadMode::kGreedy, 0, &traces);
  EXPECT_EQ(m.documents, 2u);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.5);
  EXPECT_DOUBLE_EQ(m.fraction_read, 0.375);
  EXPECT_DOUBLE_EQ(m.mean_state_updates, 1.0);
  EXPECT_DOUBLE_EQ(m.skip_rate, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.early_termination_rate, 1.0);
  EXPECT_EQ(m.jump_histogram, (std::array<std::uint64_t, 4>{0, 0, 0, 2}));
  // (48 + 10 + 12 + 6) + (48 + 2 * 10 + 12 + 6)
  EXPECT_DOUBLE_EQ(m.flop_estimate, 162.0);
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(traces[1].steps[0].skip, SkipAction::kSkip);
  EXPECT_EQ(traces[1].steps[1].position, 1u);
}

TEST(EvaluateTest, FlopConvention) {
  FlopModel f(ModelDims{64, 1, 2});
  EXPECT_DOUBLE_EQ(f.lstm_update(), 8.0 * 64 * 64 + 8.0 * 64);
  EXPECT_DOUBLE_EQ(f.skip_query(), 258.0);
  EXPECT_DOUBLE_EQ(f.jump_query(), 260.0);
  EXPECT_DOUBLE_EQ(f.classification(), 130.0);
}

TEST(EvaluateTest, FullReadReadsEverythingWithoutAgentCost) {
  ToyFixture f;
  auto indices = build_indices(f.docs);
  Metrics m = evaluate(f.params, f.docs, indices, ReadMode::kFullRead);
  EXPECT_DOUBLE_EQ(m.fraction_read, 1.0);
  EXPECT_DOUBLE_EQ(m.skip_rate, 0.0);
  EXPECT_DOUBLE_EQ(m.early_termination_rate, 0.0);
  EXPECT_EQ(m.jump_histogram, (std::array<std::uint64_t, 4>{6, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(m.flop_estimate, 6 * 48.0 + 2 * 6.0);
}

TEST(EvaluateTest, AllSkipReadsNothing) {
  ModelParams p = RandomParams(ModelDims{4, 6, 2}, 3);
  p.value(Slot::kSkipBias)[1] = 50.0;
  Rng rng(4);
  std::vector<Document> docs;
  for (int i = 0; i < 30; ++i) docs.push_back(RandomDoc(rng, 6, 1, 20, 2));
  Metrics m = evaluate(p, docs, build_indices(docs), ReadMode::kGreedy);
  EXPECT_DOUBLE_EQ(m.fraction_read, 0.0);
  EXPECT_DOUBLE_EQ(m.skip_rate, 1.0);
  EXPECT_EQ(m.total_visited, m.total_tokens);
  const std::size_t constant = argmax(classify(Vector::Zero(4), p));
  std::size_t hits = 0;
  for (const auto& d : docs) hits += d.label_id == constant;
  EXPECT_DOUBLE_EQ(m.accuracy, static_cast<double>(hits) / 30.0);
}

TEST(EvaluateTest, GreedyIgnoresSeedSampleDependsOnIt) {
  ModelParams p = RandomParams(ModelDims{4, 6, 2}, 5, 1.5);
  Rng rng(6);
  std::vector<Document> docs;
  for (int i = 0; i < 60; ++i) docs.push_back(RandomDoc(rng, 6, 0, 30, 2));
  auto idx = build_indices(docs);
  EXPECT_EQ(evaluate(p, docs, idx, ReadMode::kGreedy, 1),
            evaluate(p, docs, idx, ReadMode::kGreedy, 123456));
  EXPECT_EQ(evaluate(p, docs, idx, ReadMode::kSample, 7),
            evaluate(p, docs, idx, ReadMode::kSample, 7));
  EXPECT_NE(evaluate(p, docs, idx, ReadMode::kSample, 7),
            evaluate(p, docs, idx, ReadMode::kSample, 8));
}

TEST(EvaluateTest, FullReadAccuracyEqualsBaseline) {
  Rng rng(8);
  std::vector<Document> docs;
  for (int i = 0; i < 80; ++i) docs.push_back(RandomDoc(rng, 9, 0, 30, 3));
  ModelParams p = RandomParams(ModelDims{5, 9, 3}, 9);
  Metrics m = evaluate(p, docs, build_indices(docs), ReadMode::kFullRead);
  EXPECT_DOUBLE_EQ(m.accuracy, full_read_accuracy(docs, p));
}

TEST(EvaluateTest, EmptyCorpusAndBadLabelsAreErrors) {
  ModelParams p(ModelDims{2, 2, 2});
  std::vector<Document> none;
  EXPECT_THROW(evaluate(p, none, {}, ReadMode::kGreedy), Error);
  Vocabulary v;
  std::vector<Document> docs = {MakeDoc("x", 4, v)};
  ModelParams q(ModelDims{2, v.size(), 2});
  EXPECT_THROW(evaluate(q, docs, build_indices(docs), ReadMode::kGreedy), Error);
}

// Length-weighted counts are sums of per-document terms.
TEST(EvaluateTest, PropertyOrderIndependentAggregation) {
  ModelParams p = RandomParams(ModelDims{3, 5, 2}, 10, 1.0);
  Rng rng(11);
  std::vector<ReadingTrace> traces;
  std::vector<std::size_t> labels;
  for (int i = 0; i < 40; ++i) {
    Document d = RandomDoc(rng, 5, 0, 25, 2);
    traces.push_back(read_document(d, build_structure_index(d.tokens), p, ReadMode::kSample, rng));
    labels.push_back(d.label_id);
  }
  MetricsAccumulator fwd(p.dims(), true), rev(p.dims(), true);
  for (std::size_t i = 0; i < traces.size(); ++i) fwd.add(traces[i], labels[i]);
  for (std::size_t i = traces.size(); i-- > 0;) rev.add(traces[i], labels[i]);
  Metrics a = fwd.finish(), b = rev.finish();
  EXPECT_EQ(a.total_state_updates, b.total_state_updates);
  EXPECT_EQ(a.jump_histogram, b.jump_histogram);
  EXPECT_DOUBLE_EQ(a.accuracy, b.accuracy);
  EXPECT_NEAR(a.fraction_read, b.fraction_read, 1e-12);
  EXPECT_GE(a.fraction_read, 0.0);
  EXPECT_LE(a.fraction_read, 1.0);
}

Report ToyReport(const ToyFixture& f, std::vector<ReadingTrace>* traces) {
  auto indices = build_indices(f.docs);
  Report r;
  r.corpus = digest(f.docs, 2);
  r.hidden = 2;
  r.classes = 2;
  r.speed_reader = evaluate(f.params, f.docs, indices, ReadMode::kGreedy, 0, traces);
  r.full_read = evaluate(f.params, f.docs, indices, ReadMode::kFullRead);
  return r;
}

TEST(ReportTest, ByteIdenticalAndOneTraceLinePerDocument) {
  ToyFixture f;
  std::vector<ReadingTrace> traces;
  auto d1 = TempDir("report1"), d2 = TempDir("report2");
  Report r1 = ToyReport(f, &traces);
  r1.speed_reader_seconds = 0.5;
  emit_report(r1, d1, &f.docs, &traces);
  Report r2 = ToyReport(f, &traces);
  r2.speed_reader_seconds = 9.0;
  emit_report(r2, d2, &f.docs, &traces);
  EXPECT_EQ(ReadFile(d1 / "report.json"), ReadFile(d2 / "report.json"));
  const std::string t = ReadFile(d1 / "traces.jsonl");
  EXPECT_EQ(t, ReadFile(d2 / "traces.jsonl"));
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 2);

  auto j = nlohmann::json::parse(ReadFile(d1 / "report.json"));
  EXPECT_DOUBLE_EQ(j["speed_reader"]["accuracy"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["flop_ratio"].get<double>(), 162.0 / 300.0);
  auto line = nlohmann::json::parse(t.substr(0, t.find('\n')));
  EXPECT_EQ(line["steps"].dump(), R"([[0,"read","to_doc_end"]])");
}

TEST(ReportTest, EmptyCorpusRefused) {
  Report r;
  EXPECT_THROW(emit_report(r, TempDir("report_empty")), Error);
}

}  // namespace
}  // namespace sjlstm
