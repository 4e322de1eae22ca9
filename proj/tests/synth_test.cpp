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

#include "sjlstm/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sjlstm/evaluation.hpp"
#include "sjlstm/training.hpp"
#include "test_util.hpp"

namespace sjlstm {
namespace {

using testing_util::Prepare;

SynthSpec SmallSpec(SignalRule rule) {
  SynthSpec s;
  s.num_docs = 300;
  s.signal_rule = rule;
  s.min_length = 20;
  s.max_length = 60;
  s.distractor_vocab_size = 50;
  return s;
}

constexpr SignalRule kRules[] = {SignalRule::kAfterFirstComma,
                                 SignalRule::kAfterLastSentenceEnd,
                                 SignalRule::kDocumentStart};

TEST(SynthTest, DocumentShapeAndSignalPlacement) {
  for (SignalRule rule : kRules) {
    SynthSpec spec = SmallSpec(rule);
    SynthCorpus c = generate_corpus(spec, 1);
    ASSERT_EQ(c.documents.size(), spec.num_docs);
    for (const auto& d : c.documents) {
      ASSERT_GE(d.tokens.size(), spec.min_length);
      ASSERT_LE(d.tokens.size(), spec.max_length);
      std::size_t commas = 0, ends = 0, signals = 0;
      for (std::size_t i = 0; i < d.tokens.size(); ++i) {
        commas += d.classes[i] == PunctClass::kComma;
        ends += d.classes[i] == PunctClass::kSentenceEnd;
        signals += d.tokens[i].rfind("signal", 0) == 0;
      }
      EXPECT_GE(commas, spec.min_commas);
      EXPECT_LE(commas, spec.max_commas);
      EXPECT_GE(ends, spec.min_sentences);
      EXPECT_LE(ends, spec.max_sentences);
      EXPECT_EQ(signals, 1u);
      EXPECT_EQ(d.tokens[d.signal_position], signal_token(spec, d.label));

      const std::size_t s = d.signal_position;
      if (rule == SignalRule::kDocumentStart) {
        EXPECT_EQ(s, 0u);
      } else if (rule == SignalRule::kAfterFirstComma) {
        ASSERT_GT(s, 0u);
        EXPECT_EQ(d.classes[s - 1], PunctClass::kComma);
        for (std::size_t i = 0; i + 1 < s; ++i) EXPECT_NE(d.classes[i], PunctClass::kComma);
      } else {
        ASSERT_GT(s, 0u);
        EXPECT_EQ(d.classes[s - 1], PunctClass::kSentenceEnd);
        for (std::size_t i = s; i < d.tokens.size(); ++i) {
          EXPECT_EQ(d.classes[i], PunctClass::kNone);
        }
      }
    }
  }
}

TEST(SynthTest, OracleIsPerfectForEveryRule) {
  for (SignalRule rule : kRules) {
    SynthCorpus c = generate_corpus(SmallSpec(rule), 2);
    EXPECT_DOUBLE_EQ(c.truth.oracle_accuracy, 1.0) << to_string(rule);
    EXPECT_GT(c.truth.oracle_read_fraction, 0.0);
    EXPECT_LT(c.truth.oracle_read_fraction, 0.5);
  }
  SynthCorpus c = generate_corpus(SmallSpec(SignalRule::kAfterFirstComma), 3);
  EXPECT_DOUBLE_EQ(c.truth.oracle_mean_state_updates, 2.0);
}

TEST(SynthTest, OracleDrivesTheReaderLoop) {
  SynthCorpus c = generate_corpus(SmallSpec(SignalRule::kAfterLastSentenceEnd), 4);
  auto p = Prepare(c.examples);
  ModelParams params(ModelDims{2, p.vocab.size(), 2});
  for (std::size_t i = 0; i < 50; ++i) {
    const Document& doc = p.docs[i];
    auto idx = build_structure_index(doc.tokens);
    StructuralOracleController oracle(c.spec.signal_rule);
    ReadingTrace t = read_document(doc, idx, params, oracle);
    EXPECT_EQ(doc.tokens[t.steps.back().position].surface,
              signal_token(c.spec, c.documents[i].label));
    EXPECT_EQ(t.state_updates, oracle_walk(idx, c.spec.signal_rule).reads);
  }
}

TEST(SynthTest, TokenizerRoundTrip) {
  SynthSpec spec = SmallSpec(SignalRule::kAfterFirstComma);
  spec.noise_rate = 0.3;
  SynthCorpus c = generate_corpus(spec, 5);
  for (std::size_t i = 0; i < c.documents.size(); ++i) {
    auto toks = tokenize(c.examples[i].text);
    ASSERT_EQ(toks.size(), c.documents[i].tokens.size()) << c.examples[i].text;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      EXPECT_EQ(toks[k].surface, c.documents[i].tokens[k]);
      EXPECT_EQ(toks[k].punct_class, c.documents[i].classes[k]);
    }
    EXPECT_EQ(c.examples[i].label, class_label(spec, c.documents[i].label));
  }
}

TEST(SynthTest, ClassBalanceWithinThreeSigma) {
  SynthSpec spec;
  spec.num_docs = 10000;
  spec.num_classes = 2;
  SynthCorpus c = generate_corpus(spec, 6);
  const double n = 10000.0, p = 0.5;
  const double sigma = std::sqrt(n * p * (1.0 - p));
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_LE(std::abs(static_cast<double>(c.truth.class_counts[k]) - n * p), 3.0 * sigma);
  }
}

TEST(SynthTest, DeterministicPerSeed) {
  SynthSpec spec = SmallSpec(SignalRule::kAfterFirstComma);
  auto text = [&](std::uint64_t seed) {
    std::ostringstream os;
    write_corpus(os, generate_corpus(spec, seed).examples);
    return os.str();
  };
  EXPECT_EQ(text(7), text(7));
  EXPECT_NE(text(7), text(8));
  // A document does not depend on how many come after it.
  SynthSpec shorter = spec;
  shorter.num_docs = 10;
  auto a = generate_corpus(spec, 7), b = generate_corpus(shorter, 7);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(a.examples[i].text, b.examples[i].text);
}

TEST(SynthTest, SpecValidation) {
  auto parse = [](const char* s) { return parse_synth_spec(nlohmann::json::parse(s)); };
  EXPECT_NO_THROW(parse("{}"));
  EXPECT_THROW(parse(R"({"num_doc": 5})"), Error);
  EXPECT_THROW(parse(R"({"min_length": 10, "max_length": 12})"), Error);
  EXPECT_THROW(parse(R"({"min_commas": 0})"), Error);
  EXPECT_THROW(parse(R"({"signal_rule": "middle"})"), Error);
  EXPECT_THROW(parse(R"({"num_classes": 1})"), Error);
  EXPECT_THROW(parse(R"({"max_length": 10})"), Error);
  EXPECT_NO_THROW(parse(R"({"min_commas": 0, "signal_rule": "document_start"})"));
  SynthSpec s = parse(R"({"num_classes": 12, "signal_rule": "after_last_sentence_end"})");
  EXPECT_EQ(class_label(s, 3), "class_03");
  EXPECT_EQ(signal_token(s, 11), "signal11");
  EXPECT_EQ(to_json(parse_synth_spec(nlohmann::json::parse(to_json(s).dump()))).dump(),
            to_json(s).dump());
}

// Without the signal token nothing in a document carries its label, so a
// trained full-read classifier stays at chance on held-out documents.
TEST(SynthTest, StrippedSignalLeavesOnlyChance) {
  SynthSpec spec;
  spec.num_docs = 1500;
  spec.min_length = 20;
  spec.max_length = 40;
  spec.distractor_vocab_size = 50;
  SynthCorpus c = generate_corpus(spec, 9);
  auto stripped = strip_signal(c);
  for (const auto& ex : stripped) EXPECT_EQ(ex.text.find("signal"), std::string::npos);

  std::vector<RawExample> train(stripped.begin(), stripped.begin() + 1000);
  std::vector<RawExample> test(stripped.begin() + 1000, stripped.end());
  auto tr = Prepare(train);
  auto te_docs = make_documents(test, tr.vocab, tr.labels);

  TrainConfig cfg;
  cfg.reader = ReadMode::kFullRead;
  cfg.hidden_size = 16;
  cfg.learning_rate = 0.01;
  Rng init(1);
  Trainer trainer(ModelParams::Initialize(ModelDims{16, tr.vocab.size(), 2}, init), cfg);
  auto indices = build_indices(tr.docs);
  for (int e = 0; e < 5; ++e) trainer.run_epoch(tr.docs, indices);
  Metrics m = evaluate(trainer.params(), te_docs, build_indices(te_docs), ReadMode::kFullRead);
  EXPECT_LE(m.accuracy, 1.0 / 2.0 + 0.05);
}

}  // namespace
}  // namespace sjlstm
