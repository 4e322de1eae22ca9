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

#ifndef SJLSTM_TESTS_TEST_UTIL_HPP_
#define SJLSTM_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "sjlstm/corpus.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/numeric.hpp"
#include "sjlstm/synth.hpp"
#include "sjlstm/text_structure.hpp"

namespace sjlstm::testing_util {

// Tokenizes with `vocab`, growing it with any unseen word.
inline Document MakeDoc(const std::string& text, std::size_t label, Vocabulary& vocab) {
  for (const auto& t : tokenize(text)) vocab.add(t.surface);
  Document d;
  d.tokens = tokenize(text, vocab);
  d.label_id = label;
  d.raw = text;
  return d;
}

// Random parameters with nonzero agent heads, so every path is exercised.
inline ModelParams RandomParams(ModelDims dims, std::uint64_t seed, double scale = 0.5) {
  ModelParams p(dims);
  Rng rng(seed);
  for (auto& param : p.store()) {
    for (double& v : param.value.values()) v = (2.0 * rng.uniform() - 1.0) * scale;
  }
  return p;
}

// Random token sequence over a small alphabet with punctuation.
inline Document RandomDoc(Rng& rng, std::size_t vocab_size, std::size_t min_len,
                          std::size_t max_len, std::size_t classes) {
  static const char* kMarks[] = {",", ".", "!", "?"};
  Document d;
  const std::size_t n = rng.uniform_int(min_len, max_len);
  for (std::size_t i = 0; i < n; ++i) {
    Token t;
    t.position = i;
    if (rng.bernoulli(0.2)) {
      t.surface = kMarks[rng.uniform_int(0, 3)];
    } else {
      t.surface = "t" + std::to_string(rng.uniform_int(0, 9));
    }
    t.punct_class = classify_punct(t.surface);
    t.vocab_id = rng.uniform_int(0, vocab_size - 1);
    d.tokens.push_back(t);
  }
  d.label_id = rng.uniform_int(0, classes - 1);
  return d;
}

struct PreparedCorpus {
  Vocabulary vocab;
  LabelMap labels;
  std::vector<Document> docs;
};

inline PreparedCorpus Prepare(const std::vector<RawExample>& raw, std::size_t min_freq = 1) {
  PreparedCorpus c;
  c.vocab = build_vocabulary(raw, min_freq);
  c.labels = label_map_of(raw);
  c.docs = make_documents(raw, c.vocab, c.labels);
  return c;
}

// Small after_first_comma corpus for quick training runs.
inline PreparedCorpus SmallSynth(std::size_t n, std::uint64_t seed, std::size_t min_len = 12,
                                 std::size_t max_len = 24) {
  SynthSpec spec;
  spec.num_docs = n;
  spec.min_length = min_len;
  spec.max_length = max_len;
  spec.min_commas = 1;
  spec.max_commas = 2;
  spec.min_sentences = 1;
  spec.max_sentences = 2;
  spec.distractor_vocab_size = 20;
  return Prepare(generate_corpus(spec, seed).examples);
}

inline std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sjlstm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sjlstm::testing_util

#endif  // SJLSTM_TESTS_TEST_UTIL_HPP_
