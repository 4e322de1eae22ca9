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

#ifndef SJLSTM_SYNTH_HPP_
#define SJLSTM_SYNTH_HPP_

// Planted-signal corpora. Each document is built from clauses of distractor
// words separated by commas and sentence terminators; exactly one signal
// token, placed by a structural rule, carries the label. A structural oracle
// policy that reads only a handful of tokens therefore classifies perfectly.

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "sjlstm/corpus.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/numeric.hpp"
#include "sjlstm/status.hpp"
#include "sjlstm/text_structure.hpp"

namespace sjlstm {

enum class SignalRule { kAfterFirstComma, kAfterLastSentenceEnd, kDocumentStart };

inline std::string_view to_string(SignalRule r) {
  switch (r) {
    case SignalRule::kAfterFirstComma: return "after_first_comma";
    case SignalRule::kAfterLastSentenceEnd: return "after_last_sentence_end";
    case SignalRule::kDocumentStart: return "document_start";
  }
  return "?";
}

inline SignalRule parse_signal_rule(std::string_view s) {
  if (s == "after_first_comma") return SignalRule::kAfterFirstComma;
  if (s == "after_last_sentence_end") return SignalRule::kAfterLastSentenceEnd;
  if (s == "document_start") return SignalRule::kDocumentStart;
  throw Error("synth_spec", "unknown signal_rule '" + std::string(s) + "'");
}

struct SynthSpec {
  std::size_t num_docs = 1000;
  std::size_t num_classes = 2;
  std::size_t min_length = 40;
  std::size_t max_length = 120;
  std::size_t min_commas = 1;
  std::size_t max_commas = 4;
  std::size_t min_sentences = 2;
  std::size_t max_sentences = 5;
  SignalRule signal_rule = SignalRule::kAfterFirstComma;
  std::size_t distractor_vocab_size = 200;
  // Probability that a distractor slot holds a punctuation-like token that
  // carries no structure (";", ":", "-", "--").
  double noise_rate = 0.05;
};

inline void validate(const SynthSpec& s) {
  auto fail = [](const std::string& m) { throw Error("synth_spec", m); };
  if (s.num_docs == 0) fail("num_docs must be positive");
  if (s.num_classes < 2) fail("num_classes must be at least 2");
  if (s.min_length < 4) fail("min_length must be at least 4");
  if (s.max_length < s.min_length) fail("max_length < min_length");
  if (s.max_commas < s.min_commas) fail("max_commas < min_commas");
  if (s.max_sentences < s.min_sentences) fail("max_sentences < min_sentences");
  if (s.min_sentences < 1) fail("min_sentences must be at least 1");
  if (s.distractor_vocab_size < 1) fail("distractor_vocab_size must be positive");
  if (!(s.noise_rate >= 0.0 && s.noise_rate <= 1.0)) fail("noise_rate must be in [0, 1]");
  if (s.signal_rule == SignalRule::kAfterFirstComma && s.min_commas < 1) {
    fail("after_first_comma needs min_commas >= 1");
  }
  const std::size_t tail = s.signal_rule == SignalRule::kAfterLastSentenceEnd ? 1 : 0;
  const std::size_t needed = 2 * (s.max_sentences + s.max_commas) + tail;
  if (s.min_length < needed) {
    fail("min_length " + std::to_string(s.min_length) + " cannot hold " +
         std::to_string(s.max_sentences) + " sentences and " +
         std::to_string(s.max_commas) + " commas (needs " + std::to_string(needed) + ")");
  }
}

inline SynthSpec parse_synth_spec(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("synth_spec", "spec must be an object");
  static const char* kKnown[] = {"num_docs",      "num_classes",   "min_length",
                                 "max_length",    "min_commas",    "max_commas",
                                 "min_sentences", "max_sentences", "signal_rule",
                                 "distractor_vocab_size", "noise_rate"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : kKnown) ok = ok || it.key() == k;
    if (!ok) throw Error("synth_spec", "unknown key '" + it.key() + "'");
  }
  SynthSpec s;
  try {
    s.num_docs = j.value("num_docs", s.num_docs);
    s.num_classes = j.value("num_classes", s.num_classes);
    s.min_length = j.value("min_length", s.min_length);
    s.max_length = j.value("max_length", s.max_length);
    s.min_commas = j.value("min_commas", s.min_commas);
    s.max_commas = j.value("max_commas", s.max_commas);
    s.min_sentences = j.value("min_sentences", s.min_sentences);
    s.max_sentences = j.value("max_sentences", s.max_sentences);
    s.distractor_vocab_size = j.value("distractor_vocab_size", s.distractor_vocab_size);
    s.noise_rate = j.value("noise_rate", s.noise_rate);
    if (j.contains("signal_rule")) {
      s.signal_rule = parse_signal_rule(j.at("signal_rule").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("synth_spec", e.what());
  }
  validate(s);
  return s;
}

inline SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open synth spec " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("synth_spec", path + ": " + e.what());
  }
  return parse_synth_spec(j);
}

inline nlohmann::ordered_json to_json(const SynthSpec& s) {
  nlohmann::ordered_json j;
  j["num_docs"] = s.num_docs;
  j["num_classes"] = s.num_classes;
  j["min_length"] = s.min_length;
  j["max_length"] = s.max_length;
  j["min_commas"] = s.min_commas;
  j["max_commas"] = s.max_commas;
  j["min_sentences"] = s.min_sentences;
  j["max_sentences"] = s.max_sentences;
  j["signal_rule"] = to_string(s.signal_rule);
  j["distractor_vocab_size"] = s.distractor_vocab_size;
  j["noise_rate"] = s.noise_rate;
  return j;
}

namespace internal {

inline std::string padded(std::size_t v, std::size_t width) {
  std::ostringstream os;
  os << std::setw(static_cast<int>(width)) << std::setfill('0') << v;
  return os.str();
}

inline std::size_t digits(std::size_t v) {
  std::size_t n = 1;
  while (v >= 10) {
    v /= 10;
    ++n;
  }
  return n;
}

}  // namespace internal

inline std::string class_label(const SynthSpec& s, std::size_t k) {
  return "class_" + internal::padded(k, internal::digits(s.num_classes - 1));
}

inline std::string signal_token(const SynthSpec& s, std::size_t k) {
  return "signal" + internal::padded(k, internal::digits(s.num_classes - 1));
}

inline std::string distractor_token(std::size_t k) { return "w" + std::to_string(k); }

inline constexpr std::array<std::string_view, 4> kNoiseTokens = {";", ":", "-", "--"};

// One generated document before rendering to text.
struct SynthDocument {
  std::vector<std::string> tokens;
  std::vector<PunctClass> classes;
  std::size_t signal_position = 0;
  std::size_t label = 0;
};

struct GroundTruth {
  SignalRule rule = SignalRule::kAfterFirstComma;
  std::size_t documents = 0;
  double oracle_accuracy = 0.0;
  double oracle_mean_state_updates = 0.0;
  double oracle_read_fraction = 0.0;
  std::vector<std::size_t> class_counts;
};

struct SynthCorpus {
  SynthSpec spec;
  std::vector<SynthDocument> documents;
  std::vector<RawExample> examples;
  GroundTruth truth;
};

// Terminated sentences made of comma-separated clauses; for the
// after_last_sentence_end rule an unterminated tail clause follows.
inline SynthDocument generate_document(const SynthSpec& spec, Rng& rng) {
  const std::size_t length = rng.uniform_int(spec.min_length, spec.max_length);
  const std::size_t sentences = rng.uniform_int(spec.min_sentences, spec.max_sentences);
  const std::size_t commas = rng.uniform_int(spec.min_commas, spec.max_commas);
  const bool tail = spec.signal_rule == SignalRule::kAfterLastSentenceEnd;

  // clauses_per_sentence[s] = 1 + commas placed in sentence s.
  std::vector<std::size_t> clauses_per_sentence(sentences, 1);
  for (std::size_t k = 0; k < commas; ++k) {
    ++clauses_per_sentence[rng.uniform_int(0, sentences - 1)];
  }
  const std::size_t num_clauses = sentences + commas + (tail ? 1 : 0);
  const std::size_t marks = sentences + commas;
  SJ_CHECK(length >= marks + num_clauses);
  std::vector<std::size_t> clause_len(num_clauses, 1);
  for (std::size_t w = 0; w < length - marks - num_clauses; ++w) {
    ++clause_len[rng.uniform_int(0, num_clauses - 1)];
  }

  SynthDocument doc;
  doc.label = rng.uniform_int(0, spec.num_classes - 1);

  // Lay out clause words, remembering where each clause starts.
  std::vector<std::size_t> clause_start;
  std::size_t clause = 0;
  auto emit_clause = [&]() {
    clause_start.push_back(doc.tokens.size());
    for (std::size_t w = 0; w < clause_len[clause]; ++w) {
      if (spec.noise_rate > 0.0 && rng.bernoulli(spec.noise_rate)) {
        doc.tokens.emplace_back(kNoiseTokens[rng.uniform_int(0, kNoiseTokens.size() - 1)]);
      } else {
        doc.tokens.push_back(distractor_token(rng.uniform_int(0, spec.distractor_vocab_size - 1)));
      }
      doc.classes.push_back(PunctClass::kNone);
    }
    ++clause;
  };
  std::vector<std::size_t> first_clause_after_comma;
  for (std::size_t s = 0; s < sentences; ++s) {
    for (std::size_t c = 0; c < clauses_per_sentence[s]; ++c) {
      if (c > 0) {
        doc.tokens.emplace_back(",");
        doc.classes.push_back(PunctClass::kComma);
        first_clause_after_comma.push_back(clause);
      }
      emit_clause();
    }
    static constexpr std::string_view kTerminators[] = {".", "!", "?"};
    doc.tokens.emplace_back(kTerminators[rng.uniform_int(0, 2)]);
    doc.classes.push_back(PunctClass::kSentenceEnd);
  }
  if (tail) emit_clause();
  SJ_CHECK(doc.tokens.size() == length);

  switch (spec.signal_rule) {
    case SignalRule::kDocumentStart:
      doc.signal_position = 0;
      break;
    case SignalRule::kAfterFirstComma:
      SJ_CHECK(!first_clause_after_comma.empty());
      doc.signal_position = clause_start[first_clause_after_comma.front()];
      break;
    case SignalRule::kAfterLastSentenceEnd:
      doc.signal_position = clause_start.back();
      break;
  }
  doc.tokens[doc.signal_position] = signal_token(spec, doc.label);
  return doc;
}

// Words separated by spaces, punctuation marks glued to the preceding word.
inline std::string render_text(const SynthDocument& doc) {
  std::string text;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (i > 0 && doc.classes[i] == PunctClass::kNone) text += ' ';
    text += doc.tokens[i];
  }
  return text;
}

// Always reads, jumps along the structure the rule plants the signal in,
// and terminates right after reading the signal.
class StructuralOracleController {
 public:
  static constexpr bool kQueriesAgents = false;
  explicit StructuralOracleController(SignalRule rule) : rule_(rule) {}

  SkipAction choose_skip(const DecisionContext&) { return SkipAction::kRead; }
  JumpAction choose_jump(const DecisionContext& ctx) { return choose(ctx.index, ctx.position); }

  JumpAction choose(const StructureIndex& index, std::size_t pos) const {
    switch (rule_) {
      case SignalRule::kDocumentStart:
        return JumpAction::kToDocEnd;
      case SignalRule::kAfterFirstComma:
        return pos == 0 ? JumpAction::kToComma : JumpAction::kToDocEnd;
      case SignalRule::kAfterLastSentenceEnd:
        return index.next_sentence_end[pos] < index.doc_end ? JumpAction::kToSentenceEnd
                                                            : JumpAction::kToDocEnd;
    }
    return JumpAction::kToDocEnd;
  }

 private:
  SignalRule rule_;
};

struct OracleOutcome {
  std::size_t reads = 0;
  std::size_t last_read = 0;
};

inline OracleOutcome oracle_walk(const StructureIndex& index, SignalRule rule) {
  StructuralOracleController oracle(rule);
  OracleOutcome out;
  std::size_t pos = 0;
  while (pos < index.doc_end) {
    ++out.reads;
    out.last_read = pos;
    pos = resolve_jump(index, pos, oracle.choose(index, pos));
  }
  return out;
}

// Oracle accuracy and read statistics over tokenized documents: the oracle
// predicts the class of the signal token at its final read position.
inline GroundTruth oracle_evaluate(const SynthSpec& spec,
                                   const std::vector<std::vector<Token>>& docs,
                                   const std::vector<std::size_t>& labels) {
  std::unordered_map<std::string, std::size_t> signal_class;
  for (std::size_t k = 0; k < spec.num_classes; ++k) signal_class[signal_token(spec, k)] = k;
  GroundTruth g;
  g.rule = spec.signal_rule;
  g.documents = docs.size();
  g.class_counts.assign(spec.num_classes, 0);
  std::size_t correct = 0;
  double reads = 0.0, fraction = 0.0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ++g.class_counts[labels[i]];
    if (docs[i].empty()) continue;
    const StructureIndex index = build_structure_index(docs[i]);
    const OracleOutcome o = oracle_walk(index, spec.signal_rule);
    auto it = signal_class.find(docs[i][o.last_read].surface);
    if (it != signal_class.end() && it->second == labels[i]) ++correct;
    reads += static_cast<double>(o.reads);
    fraction += static_cast<double>(o.reads) / static_cast<double>(docs[i].size());
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, docs.size()));
  g.oracle_accuracy = static_cast<double>(correct) / n;
  g.oracle_mean_state_updates = reads / n;
  g.oracle_read_fraction = fraction / n;
  return g;
}

inline SynthCorpus generate_corpus(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  SynthCorpus out;
  out.spec = spec;
  out.documents.reserve(spec.num_docs);
  out.examples.reserve(spec.num_docs);
  std::vector<std::vector<Token>> tokenized;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < spec.num_docs; ++i) {
    Rng rng(derive_seed(seed, i, 0, /*stream=*/0x5E7u));
    SynthDocument doc = generate_document(spec, rng);
    RawExample ex{class_label(spec, doc.label), render_text(doc)};
    tokenized.push_back(tokenize(ex.text));
    labels.push_back(doc.label);
    out.examples.push_back(std::move(ex));
    out.documents.push_back(std::move(doc));
  }
  out.truth = oracle_evaluate(spec, tokenized, labels);
  return out;
}

// Copies with the signal token removed; the label is then carried by nothing.
inline std::vector<RawExample> strip_signal(const SynthCorpus& corpus) {
  std::vector<RawExample> out;
  out.reserve(corpus.documents.size());
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    SynthDocument d = corpus.documents[i];
    d.tokens.erase(d.tokens.begin() + static_cast<std::ptrdiff_t>(d.signal_position));
    d.classes.erase(d.classes.begin() + static_cast<std::ptrdiff_t>(d.signal_position));
    out.push_back({corpus.examples[i].label, render_text(d)});
  }
  return out;
}

inline nlohmann::ordered_json to_json(const GroundTruth& g, const SynthSpec& spec,
                                      std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["spec"] = to_json(spec);
  j["seed"] = seed;
  j["rule"] = to_string(g.rule);
  j["documents"] = g.documents;
  j["oracle_accuracy"] = g.oracle_accuracy;
  j["oracle_mean_state_updates"] = g.oracle_mean_state_updates;
  j["oracle_read_fraction"] = g.oracle_read_fraction;
  j["class_counts"] = g.class_counts;
  std::vector<std::string> signals;
  for (std::size_t k = 0; k < spec.num_classes; ++k) signals.push_back(signal_token(spec, k));
  j["signal_tokens"] = signals;
  return j;
}

}  // namespace sjlstm

#endif  // SJLSTM_SYNTH_HPP_
