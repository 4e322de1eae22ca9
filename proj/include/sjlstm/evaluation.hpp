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

#ifndef SJLSTM_EVALUATION_HPP_
#define SJLSTM_EVALUATION_HPP_

// Accuracy and computation accounting for a reader over a corpus, plus the
// report and trace writers.
//
// FLOP convention (declared, applied identically to every reader):
//   LSTM update          8 d^2 + 8 d
//   skip-agent query     4 d + 2
//   jump-agent query     4 d + 4
//   classification       C (d + 1)
// The full-read mode never queries the agents.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sjlstm/corpus.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/numeric.hpp"
#include "sjlstm/status.hpp"
#include "sjlstm/text_structure.hpp"

namespace sjlstm {

struct FlopModel {
  double hidden;
  double classes;

  explicit FlopModel(const ModelDims& dims)
      : hidden(static_cast<double>(dims.hidden)),
        classes(static_cast<double>(dims.classes)) {}

  double lstm_update() const { return 8.0 * hidden * hidden + 8.0 * hidden; }
  double skip_query() const { return 4.0 * hidden + 2.0; }
  double jump_query() const { return 4.0 * hidden + 4.0; }
  double classification() const { return classes * (hidden + 1.0); }

  double episode(const ReadingTrace& trace, bool agents_queried) const {
    const double reads = static_cast<double>(trace.state_updates);
    double f = reads * lstm_update() + classification();
    if (agents_queried) {
      f += static_cast<double>(trace.tokens_visited()) * skip_query() + reads * jump_query();
    }
    return f;
  }
};

struct Metrics {
  std::size_t documents = 0;
  double accuracy = 0.0;
  double fraction_read = 0.0;
  double mean_state_updates = 0.0;
  double flop_estimate = 0.0;
  std::array<std::uint64_t, kNumJumpActions> jump_histogram{};
  double skip_rate = 0.0;
  double early_termination_rate = 0.0;
  std::uint64_t total_state_updates = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t total_visited = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Incremental, order-independent aggregation (sums of per-document terms).
class MetricsAccumulator {
 public:
  MetricsAccumulator(const ModelDims& dims, bool agents_queried)
      : flops_(dims), agents_queried_(agents_queried) {}

  void add(const ReadingTrace& trace, std::size_t label) {
    ++documents_;
    correct_ += trace.predicted_class() == label ? 1 : 0;
    fraction_sum_ += trace.tokens_total == 0
                         ? 1.0
                         : static_cast<double>(trace.state_updates) /
                               static_cast<double>(trace.tokens_total);
    updates_ += trace.state_updates;
    tokens_ += trace.tokens_total;
    visited_ += trace.tokens_visited();
    flop_sum_ += flops_.episode(trace, agents_queried_);
    early_ += trace.terminated_early ? 1 : 0;
    for (const auto& st : trace.steps) {
      if (st.skip == SkipAction::kSkip) ++skipped_;
      if (st.jump) ++histogram_[static_cast<std::size_t>(*st.jump)];
    }
  }

  Metrics finish() const {
    Metrics m;
    m.documents = documents_;
    if (documents_ == 0) return m;
    const double n = static_cast<double>(documents_);
    m.accuracy = static_cast<double>(correct_) / n;
    m.fraction_read = fraction_sum_ / n;
    m.mean_state_updates = static_cast<double>(updates_) / n;
    m.flop_estimate = flop_sum_;
    m.jump_histogram = histogram_;
    m.skip_rate = visited_ == 0 ? 0.0
                                : static_cast<double>(skipped_) / static_cast<double>(visited_);
    m.early_termination_rate = static_cast<double>(early_) / n;
    m.total_state_updates = updates_;
    m.total_tokens = tokens_;
    m.total_visited = visited_;
    return m;
  }

 private:
  FlopModel flops_;
  bool agents_queried_;
  std::size_t documents_ = 0, correct_ = 0, early_ = 0;
  std::uint64_t updates_ = 0, tokens_ = 0, visited_ = 0, skipped_ = 0;
  double fraction_sum_ = 0.0, flop_sum_ = 0.0;
  std::array<std::uint64_t, kNumJumpActions> histogram_{};
};

inline std::uint64_t eval_episode_seed(std::uint64_t seed, std::size_t doc_index) {
  return derive_seed(seed, doc_index, 0, /*stream=*/0xE7A1u);
}

// Runs the reader over every document. Sampled episodes use per-document
// seeds, so results do not depend on evaluation order. Greedy and full-read
// evaluations never touch the rng.
inline Metrics evaluate(const ModelParams& params, const std::vector<Document>& corpus,
                        const std::vector<StructureIndex>& indices, ReadMode mode,
                        std::uint64_t seed = 0,
                        std::vector<ReadingTrace>* traces = nullptr) {
  if (corpus.empty()) throw Error("evaluation", "cannot evaluate an empty corpus");
  SJ_CHECK(indices.size() == corpus.size());
  MetricsAccumulator acc(params.dims(), mode != ReadMode::kFullRead);
  if (traces != nullptr) {
    traces->clear();
    traces->reserve(corpus.size());
  }
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label_id >= params.dims().classes) {
      throw Error("label_map", "document " + std::to_string(i) + " has label id " +
                                   std::to_string(corpus[i].label_id) +
                                   " but the model has " +
                                   std::to_string(params.dims().classes) + " classes");
    }
    Rng rng(eval_episode_seed(seed, i));
    ReadingTrace trace = read_document(corpus[i], indices[i], params, mode, rng);
    acc.add(trace, corpus[i].label_id);
    if (traces != nullptr) traces->push_back(std::move(trace));
  }
  return acc.finish();
}

inline nlohmann::ordered_json to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["documents"] = m.documents;
  j["accuracy"] = m.accuracy;
  j["fraction_read"] = m.fraction_read;
  j["mean_state_updates"] = m.mean_state_updates;
  j["flop_estimate"] = m.flop_estimate;
  nlohmann::ordered_json hist;
  for (JumpAction a : kAllJumpActions) {
    hist[std::string(to_string(a))] = m.jump_histogram[static_cast<std::size_t>(a)];
  }
  j["jump_histogram"] = std::move(hist);
  j["skip_rate"] = m.skip_rate;
  j["early_termination_rate"] = m.early_termination_rate;
  j["total_state_updates"] = m.total_state_updates;
  j["total_tokens"] = m.total_tokens;
  j["total_visited"] = m.total_visited;
  return j;
}

struct CorpusDigest {
  std::size_t documents = 0;
  std::size_t classes = 0;
  double mean_length = 0.0;
};

inline CorpusDigest digest(const std::vector<Document>& corpus, std::size_t classes) {
  CorpusDigest d;
  d.documents = corpus.size();
  d.classes = classes;
  double total = 0.0;
  for (const auto& doc : corpus) total += static_cast<double>(doc.length());
  d.mean_length = corpus.empty() ? 0.0 : total / static_cast<double>(corpus.size());
  return d;
}

struct Report {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  CorpusDigest corpus;
  std::string mode = "greedy";
  Metrics speed_reader;
  Metrics full_read;
  std::vector<Metrics> sampled_runs;  // optional extra seeds for sample mode
  std::uint64_t seed = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;
  double speed_reader_seconds = 0.0;
  double full_read_seconds = 0.0;
};

inline nlohmann::ordered_json report_to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["config"] = r.config;
  j["corpus"] = {{"documents", r.corpus.documents},
                 {"classes", r.corpus.classes},
                 {"mean_length", r.corpus.mean_length}};
  j["seed"] = r.seed;
  j["mode"] = r.mode;
  j["flop_convention"] = {{"lstm_update", "8*d^2 + 8*d"},
                          {"skip_query", "4*d + 2"},
                          {"jump_query", "4*d + 4"},
                          {"classification", "C*(d + 1)"},
                          {"d", r.hidden},
                          {"C", r.classes}};
  j["speed_reader"] = to_json(r.speed_reader);
  j["full_read"] = to_json(r.full_read);
  if (!r.sampled_runs.empty()) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    double acc = 0.0, frac = 0.0, upd = 0.0;
    for (const auto& m : r.sampled_runs) {
      runs.push_back(to_json(m));
      acc += m.accuracy;
      frac += m.fraction_read;
      upd += m.mean_state_updates;
    }
    const double n = static_cast<double>(r.sampled_runs.size());
    j["sampled_runs"] = std::move(runs);
    j["sampled_mean"] = {{"accuracy", acc / n},
                         {"fraction_read", frac / n},
                         {"mean_state_updates", upd / n}};
  }
  j["flop_ratio"] = r.full_read.flop_estimate > 0.0
                        ? r.speed_reader.flop_estimate / r.full_read.flop_estimate
                        : 0.0;
  return j;
}

inline nlohmann::ordered_json trace_to_json(std::size_t doc_index, std::size_t label,
                                            const ReadingTrace& t) {
  nlohmann::ordered_json j;
  j["doc"] = doc_index;
  j["label"] = label;
  j["prediction"] = t.predicted_class();
  j["probs"] = t.prediction;
  j["tokens"] = t.tokens_total;
  j["state_updates"] = t.state_updates;
  j["terminated_early"] = t.terminated_early;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& st : t.steps) {
    nlohmann::ordered_json s = nlohmann::ordered_json::array();
    s.push_back(st.position);
    s.push_back(to_string(st.skip));
    if (st.jump) s.push_back(to_string(*st.jump));
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  return j;
}

namespace internal {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error("io", "write failed for " + path.string());
}

}  // namespace internal

// Writes <dir>/report.json and, when traces are given, <dir>/traces.jsonl
// (one document per line). Wall-clock timings go to <dir>/timing.json so the
// other two files depend only on their inputs.
inline void emit_report(const Report& report, const std::filesystem::path& dir,
                        const std::vector<Document>* corpus = nullptr,
                        const std::vector<ReadingTrace>* traces = nullptr) {
  if (report.corpus.documents == 0 || report.speed_reader.documents == 0) {
    throw Error("evaluation", "refusing to write a report for an empty corpus");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("io", "cannot create directory " + dir.string() + ": " + ec.message());

  internal::write_text_file(dir / "report.json", report_to_json(report).dump(2) + "\n");
  nlohmann::ordered_json timing = {{"speed_reader_seconds", report.speed_reader_seconds},
                                   {"full_read_seconds", report.full_read_seconds}};
  internal::write_text_file(dir / "timing.json", timing.dump(2) + "\n");

  if (traces != nullptr) {
    SJ_CHECK(corpus != nullptr && corpus->size() == traces->size());
    std::string text;
    for (std::size_t i = 0; i < traces->size(); ++i) {
      text += trace_to_json(i, (*corpus)[i].label_id, (*traces)[i]).dump();
      text += '\n';
    }
    internal::write_text_file(dir / "traces.jsonl", text);
  }
}

}  // namespace sjlstm

#endif  // SJLSTM_EVALUATION_HPP_
