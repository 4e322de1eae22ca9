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

#ifndef SJLSTM_CORPUS_HPP_
#define SJLSTM_CORPUS_HPP_

// Labelled documents and the line-oriented corpus file format
//   <label>\t<text>\n
// Labels are arbitrary non-empty strings, mapped to ids in lexicographic
// order.

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sjlstm/status.hpp"
#include "sjlstm/text_structure.hpp"

namespace sjlstm {

struct Document {
  std::vector<Token> tokens;
  std::size_t label_id = 0;
  std::string raw;

  std::size_t length() const { return tokens.size(); }
};

class LabelMap {
 public:
  LabelMap() = default;

  // Sorted and deduplicated.
  explicit LabelMap(std::vector<std::string> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t id) const { return labels_.at(id); }

  bool contains(const std::string& label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label);
  }

  std::size_t id(const std::string& label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) {
      throw Error("label_map", "unknown label '" + label + "'");
    }
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::string describe() const {
    std::string s = "[";
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (i) s += ",";
      s += labels_[i];
    }
    return s + "]";
  }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::vector<std::string> labels_;
};

// One parsed line of a corpus file, before vocabulary lookup.
struct RawExample {
  std::string label;
  std::string text;
};

inline std::vector<RawExample> parse_corpus(std::istream& in,
                                            const std::string& source = "<stream>") {
  std::vector<RawExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("corpus_format", source + ":" + std::to_string(line_no) +
                                       ": missing TAB between label and text");
    }
    if (tab == 0) {
      throw Error("corpus_format",
                  source + ":" + std::to_string(line_no) + ": empty label");
    }
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

inline std::vector<RawExample> read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open corpus file " + path);
  return parse_corpus(in, path);
}

inline LabelMap label_map_of(const std::vector<RawExample>& examples) {
  std::vector<std::string> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);
  return LabelMap(std::move(labels));
}

// Words seen at least `min_freq` times, ids assigned in lexicographic order.
inline Vocabulary build_vocabulary(const std::vector<RawExample>& examples,
                                   std::size_t min_freq = 2) {
  std::map<std::string, std::size_t> counts;
  for (const auto& e : examples) {
    for (auto& t : tokenize(e.text)) ++counts[t.surface];
  }
  std::vector<std::string> words;
  for (const auto& [w, n] : counts) {
    if (n >= min_freq && w != Vocabulary::kOovToken) words.push_back(w);
  }
  return Vocabulary(words);
}

inline std::vector<Document> make_documents(const std::vector<RawExample>& examples,
                                            const Vocabulary& vocab,
                                            const LabelMap& labels) {
  std::vector<Document> docs;
  docs.reserve(examples.size());
  for (const auto& e : examples) {
    if (!labels.contains(e.label)) {
      throw Error("label_map", "label '" + e.label +
                                   "' missing from label map " +
                                   labels.describe());
    }
    Document d;
    d.tokens = tokenize(e.text, vocab);
    d.label_id = labels.id(e.label);
    d.raw = e.text;
    docs.push_back(std::move(d));
  }
  return docs;
}

inline void write_corpus(std::ostream& out, const std::vector<RawExample>& examples) {
  for (const auto& e : examples) out << e.label << '\t' << e.text << '\n';
}

inline void write_corpus_file(const std::string& path,
                              const std::vector<RawExample>& examples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write corpus file " + path);
  write_corpus(out, examples);
  if (!out) throw Error("io", "write failed for " + path);
}

}  // namespace sjlstm

#endif  // SJLSTM_CORPUS_HPP_
