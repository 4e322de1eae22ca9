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

#ifndef SJLSTM_TEXT_STRUCTURE_HPP_
#define SJLSTM_TEXT_STRUCTURE_HPP_

// Tokenization, punctuation classes and the per-position jump-target index.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sjlstm/status.hpp"

namespace sjlstm {

enum class PunctClass : std::uint8_t { kNone = 0, kComma = 1, kSentenceEnd = 2 };

inline PunctClass classify_punct(std::string_view surface) {
  if (surface == ",") return PunctClass::kComma;
  if (surface == "." || surface == "!" || surface == "?") {
    return PunctClass::kSentenceEnd;
  }
  return PunctClass::kNone;
}

inline constexpr bool is_structural_char(char c) {
  return c == ',' || c == '.' || c == '!' || c == '?';
}

struct Token {
  std::string surface;
  std::size_t vocab_id = 0;
  std::size_t position = 0;
  PunctClass punct_class = PunctClass::kNone;

  friend bool operator==(const Token&, const Token&) = default;
};

// Word -> id map. Id 0 is the shared out-of-vocabulary id.
class Vocabulary {
 public:
  static constexpr std::size_t kOovId = 0;
  static constexpr std::string_view kOovToken = "<unk>";

  Vocabulary() : words_{std::string(kOovToken)} {}

  // `words` in id order starting at id 1 (the OOV entry is implicit).
  explicit Vocabulary(const std::vector<std::string>& words) : Vocabulary() {
    for (const auto& w : words) add(w);
  }

  std::size_t add(const std::string& word) {
    auto it = ids_.find(word);
    if (it != ids_.end()) return it->second;
    const std::size_t id = words_.size();
    words_.push_back(word);
    ids_.emplace(word, id);
    return id;
  }

  std::size_t lookup(std::string_view word) const {
    auto it = ids_.find(std::string(word));
    return it == ids_.end() ? kOovId : it->second;
  }

  bool contains(std::string_view word) const {
    return ids_.count(std::string(word)) > 0;
  }

  // Number of ids including OOV.
  std::size_t size() const { return words_.size(); }
  const std::string& word(std::size_t id) const { return words_.at(id); }

  // All words in id order, OOV excluded.
  std::vector<std::string> words() const {
    return {words_.begin() + 1, words_.end()};
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> ids_;
};

namespace internal {

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace internal

// Lowercased whitespace split; each leading or trailing , . ! ? is detached
// as a token of its own. Non-ASCII bytes pass through untouched.
inline std::vector<Token> tokenize(std::string_view text,
                                   const Vocabulary& vocab = Vocabulary()) {
  std::vector<std::string> surfaces;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && internal::is_ascii_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !internal::is_ascii_space(text[j])) ++j;
    if (j > i) {
      std::string word;
      word.reserve(j - i);
      for (std::size_t k = i; k < j; ++k) word += internal::ascii_lower(text[k]);
      std::size_t lead = 0;
      while (lead < word.size() && is_structural_char(word[lead])) ++lead;
      std::size_t trail = word.size();
      while (trail > lead && is_structural_char(word[trail - 1])) --trail;
      for (std::size_t k = 0; k < lead; ++k) surfaces.emplace_back(1, word[k]);
      if (trail > lead) surfaces.push_back(word.substr(lead, trail - lead));
      for (std::size_t k = trail; k < word.size(); ++k) {
        surfaces.emplace_back(1, word[k]);
      }
    }
    i = j;
  }

  std::vector<Token> tokens;
  tokens.reserve(surfaces.size());
  for (std::size_t p = 0; p < surfaces.size(); ++p) {
    Token t;
    t.vocab_id = vocab.lookup(surfaces[p]);
    t.position = p;
    t.punct_class = classify_punct(surfaces[p]);
    t.surface = std::move(surfaces[p]);
    tokens.push_back(std::move(t));
  }
  return tokens;
}

// Jump targets for every position. Entries equal to doc_end mean "no such
// punctuation mark ahead".
struct StructureIndex {
  std::vector<std::size_t> next_comma;
  std::vector<std::size_t> next_sentence_end;
  std::size_t doc_end = 0;

  friend bool operator==(const StructureIndex&, const StructureIndex&) = default;
};

// Single backward sweep: the nearest mark strictly after i.
inline StructureIndex build_structure_index(std::span<const PunctClass> classes) {
  const std::size_t n = classes.size();
  StructureIndex index;
  index.doc_end = n;
  index.next_comma.assign(n, n);
  index.next_sentence_end.assign(n, n);
  std::size_t comma = n;
  std::size_t sentence_end = n;
  for (std::size_t i = n; i-- > 0;) {
    index.next_comma[i] = comma;
    index.next_sentence_end[i] = sentence_end;
    if (classes[i] == PunctClass::kComma) comma = i;
    if (classes[i] == PunctClass::kSentenceEnd) sentence_end = i;
  }
  return index;
}

inline std::vector<PunctClass> punct_classes(std::span<const Token> tokens) {
  std::vector<PunctClass> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.punct_class);
  return out;
}

inline StructureIndex build_structure_index(std::span<const Token> tokens) {
  const auto classes = punct_classes(tokens);
  return build_structure_index(std::span<const PunctClass>(classes));
}

enum class JumpAction : std::uint8_t {
  kContinue = 0,
  kToComma = 1,
  kToSentenceEnd = 2,
  kToDocEnd = 3,
};

inline constexpr std::size_t kNumJumpActions = 4;

inline constexpr std::array<JumpAction, kNumJumpActions> kAllJumpActions = {
    JumpAction::kContinue, JumpAction::kToComma, JumpAction::kToSentenceEnd,
    JumpAction::kToDocEnd};

inline std::string_view to_string(JumpAction a) {
  switch (a) {
    case JumpAction::kContinue: return "continue";
    case JumpAction::kToComma: return "to_comma";
    case JumpAction::kToSentenceEnd: return "to_sentence_end";
    case JumpAction::kToDocEnd: return "to_doc_end";
  }
  return "?";
}

// Landing position after `action` at `position`. Jumps land on the token
// following the target mark and clamp to doc_end.
inline std::size_t resolve_jump(const StructureIndex& index,
                                std::size_t position, JumpAction action) {
  SJ_CHECK_MSG(position < index.doc_end,
               "position " << position << " outside [0, " << index.doc_end << ")");
  switch (action) {
    case JumpAction::kContinue:
      return position + 1;
    case JumpAction::kToComma:
      return std::min(index.next_comma[position] + 1, index.doc_end);
    case JumpAction::kToSentenceEnd:
      return std::min(index.next_sentence_end[position] + 1, index.doc_end);
    case JumpAction::kToDocEnd:
      return index.doc_end;
  }
  internal::FailCheck("valid JumpAction", __FILE__, __LINE__, "");
}

// True when the punctuation target for `action` does not exist ahead of
// `position`, so the jump falls through to the sentinel.
inline bool is_sentinel_jump(const StructureIndex& index, std::size_t position,
                             JumpAction action) {
  switch (action) {
    case JumpAction::kToComma:
      return index.next_comma[position] == index.doc_end;
    case JumpAction::kToSentenceEnd:
      return index.next_sentence_end[position] == index.doc_end;
    default:
      return false;
  }
}

}  // namespace sjlstm

#endif  // SJLSTM_TEXT_STRUCTURE_HPP_
