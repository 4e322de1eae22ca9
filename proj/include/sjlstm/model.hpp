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

#ifndef SJLSTM_MODEL_HPP_
#define SJLSTM_MODEL_HPP_

// The structural jump reader: an LSTM over token embeddings, a skip agent
// that decides per visited token whether to update the state, a jump agent
// consulted after every update, and a classification head on the final
// hidden state.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sjlstm/corpus.hpp"
#include "sjlstm/numeric.hpp"
#include "sjlstm/status.hpp"
#include "sjlstm/text_structure.hpp"

namespace sjlstm {

struct ModelDims {
  std::size_t hidden = 64;
  std::size_t vocab = 1;
  std::size_t classes = 2;

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

enum class SkipAction : std::uint8_t { kRead = 0, kSkip = 1 };

inline std::string_view to_string(SkipAction a) {
  return a == SkipAction::kRead ? "read" : "skip";
}

inline constexpr std::size_t kNumSkipActions = 2;

// Parameter slots in declared (serialization) order. Gate blocks inside the
// LSTM tensors are ordered input, forget, cell, output.
enum class Slot : std::size_t {
  kEmbedding = 0,
  kLstmInput,
  kLstmRecurrent,
  kLstmBias,
  kSkipWeight,
  kSkipBias,
  kJumpWeight,
  kJumpBias,
  kClassifierWeight,
  kClassifierBias,
};

inline constexpr std::array<std::string_view, 10> kSlotNames = {
    "embedding",    "lstm.input_weight", "lstm.recurrent_weight",
    "lstm.bias",    "skip.weight",       "skip.bias",
    "jump.weight",  "jump.bias",         "classifier.weight",
    "classifier.bias"};

class ModelParams {
 public:
  static constexpr double kInitScale = 0.1;
  static constexpr double kForgetBias = 1.0;

  // All-zero parameters of the right shapes.
  explicit ModelParams(ModelDims dims) : dims_(dims) {
    SJ_CHECK(dims.hidden > 0 && dims.vocab > 0 && dims.classes >= 1);
    for (std::size_t s = 0; s < kSlotNames.size(); ++s) {
      store_.add(std::string(kSlotNames[s]), Tensor(slot_shape(static_cast<Slot>(s))));
    }
  }

  // Uniform [-0.1, 0.1] embeddings and weights, forget-gate bias +1, agent
  // heads at zero so both policies start uniform.
  static ModelParams Initialize(ModelDims dims, Rng& rng) {
    ModelParams p(dims);
    auto fill_uniform = [&](Tensor& t) {
      for (double& v : t.values()) v = (2.0 * rng.uniform() - 1.0) * kInitScale;
    };
    fill_uniform(p.value(Slot::kEmbedding));
    fill_uniform(p.value(Slot::kLstmInput));
    fill_uniform(p.value(Slot::kLstmRecurrent));
    fill_uniform(p.value(Slot::kClassifierWeight));
    Tensor& bias = p.value(Slot::kLstmBias);
    for (std::size_t k = 0; k < dims.hidden; ++k) bias[dims.hidden + k] = kForgetBias;
    return p;
  }

  std::vector<std::size_t> slot_shape(Slot s) const {
    const std::size_t d = dims_.hidden;
    switch (s) {
      case Slot::kEmbedding: return {dims_.vocab, d};
      case Slot::kLstmInput: return {4 * d, d};
      case Slot::kLstmRecurrent: return {4 * d, d};
      case Slot::kLstmBias: return {4 * d};
      case Slot::kSkipWeight: return {kNumSkipActions, 2 * d};
      case Slot::kSkipBias: return {kNumSkipActions};
      case Slot::kJumpWeight: return {kNumJumpActions, d};
      case Slot::kJumpBias: return {kNumJumpActions};
      case Slot::kClassifierWeight: return {dims_.classes, d};
      case Slot::kClassifierBias: return {dims_.classes};
    }
    return {};
  }

  const ModelDims& dims() const { return dims_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }

  Tensor& value(Slot s) { return store_[static_cast<std::size_t>(s)].value; }
  const Tensor& value(Slot s) const { return store_[static_cast<std::size_t>(s)].value; }
  Tensor& grad(Slot s) { return store_[static_cast<std::size_t>(s)].grad; }

 private:
  ModelDims dims_;
  ParamStore store_;
};

// Everything the backward pass needs from one LSTM update.
struct LstmCache {
  Vector h_prev, c_prev, x;
  Vector i, f, g, o;
  Vector c, tanh_c, h;
};

struct LstmState {
  Vector h;
  Vector c;
};

// Gates i, f, o = sigmoid, g = tanh; c' = f*c + i*g; h' = o*tanh(c').
inline LstmState lstm_step(const Vector& h, const Vector& c, const Vector& x,
                           const ModelParams& params, LstmCache* cache = nullptr) {
  const auto d = static_cast<Eigen::Index>(params.dims().hidden);
  SJ_CHECK(h.size() == d && c.size() == d && x.size() == d);
  Vector z = params.value(Slot::kLstmBias).vector();
  z.noalias() += params.value(Slot::kLstmInput).matrix() * x;
  z.noalias() += params.value(Slot::kLstmRecurrent).matrix() * h;

  auto sig = [](double v) { return sigmoid(v); };
  Vector i = z.segment(0, d).unaryExpr(sig);
  Vector f = z.segment(d, d).unaryExpr(sig);
  Vector g = z.segment(2 * d, d).array().tanh();
  Vector o = z.segment(3 * d, d).unaryExpr(sig);

  LstmState next;
  next.c = f.cwiseProduct(c) + i.cwiseProduct(g);
  Vector tanh_c = next.c.array().tanh();
  next.h = o.cwiseProduct(tanh_c);
  if (cache != nullptr) {
    cache->h_prev = h;
    cache->c_prev = c;
    cache->x = x;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->g = std::move(g);
    cache->o = std::move(o);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
    cache->h = next.h;
  }
  return next;
}

struct LstmGrad {
  Vector dh_prev, dc_prev, dx;
};

// Backpropagates (dh, dc) at the step output through one cached update,
// accumulating weight gradients into `params`.
inline LstmGrad lstm_backward(const LstmCache& k, const Vector& dh,
                              const Vector& dc, ModelParams& params) {
  const auto d = static_cast<Eigen::Index>(params.dims().hidden);
  Vector dc_total =
      dc + dh.cwiseProduct(k.o).cwiseProduct(
               (1.0 - k.tanh_c.array().square()).matrix());
  Vector dz(4 * d);
  dz.segment(0, d) = dc_total.cwiseProduct(k.g).cwiseProduct(
      k.i.cwiseProduct((1.0 - k.i.array()).matrix()));
  dz.segment(d, d) = dc_total.cwiseProduct(k.c_prev).cwiseProduct(
      k.f.cwiseProduct((1.0 - k.f.array()).matrix()));
  dz.segment(2 * d, d) = dc_total.cwiseProduct(k.i).cwiseProduct(
      (1.0 - k.g.array().square()).matrix());
  dz.segment(3 * d, d) = dh.cwiseProduct(k.tanh_c).cwiseProduct(
      k.o.cwiseProduct((1.0 - k.o.array()).matrix()));

  params.grad(Slot::kLstmInput).matrix().noalias() += dz * k.x.transpose();
  params.grad(Slot::kLstmRecurrent).matrix().noalias() += dz * k.h_prev.transpose();
  params.grad(Slot::kLstmBias).vector() += dz;

  LstmGrad out;
  out.dx.noalias() = params.value(Slot::kLstmInput).matrix().transpose() * dz;
  out.dh_prev.noalias() = params.value(Slot::kLstmRecurrent).matrix().transpose() * dz;
  out.dc_prev = dc_total.cwiseProduct(k.f);
  return out;
}

inline Vector skip_logits(const Vector& h, const Vector& x, const ModelParams& params) {
  const auto d = static_cast<Eigen::Index>(params.dims().hidden);
  const auto w = params.value(Slot::kSkipWeight).matrix();
  Vector z = params.value(Slot::kSkipBias).vector();
  z.noalias() += w.leftCols(d) * h;
  z.noalias() += w.rightCols(d) * x;
  return z;
}

inline Vector jump_logits(const Vector& h, const ModelParams& params) {
  Vector z = params.value(Slot::kJumpBias).vector();
  z.noalias() += params.value(Slot::kJumpWeight).matrix() * h;
  return z;
}

inline Vector class_logits(const Vector& h, const ModelParams& params) {
  Vector z = params.value(Slot::kClassifierBias).vector();
  z.noalias() += params.value(Slot::kClassifierWeight).matrix() * h;
  return z;
}

// Distribution over {read, skip} from [h; x].
inline std::vector<double> skip_policy(const Vector& h, const Vector& x,
                                       const ModelParams& params) {
  return softmax(skip_logits(h, x, params));
}

// Distribution over {continue, to_comma, to_sentence_end, to_doc_end}.
inline std::vector<double> jump_policy(const Vector& h, const ModelParams& params) {
  return softmax(jump_logits(h, params));
}

inline std::vector<double> classify(const Vector& h, const ModelParams& params) {
  return softmax(class_logits(h, params));
}

inline std::vector<double> to_std(const Vector& v) {
  return {v.data(), v.data() + v.size()};
}

inline Vector embed(const Token& token, const ModelParams& params) {
  SJ_CHECK_MSG(token.vocab_id < params.dims().vocab,
               "vocab id " << token.vocab_id << " outside embedding table");
  return params.value(Slot::kEmbedding).row(token.vocab_id);
}

struct TraceStep {
  std::size_t position = 0;
  SkipAction skip = SkipAction::kRead;
  double skip_logprob = 0.0;
  std::optional<JumpAction> jump;
  std::optional<double> jump_logprob;
};

struct ReadingTrace {
  std::vector<TraceStep> steps;
  std::size_t state_updates = 0;
  std::size_t tokens_total = 0;
  Vector final_hidden;
  std::vector<double> prediction;
  bool terminated_early = false;

  std::size_t predicted_class() const { return argmax(prediction); }
  std::size_t tokens_visited() const { return steps.size(); }

  double total_logprob() const {
    double s = 0.0;
    for (const auto& st : steps) {
      s += st.skip_logprob;
      if (st.jump_logprob) s += *st.jump_logprob;
    }
    return s;
  }
};

// Per-step record kept for backpropagation.
struct TapeStep {
  std::size_t token_id = 0;
  SkipAction skip = SkipAction::kRead;
  std::array<double, kNumSkipActions> skip_log_probs{};
  JumpAction jump = JumpAction::kContinue;
  std::array<double, kNumJumpActions> jump_log_probs{};
  LstmCache lstm;  // populated for reads only
};

struct EpisodeTape {
  bool agents_queried = true;
  std::vector<TapeStep> steps;
};

// What a controller sees when asked for a decision. `probs` is empty for
// controllers that do not consult the agents.
struct DecisionContext {
  const Document& doc;
  const StructureIndex& index;
  std::size_t position;
  std::span<const double> probs;
};

// Controllers turn agent distributions into actions. kQueriesAgents = false
// means the agent heads are never evaluated (and no policy cost is paid).
class SampleController {
 public:
  static constexpr bool kQueriesAgents = true;
  explicit SampleController(Rng& rng) : rng_(rng) {}
  SkipAction choose_skip(const DecisionContext& ctx) {
    return static_cast<SkipAction>(sample_categorical(ctx.probs, rng_));
  }
  JumpAction choose_jump(const DecisionContext& ctx) {
    return static_cast<JumpAction>(sample_categorical(ctx.probs, rng_));
  }

 private:
  Rng& rng_;
};

// Argmax; ties resolve to the lowest action index (read, continue).
class GreedyController {
 public:
  static constexpr bool kQueriesAgents = true;
  SkipAction choose_skip(const DecisionContext& ctx) {
    return static_cast<SkipAction>(argmax(ctx.probs));
  }
  JumpAction choose_jump(const DecisionContext& ctx) {
    return static_cast<JumpAction>(argmax(ctx.probs));
  }
};

class FullReadController {
 public:
  static constexpr bool kQueriesAgents = false;
  SkipAction choose_skip(const DecisionContext&) { return SkipAction::kRead; }
  JumpAction choose_jump(const DecisionContext&) { return JumpAction::kContinue; }
};

// Replays a fixed action script; agents are still evaluated so log-probs of
// the scripted actions are recorded.
class ReplayController {
 public:
  struct Decision {
    SkipAction skip;
    JumpAction jump = JumpAction::kContinue;
  };

  static constexpr bool kQueriesAgents = true;
  explicit ReplayController(std::vector<Decision> script) : script_(std::move(script)) {}

  SkipAction choose_skip(const DecisionContext&) {
    SJ_CHECK_MSG(next_ < script_.size(), "replay script exhausted");
    return script_[next_].skip;
  }
  JumpAction choose_jump(const DecisionContext&) {
    SJ_CHECK(next_ < script_.size());
    return script_[next_].jump;
  }
  // Called by the reading loop after each visited token.
  void advance() { ++next_; }

 private:
  std::vector<Decision> script_;
  std::size_t next_ = 0;
};

namespace internal {
template <typename C>
concept HasAdvance = requires(C c) { c.advance(); };
}  // namespace internal

template <typename Controller>
ReadingTrace read_document(const Document& doc, const StructureIndex& index,
                           const ModelParams& params, Controller& controller,
                           EpisodeTape* tape = nullptr) {
  SJ_CHECK_MSG(index.doc_end == doc.tokens.size(),
               "structure index does not match document length");
  constexpr bool kQueries = Controller::kQueriesAgents;
  const auto d = static_cast<Eigen::Index>(params.dims().hidden);

  ReadingTrace trace;
  trace.tokens_total = doc.tokens.size();
  if (tape != nullptr) {
    tape->agents_queried = kQueries;
    tape->steps.clear();
  }

  Vector h = Vector::Zero(d);
  Vector c = Vector::Zero(d);
  std::size_t pos = 0;
  while (pos < index.doc_end) {
    const Token& token = doc.tokens[pos];
    Vector x = embed(token, params);

    TraceStep step;
    step.position = pos;
    TapeStep tape_step;
    tape_step.token_id = token.vocab_id;

    std::vector<double> skip_lp;
    std::vector<double> skip_p;
    if constexpr (kQueries) {
      skip_lp = log_softmax(to_std(skip_logits(h, x, params)));
      skip_p.resize(skip_lp.size());
      for (std::size_t k = 0; k < skip_lp.size(); ++k) skip_p[k] = std::exp(skip_lp[k]);
    }
    const SkipAction skip =
        controller.choose_skip(DecisionContext{doc, index, pos, skip_p});
    step.skip = skip;
    tape_step.skip = skip;
    if constexpr (kQueries) {
      step.skip_logprob = skip_lp[static_cast<std::size_t>(skip)];
      std::copy(skip_lp.begin(), skip_lp.end(), tape_step.skip_log_probs.begin());
    }

    std::size_t next = pos + 1;
    if (skip == SkipAction::kRead) {
      LstmState s = lstm_step(h, c, x, params, tape ? &tape_step.lstm : nullptr);
      h = std::move(s.h);
      c = std::move(s.c);
      ++trace.state_updates;

      std::vector<double> jump_lp;
      std::vector<double> jump_p;
      if constexpr (kQueries) {
        jump_lp = log_softmax(to_std(jump_logits(h, params)));
        jump_p.resize(jump_lp.size());
        for (std::size_t k = 0; k < jump_lp.size(); ++k) jump_p[k] = std::exp(jump_lp[k]);
      }
      const JumpAction jump =
          controller.choose_jump(DecisionContext{doc, index, pos, jump_p});
      step.jump = jump;
      step.jump_logprob = 0.0;
      tape_step.jump = jump;
      if constexpr (kQueries) {
        step.jump_logprob = jump_lp[static_cast<std::size_t>(jump)];
        std::copy(jump_lp.begin(), jump_lp.end(), tape_step.jump_log_probs.begin());
      }
      next = resolve_jump(index, pos, jump);
      if (next == index.doc_end &&
          (jump == JumpAction::kToDocEnd || is_sentinel_jump(index, pos, jump))) {
        trace.terminated_early = true;
      }
    }
    if constexpr (internal::HasAdvance<Controller>) controller.advance();

    trace.steps.push_back(std::move(step));
    if (tape != nullptr) tape->steps.push_back(std::move(tape_step));
    pos = next;
  }

  trace.prediction = classify(h, params);
  trace.final_hidden = std::move(h);
  return trace;
}

enum class ReadMode { kSample, kGreedy, kFullRead };

inline std::string_view to_string(ReadMode m) {
  switch (m) {
    case ReadMode::kSample: return "sample";
    case ReadMode::kGreedy: return "greedy";
    case ReadMode::kFullRead: return "full_read";
  }
  return "?";
}

inline ReadMode parse_read_mode(std::string_view s) {
  if (s == "sample") return ReadMode::kSample;
  if (s == "greedy") return ReadMode::kGreedy;
  if (s == "full_read") return ReadMode::kFullRead;
  throw Error("usage", "unknown mode '" + std::string(s) +
                           "' (expected greedy, sample or full_read)");
}

inline ReadingTrace read_document(const Document& doc, const StructureIndex& index,
                                  const ModelParams& params, ReadMode mode, Rng& rng,
                                  EpisodeTape* tape = nullptr) {
  switch (mode) {
    case ReadMode::kSample: {
      SampleController c(rng);
      return read_document(doc, index, params, c, tape);
    }
    case ReadMode::kGreedy: {
      GreedyController c;
      return read_document(doc, index, params, c, tape);
    }
    case ReadMode::kFullRead: {
      FullReadController c;
      return read_document(doc, index, params, c, tape);
    }
  }
  internal::FailCheck("valid ReadMode", __FILE__, __LINE__, "");
}

}  // namespace sjlstm

#endif  // SJLSTM_MODEL_HPP_
