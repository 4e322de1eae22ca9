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

#ifndef SJLSTM_TRAINING_HPP_
#define SJLSTM_TRAINING_HPP_

// Joint training of the reader. Per episode the surrogate loss is
//
//   L = ce_weight * CE(prediction, label)
//       - (R - b) * sum_t log pi(a_t)
//       - entropy_weight * sum_t H(pi_t)
//
// with R the episode reward and b a moving-average baseline. The advantage
// (R - b) is a constant under differentiation; the log-prob and entropy terms
// backpropagate through the agent heads into the LSTM and the embeddings.

#include <cmath>
#include <cstdint>
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

struct RewardConfig {
  double lambda_cost = 0.1;
  double correct_reward = 1.0;
  double incorrect_reward = -1.0;
  double entropy_weight = 0.01;
  double ce_weight = 1.0;
};

// Scalar running average of episode rewards.
class Baseline {
 public:
  explicit Baseline(double decay = 0.9) : decay_(decay) {}
  double value() const { return value_; }
  double decay() const { return decay_; }
  void update(double reward) { value_ = decay_ * value_ + (1.0 - decay_) * reward; }

 private:
  double decay_;
  double value_ = 0.0;
};

enum class OptimizerKind { kSgd, kAdam };

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  RewardConfig reward;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  // kSample trains the speed reader; kFullRead trains the full-read baseline.
  ReadMode reader = ReadMode::kSample;
  std::size_t hidden_size = 64;
  std::size_t min_freq = 2;
  double grad_clip = 5.0;  // global-norm clip, 0 disables
  double baseline_decay = 0.9;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

inline void validate(const TrainConfig& c) {
  auto fail = [](const std::string& m) { throw Error("config", m); };
  if (c.epochs == 0) fail("epochs must be positive");
  if (c.batch_size == 0) fail("batch_size must be positive");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    fail("learning_rate must be positive");
  }
  if (c.hidden_size == 0) fail("hidden_size must be positive");
  if (c.min_freq == 0) fail("min_freq must be positive");
  if (c.reader == ReadMode::kGreedy) fail("reader must be 'speed' or 'full_read'");
  const auto& r = c.reward;
  for (double v : {r.lambda_cost, r.correct_reward, r.incorrect_reward,
                   r.entropy_weight, r.ce_weight, c.grad_clip, c.baseline_decay}) {
    if (!std::isfinite(v)) fail("non-finite config value");
  }
  if (r.lambda_cost < 0.0) fail("reward.lambda_cost must be >= 0");
  if (r.entropy_weight < 0.0) fail("reward.entropy_weight must be >= 0");
  if (!(r.ce_weight > 0.0)) fail("reward.ce_weight must be > 0");
  if (c.grad_clip < 0.0) fail("grad_clip must be >= 0");
  if (!(c.baseline_decay >= 0.0 && c.baseline_decay < 1.0)) {
    fail("baseline_decay must be in [0, 1)");
  }
}

namespace internal {

inline void reject_unknown(const nlohmann::json& j,
                           std::initializer_list<std::string_view> known,
                           const std::string& where) {
  if (!j.is_object()) throw Error("config", where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (auto k : known) ok = ok || it.key() == k;
    if (!ok) throw Error("config", "unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace internal

inline TrainConfig parse_train_config(const nlohmann::json& j) {
  internal::reject_unknown(
      j,
      {"epochs", "batch_size", "learning_rate", "seed", "reward", "optimizer",
       "reader", "hidden_size", "min_freq", "grad_clip", "baseline_decay",
       "adam_beta1", "adam_beta2", "adam_epsilon"},
      "train config");
  TrainConfig c;
  internal::read_key(j, "epochs", c.epochs);
  internal::read_key(j, "batch_size", c.batch_size);
  internal::read_key(j, "learning_rate", c.learning_rate);
  internal::read_key(j, "seed", c.seed);
  internal::read_key(j, "hidden_size", c.hidden_size);
  internal::read_key(j, "min_freq", c.min_freq);
  internal::read_key(j, "grad_clip", c.grad_clip);
  internal::read_key(j, "baseline_decay", c.baseline_decay);
  internal::read_key(j, "adam_beta1", c.adam_beta1);
  internal::read_key(j, "adam_beta2", c.adam_beta2);
  internal::read_key(j, "adam_epsilon", c.adam_epsilon);
  if (j.contains("optimizer")) {
    std::string s;
    internal::read_key(j, "optimizer", s);
    if (s == "adam") c.optimizer = OptimizerKind::kAdam;
    else if (s == "sgd") c.optimizer = OptimizerKind::kSgd;
    else throw Error("config", "optimizer must be 'adam' or 'sgd'");
  }
  if (j.contains("reader")) {
    std::string s;
    internal::read_key(j, "reader", s);
    if (s == "speed") c.reader = ReadMode::kSample;
    else if (s == "full_read") c.reader = ReadMode::kFullRead;
    else throw Error("config", "reader must be 'speed' or 'full_read'");
  }
  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    internal::reject_unknown(r,
                             {"lambda_cost", "correct_reward", "incorrect_reward",
                              "entropy_weight", "ce_weight"},
                             "reward");
    internal::read_key(r, "lambda_cost", c.reward.lambda_cost);
    internal::read_key(r, "correct_reward", c.reward.correct_reward);
    internal::read_key(r, "incorrect_reward", c.reward.incorrect_reward);
    internal::read_key(r, "entropy_weight", c.reward.entropy_weight);
    internal::read_key(r, "ce_weight", c.reward.ce_weight);
  }
  validate(c);
  return c;
}

inline TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", path + ": " + e.what());
  }
  return parse_train_config(j);
}

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["learning_rate"] = c.learning_rate;
  j["seed"] = c.seed;
  j["optimizer"] = c.optimizer == OptimizerKind::kAdam ? "adam" : "sgd";
  j["reader"] = c.reader == ReadMode::kFullRead ? "full_read" : "speed";
  j["hidden_size"] = c.hidden_size;
  j["min_freq"] = c.min_freq;
  j["grad_clip"] = c.grad_clip;
  j["baseline_decay"] = c.baseline_decay;
  j["adam_beta1"] = c.adam_beta1;
  j["adam_beta2"] = c.adam_beta2;
  j["adam_epsilon"] = c.adam_epsilon;
  j["reward"] = {{"lambda_cost", c.reward.lambda_cost},
                 {"correct_reward", c.reward.correct_reward},
                 {"incorrect_reward", c.reward.incorrect_reward},
                 {"entropy_weight", c.reward.entropy_weight},
                 {"ce_weight", c.reward.ce_weight}};
  return j;
}

// Accuracy term minus the normalized update cost.
inline double episode_reward(const ReadingTrace& trace, std::size_t label,
                             const RewardConfig& cfg) {
  const bool correct = trace.predicted_class() == label;
  const double base = correct ? cfg.correct_reward : cfg.incorrect_reward;
  const double denom = static_cast<double>(std::max<std::size_t>(1, trace.tokens_total));
  return base - cfg.lambda_cost * static_cast<double>(trace.state_updates) / denom;
}

struct EpisodeObjective {
  double loss = 0.0;
  double cross_entropy = 0.0;
  double logprob_sum = 0.0;
  double entropy_sum = 0.0;
};

// Surrogate loss of a recorded episode. Policy terms are used only when the
// agents were actually consulted.
inline EpisodeObjective episode_objective(const EpisodeTape& tape,
                                          const ReadingTrace& trace,
                                          std::size_t label, double advantage,
                                          const RewardConfig& cfg) {
  EpisodeObjective obj;
  obj.cross_entropy = cross_entropy(trace.prediction, label);
  if (tape.agents_queried) {
    for (const auto& st : tape.steps) {
      obj.logprob_sum += st.skip_log_probs[static_cast<std::size_t>(st.skip)];
      obj.entropy_sum += entropy(st.skip_log_probs);
      if (st.skip == SkipAction::kRead) {
        obj.logprob_sum += st.jump_log_probs[static_cast<std::size_t>(st.jump)];
        obj.entropy_sum += entropy(st.jump_log_probs);
      }
    }
  }
  obj.loss = cfg.ce_weight * obj.cross_entropy - advantage * obj.logprob_sum -
             cfg.entropy_weight * obj.entropy_sum;
  return obj;
}

// Adds scale * dL/dtheta for one episode into the gradient buffers.
inline void accumulate_episode_gradient(const EpisodeTape& tape,
                                        const ReadingTrace& trace,
                                        std::size_t label, double advantage,
                                        const RewardConfig& cfg, double scale,
                                        ModelParams& params) {
  const auto d = static_cast<Eigen::Index>(params.dims().hidden);
  const bool policy = tape.agents_queried;

  // Classifier head on the final state.
  Vector dz_class =
      cross_entropy_logit_grad(trace.prediction, label) * (cfg.ce_weight * scale);
  params.grad(Slot::kClassifierWeight).matrix().noalias() +=
      dz_class * trace.final_hidden.transpose();
  params.grad(Slot::kClassifierBias).vector() += dz_class;
  Vector dh = params.value(Slot::kClassifierWeight).matrix().transpose() * dz_class;
  Vector dc = Vector::Zero(d);

  // For every step, the tape index of the read that produced the state the
  // step observed (-1: the zero initial state).
  std::vector<std::ptrdiff_t> state_source(tape.steps.size());
  std::ptrdiff_t last_read = -1;
  for (std::size_t t = 0; t < tape.steps.size(); ++t) {
    state_source[t] = last_read;
    if (tape.steps[t].skip == SkipAction::kRead) last_read = static_cast<std::ptrdiff_t>(t);
  }
  const Vector zero = Vector::Zero(d);

  const auto& skip_w = params.value(Slot::kSkipWeight);
  const auto& jump_w = params.value(Slot::kJumpWeight);
  for (std::size_t t = tape.steps.size(); t-- > 0;) {
    const TapeStep& st = tape.steps[t];
    const Vector& h_before =
        state_source[t] < 0 ? zero : tape.steps[static_cast<std::size_t>(state_source[t])].lstm.h;
    Vector dx = Vector::Zero(d);

    if (st.skip == SkipAction::kRead) {
      if (policy) {
        Vector dz = policy_logit_grad(st.jump_log_probs,
                                      static_cast<std::size_t>(st.jump), advantage,
                                      cfg.entropy_weight) * scale;
        params.grad(Slot::kJumpWeight).matrix().noalias() += dz * st.lstm.h.transpose();
        params.grad(Slot::kJumpBias).vector() += dz;
        dh.noalias() += jump_w.matrix().transpose() * dz;
      }
      LstmGrad g = lstm_backward(st.lstm, dh, dc, params);
      dh = std::move(g.dh_prev);
      dc = std::move(g.dc_prev);
      dx += g.dx;
    }

    if (policy) {
      Vector dz = policy_logit_grad(st.skip_log_probs,
                                    static_cast<std::size_t>(st.skip), advantage,
                                    cfg.entropy_weight) * scale;
      const Vector x = params.value(Slot::kEmbedding).row(st.token_id);
      auto gw = params.grad(Slot::kSkipWeight).matrix();
      gw.leftCols(d).noalias() += dz * h_before.transpose();
      gw.rightCols(d).noalias() += dz * x.transpose();
      params.grad(Slot::kSkipBias).vector() += dz;
      dh.noalias() += skip_w.matrix().leftCols(d).transpose() * dz;
      dx.noalias() += skip_w.matrix().rightCols(d).transpose() * dz;
    }
    params.grad(Slot::kEmbedding).row(st.token_id) += dx;
  }
}

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, const ParamStore& params)
      : kind_(cfg.optimizer),
        lr_(cfg.learning_rate),
        beta1_(cfg.adam_beta1),
        beta2_(cfg.adam_beta2),
        eps_(cfg.adam_epsilon) {
    if (kind_ == OptimizerKind::kAdam) {
      for (const auto& p : params) {
        m_.emplace_back(p.value.shape());
        v_.emplace_back(p.value.shape());
      }
    }
  }

  // Applies the gradients currently held in `params`.
  void step(ParamStore& params) {
    ++t_;
    if (kind_ == OptimizerKind::kSgd) {
      for (auto& p : params) p.value.vector() -= lr_ * p.grad.vector();
      return;
    }
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      auto g = params[k].grad.vector();
      auto m = m_[k].vector();
      auto v = v_[k].vector();
      m = beta1_ * m + (1.0 - beta1_) * g;
      v = beta2_ * v + (1.0 - beta2_) * g.cwiseProduct(g);
      params[k].value.vector().array() -=
          lr_ * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
    }
  }

  std::uint64_t steps() const { return t_; }

 private:
  OptimizerKind kind_;
  double lr_, beta1_, beta2_, eps_;
  std::uint64_t t_ = 0;
  std::vector<Tensor> m_, v_;
};

inline double grad_norm(const ParamStore& params) {
  double s = 0.0;
  for (const auto& p : params) s += p.grad.vector().squaredNorm();
  return std::sqrt(s);
}

inline void clip_grad_norm(ParamStore& params, double max_norm) {
  if (max_norm <= 0.0) return;
  const double n = grad_norm(params);
  if (n > max_norm) {
    const double f = max_norm / n;
    for (auto& p : params) p.grad.vector() *= f;
  }
}

class TrainingError : public Error {
 public:
  TrainingError(std::size_t doc_index, const std::string& message)
      : Error("training", "document " + std::to_string(doc_index) + ": " + message),
        doc_index_(doc_index) {}
  std::size_t doc_index() const { return doc_index_; }

 private:
  std::size_t doc_index_;
};

struct BatchStats {
  double loss_sum = 0.0;
  double reward_sum = 0.0;
  double fraction_read_sum = 0.0;
  std::size_t correct = 0;
  std::size_t episodes = 0;
};

inline std::uint64_t episode_seed(std::uint64_t seed, std::size_t doc_index,
                                  std::size_t epoch) {
  return derive_seed(seed, doc_index, epoch);
}

// Runs one episode per listed document and leaves the mean batch gradient in
// the parameter gradient buffers (zeroed first). Episodes are processed in
// the listed order; the baseline advances once per episode.
inline BatchStats compute_batch_gradient(const std::vector<Document>& corpus,
                                         const std::vector<StructureIndex>& indices,
                                         std::span<const std::size_t> batch,
                                         ModelParams& params, const TrainConfig& cfg,
                                         Baseline& baseline, std::size_t epoch) {
  SJ_CHECK(!batch.empty());
  params.store().zero_grad();
  BatchStats stats;
  const double scale = 1.0 / static_cast<double>(batch.size());
  EpisodeTape tape;
  for (std::size_t doc_index : batch) {
    const Document& doc = corpus[doc_index];
    try {
      Rng rng(episode_seed(cfg.seed, doc_index, epoch));
      ReadingTrace trace = read_document(doc, indices[doc_index], params, cfg.reader, rng, &tape);
      const double reward = episode_reward(trace, doc.label_id, cfg.reward);
      const double advantage = tape.agents_queried ? reward - baseline.value() : 0.0;
      baseline.update(reward);
      const EpisodeObjective obj =
          episode_objective(tape, trace, doc.label_id, advantage, cfg.reward);
      if (!std::isfinite(obj.loss)) {
        throw TrainingError(doc_index, "non-finite loss (ce=" +
                                           std::to_string(obj.cross_entropy) + ")");
      }
      accumulate_episode_gradient(tape, trace, doc.label_id, advantage, cfg.reward,
                                  scale, params);
      stats.loss_sum += obj.loss;
      stats.reward_sum += reward;
      stats.fraction_read_sum +=
          doc.length() == 0 ? 1.0
                            : static_cast<double>(trace.state_updates) /
                                  static_cast<double>(doc.length());
      stats.correct += trace.predicted_class() == doc.label_id ? 1 : 0;
      ++stats.episodes;
    } catch (const TrainingError&) {
      throw;
    } catch (const Error& e) {
      throw TrainingError(doc_index, e.what());
    }
  }
  return stats;
}

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double mean_reward = 0.0;
  double mean_fraction_read = 0.0;
  double sampled_accuracy = 0.0;
  double baseline = 0.0;
  std::size_t documents = 0;
  std::size_t updates = 0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

inline nlohmann::ordered_json to_json(const EpochStats& s) {
  nlohmann::ordered_json j;
  j["epoch"] = s.epoch;
  j["mean_loss"] = s.mean_loss;
  j["mean_reward"] = s.mean_reward;
  j["mean_fraction_read"] = s.mean_fraction_read;
  j["sampled_accuracy"] = s.sampled_accuracy;
  j["baseline"] = s.baseline;
  j["documents"] = s.documents;
  j["updates"] = s.updates;
  return j;
}

inline std::vector<StructureIndex> build_indices(const std::vector<Document>& corpus) {
  std::vector<StructureIndex> out;
  out.reserve(corpus.size());
  for (const auto& d : corpus) out.push_back(build_structure_index(d.tokens));
  return out;
}

// One pass over the corpus in a seed-determined shuffled order.
inline EpochStats train_epoch(const std::vector<Document>& corpus,
                              const std::vector<StructureIndex>& indices,
                              ModelParams& params, const TrainConfig& cfg,
                              Baseline& baseline, Optimizer& optimizer,
                              std::size_t epoch) {
  if (corpus.empty()) throw Error("training", "empty training corpus");
  SJ_CHECK(indices.size() == corpus.size());
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng shuffle_rng(derive_seed(cfg.seed, 0, epoch, /*stream=*/0x5u));
  shuffle(order, shuffle_rng);

  BatchStats total;
  std::size_t updates = 0;
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(order.size(), start + cfg.batch_size);
    std::span<const std::size_t> batch(order.data() + start, end - start);
    BatchStats b = compute_batch_gradient(corpus, indices, batch, params, cfg, baseline, epoch);
    clip_grad_norm(params.store(), cfg.grad_clip);
    optimizer.step(params.store());
    ++updates;
    const std::string bad = params.store().first_non_finite();
    if (!bad.empty()) {
      throw TrainingError(batch.front(), "parameter '" + bad + "' became non-finite");
    }
    total.loss_sum += b.loss_sum;
    total.reward_sum += b.reward_sum;
    total.fraction_read_sum += b.fraction_read_sum;
    total.correct += b.correct;
    total.episodes += b.episodes;
  }
  params.store().zero_grad();

  const double n = static_cast<double>(total.episodes);
  EpochStats s;
  s.epoch = epoch;
  s.mean_loss = total.loss_sum / n;
  s.mean_reward = total.reward_sum / n;
  s.mean_fraction_read = total.fraction_read_sum / n;
  s.sampled_accuracy = static_cast<double>(total.correct) / n;
  s.baseline = baseline.value();
  s.documents = total.episodes;
  s.updates = updates;
  return s;
}

// Owns the model, baseline and optimizer state across epochs.
class Trainer {
 public:
  Trainer(ModelParams params, TrainConfig cfg)
      : params_(std::move(params)),
        cfg_(std::move(cfg)),
        baseline_(cfg_.baseline_decay),
        optimizer_(cfg_, params_.store()) {
    validate(cfg_);
  }

  EpochStats run_epoch(const std::vector<Document>& corpus,
                       const std::vector<StructureIndex>& indices) {
    return train_epoch(corpus, indices, params_, cfg_, baseline_, optimizer_, epoch_++);
  }

  const ModelParams& params() const { return params_; }
  ModelParams& params() { return params_; }
  const TrainConfig& config() const { return cfg_; }
  const Baseline& baseline() const { return baseline_; }
  std::size_t epochs_done() const { return epoch_; }

 private:
  ModelParams params_;
  TrainConfig cfg_;
  Baseline baseline_;
  Optimizer optimizer_;
  std::size_t epoch_ = 0;
};

}  // namespace sjlstm

#endif  // SJLSTM_TRAINING_HPP_
