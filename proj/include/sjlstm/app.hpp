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

#ifndef SJLSTM_APP_HPP_
#define SJLSTM_APP_HPP_

// The train / eval / trace / synth commands as library calls, so the CLI and
// the integration tests drive exactly the same code.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sjlstm/checkpoint.hpp"
#include "sjlstm/corpus.hpp"
#include "sjlstm/evaluation.hpp"
#include "sjlstm/model.hpp"
#include "sjlstm/synth.hpp"
#include "sjlstm/training.hpp"

namespace sjlstm {

struct TrainOptions {
  std::string config_path;
  std::string corpus_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

struct TrainOutcome {
  std::vector<EpochStats> epochs;
  std::filesystem::path final_checkpoint;
};

inline std::string checkpoint_name(std::size_t epoch) {
  std::string n = std::to_string(epoch + 1);
  while (n.size() < 3) n.insert(n.begin(), '0');
  return "checkpoint-epoch-" + n + ".json";
}

inline std::uint64_t init_seed(std::uint64_t seed) {
  return derive_seed(seed, 0, 0, /*stream=*/0x1A17u);
}

// Trains on a corpus file; writes one checkpoint per epoch, checkpoint.json
// (the last epoch) and train_stats.jsonl (one line per epoch).
inline TrainOutcome run_train(const TrainOptions& opt) {
  TrainConfig cfg = load_train_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;

  const auto raw = read_corpus_file(opt.corpus_path);
  if (raw.empty()) throw Error("corpus_format", opt.corpus_path + ": corpus is empty");
  const LabelMap labels = label_map_of(raw);
  const Vocabulary vocab = build_vocabulary(raw, cfg.min_freq);
  const auto docs = make_documents(raw, vocab, labels);
  const auto indices = build_indices(docs);

  Rng init_rng(init_seed(cfg.seed));
  ModelDims dims{cfg.hidden_size, vocab.size(), labels.size()};
  Trainer trainer(ModelParams::Initialize(dims, init_rng), cfg);

  const std::filesystem::path out(opt.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error("io", "cannot create directory " + out.string() + ": " + ec.message());

  std::ofstream stats_out(out / "train_stats.jsonl", std::ios::binary | std::ios::trunc);
  if (!stats_out) throw Error("io", "cannot write " + (out / "train_stats.jsonl").string());

  TrainOutcome outcome;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    EpochStats s = trainer.run_epoch(docs, indices);
    stats_out << to_json(s).dump() << '\n';
    stats_out.flush();
    Checkpoint ck{trainer.params(), vocab, labels};
    ck.metadata["config"] = to_json(cfg);
    ck.metadata["epoch"] = e;
    save_checkpoint((out / checkpoint_name(e)).string(), ck);
    if (e + 1 == cfg.epochs) {
      outcome.final_checkpoint = out / "checkpoint.json";
      save_checkpoint(outcome.final_checkpoint.string(), ck);
    }
    outcome.epochs.push_back(s);
  }
  if (!stats_out) throw Error("io", "write failed for train_stats.jsonl");
  return outcome;
}

struct EvalOptions {
  std::string checkpoint_path;
  std::string corpus_path;
  ReadMode mode = ReadMode::kGreedy;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool write_traces = false;
  // Separately trained full-read model for the comparison column. Without
  // it the same checkpoint is evaluated in full_read mode.
  std::optional<std::string> baseline_checkpoint;
  std::size_t sample_seeds = 1;
};

struct LoadedCorpus {
  std::vector<Document> docs;
  std::vector<StructureIndex> indices;
};

inline LoadedCorpus load_for(const Checkpoint& ck, const std::vector<RawExample>& raw) {
  const LabelMap corpus_labels = label_map_of(raw);
  for (const auto& l : corpus_labels.labels()) {
    if (!ck.labels.contains(l)) {
      throw Error("label_map", "corpus labels " + corpus_labels.describe() +
                                   " are not covered by checkpoint labels " +
                                   ck.labels.describe());
    }
  }
  LoadedCorpus c;
  c.docs = make_documents(raw, ck.vocab, ck.labels);
  c.indices = build_indices(c.docs);
  return c;
}

struct EvalOutcome {
  Report report;
  std::vector<ReadingTrace> traces;
};

inline EvalOutcome run_eval(const EvalOptions& opt) {
  using Clock = std::chrono::steady_clock;
  const Checkpoint ck = load_checkpoint(opt.checkpoint_path);
  const auto raw = read_corpus_file(opt.corpus_path);
  if (raw.empty()) throw Error("evaluation", opt.corpus_path + ": corpus is empty");
  const LoadedCorpus corpus = load_for(ck, raw);

  EvalOutcome outcome;
  Report& r = outcome.report;
  r.mode = std::string(to_string(opt.mode));
  r.seed = opt.seed;
  r.hidden = ck.params.dims().hidden;
  r.classes = ck.params.dims().classes;
  r.corpus = digest(corpus.docs, ck.labels.size());
  r.config = {{"checkpoint", opt.checkpoint_path},
              {"corpus", opt.corpus_path},
              {"mode", r.mode},
              {"seed", opt.seed},
              {"baseline_checkpoint", opt.baseline_checkpoint.value_or("")}};

  auto t0 = Clock::now();
  r.speed_reader = evaluate(ck.params, corpus.docs, corpus.indices, opt.mode, opt.seed,
                            opt.write_traces ? &outcome.traces : nullptr);
  r.speed_reader_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (opt.mode == ReadMode::kSample && opt.sample_seeds > 1) {
    for (std::size_t k = 0; k < opt.sample_seeds; ++k) {
      r.sampled_runs.push_back(evaluate(ck.params, corpus.docs, corpus.indices,
                                        ReadMode::kSample, derive_seed(opt.seed, k, 0, 0x5A)));
    }
  }

  t0 = Clock::now();
  if (opt.baseline_checkpoint) {
    const Checkpoint base = load_checkpoint(*opt.baseline_checkpoint);
    const LoadedCorpus bc = load_for(base, raw);
    if (!(base.labels == ck.labels)) {
      throw Error("label_map", "baseline labels " + base.labels.describe() +
                                   " differ from reader labels " + ck.labels.describe());
    }
    r.full_read = evaluate(base.params, bc.docs, bc.indices, ReadMode::kFullRead);
  } else {
    r.full_read = evaluate(ck.params, corpus.docs, corpus.indices, ReadMode::kFullRead);
  }
  r.full_read_seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  emit_report(r, opt.out_dir, &corpus.docs, opt.write_traces ? &outcome.traces : nullptr);
  return outcome;
}

struct SynthOptions {
  std::string spec_path;
  std::string out_path;
  std::uint64_t seed = 0;
};

// Writes the corpus file and <out>.truth.json with the oracle statistics.
inline GroundTruth run_synth(const SynthOptions& opt) {
  const SynthSpec spec = load_synth_spec(opt.spec_path);
  const SynthCorpus corpus = generate_corpus(spec, opt.seed);
  write_corpus_file(opt.out_path, corpus.examples);
  const std::string truth_path = opt.out_path + ".truth.json";
  std::ofstream out(truth_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot write " + truth_path);
  out << to_json(corpus.truth, spec, opt.seed).dump(2) << '\n';
  if (!out) throw Error("io", "write failed for " + truth_path);
  return corpus.truth;
}

}  // namespace sjlstm

#endif  // SJLSTM_APP_HPP_
