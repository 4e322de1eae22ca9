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

// Generates a small planted-signal corpus, trains a speed reader on it and
// prints one greedy reading path.

#include <cstdio>

#include "sjlstm/sjlstm.hpp"

int main() {
  using namespace sjlstm;

  SynthSpec spec;
  spec.num_docs = 2000;
  SynthCorpus corpus = generate_corpus(spec, 1);

  const LabelMap labels = label_map_of(corpus.examples);
  const Vocabulary vocab = build_vocabulary(corpus.examples, 2);
  const auto docs = make_documents(corpus.examples, vocab, labels);
  const auto indices = build_indices(docs);

  TrainConfig cfg;
  cfg.hidden_size = 32;
  cfg.seed = 1;
  Rng init(cfg.seed);
  Trainer trainer(ModelParams::Initialize({cfg.hidden_size, vocab.size(), labels.size()}, init),
                  cfg);
  for (int epoch = 0; epoch < 3; ++epoch) {
    EpochStats s = trainer.run_epoch(docs, indices);
    std::printf("epoch %zu  reward %.3f  fraction read %.3f\n", s.epoch, s.mean_reward,
                s.mean_fraction_read);
  }

  Metrics m = evaluate(trainer.params(), docs, indices, ReadMode::kGreedy);
  std::printf("greedy accuracy %.3f, fraction read %.3f\n", m.accuracy, m.fraction_read);

  GreedyController greedy;
  ReadingTrace t = read_document(docs[0], indices[0], trainer.params(), greedy);
  std::printf("%s\n", corpus.examples[0].text.c_str());
  for (const auto& step : t.steps) {
    std::printf("  %3zu %-8s %s %s\n", step.position, docs[0].tokens[step.position].surface.c_str(),
                std::string(to_string(step.skip)).c_str(),
                step.jump ? std::string(to_string(*step.jump)).c_str() : "");
  }
  std::printf("predicted %s, label %s\n", labels.labels()[t.predicted_class()].c_str(),
              corpus.examples[0].label.c_str());
  return 0;
}
