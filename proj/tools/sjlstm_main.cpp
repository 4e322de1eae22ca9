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

// Command-line front end: train, eval, trace and synth.
//
// On failure a single JSON line {"error": {"kind": ..., "message": ...}} is
// written to stderr and the exit code is nonzero.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "sjlstm/app.hpp"

namespace {

int Fail(const std::string& kind, const std::string& message, int code) {
  nlohmann::ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << j.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural jump reader: train, evaluate and trace speed readers"};
  app.require_subcommand(1);

  sjlstm::TrainOptions train;
  std::uint64_t train_seed = 0;
  auto* train_cmd = app.add_subcommand("train", "Train a reader on a corpus file");
  train_cmd->add_option("--config", train.config_path, "Training config (JSON)")->required();
  train_cmd->add_option("--corpus", train.corpus_path, "Corpus file (label<TAB>text)")->required();
  train_cmd->add_option("--out", train.out_dir, "Output directory")->required();
  auto* seed_opt = train_cmd->add_option("--seed", train_seed, "Seed (overrides config)");

  sjlstm::EvalOptions eval;
  std::string mode = "greedy";
  std::string baseline;
  auto add_eval_options = [&](CLI::App* cmd) {
    cmd->add_option("--checkpoint", eval.checkpoint_path, "Checkpoint file")->required();
    cmd->add_option("--corpus", eval.corpus_path, "Corpus file")->required();
    cmd->add_option("--mode", mode, "greedy | sample | full_read")
        ->check(CLI::IsMember({"greedy", "sample", "full_read"}));
    cmd->add_option("--out", eval.out_dir, "Output directory")->required();
    cmd->add_option("--seed", eval.seed, "Seed for sample mode");
    cmd->add_option("--baseline", baseline, "Full-read baseline checkpoint");
    cmd->add_option("--sample-seeds", eval.sample_seeds,
                    "Extra sampled evaluations to average (sample mode)");
  };
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint against full reading");
  add_eval_options(eval_cmd);
  auto* trace_cmd = app.add_subcommand("trace", "Evaluate and write per-document traces");
  add_eval_options(trace_cmd);

  sjlstm::SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-signal corpus");
  synth_cmd->add_option("--spec", synth.spec_path, "Synth spec (JSON)")->required();
  synth_cmd->add_option("--out", synth.out_path, "Output corpus path")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generation seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail("usage", e.what(), 2);
  }

  try {
    if (*train_cmd) {
      if (*seed_opt) train.seed = train_seed;
      auto outcome = sjlstm::run_train(train);
      for (const auto& s : outcome.epochs) std::cout << sjlstm::to_json(s).dump() << "\n";
      std::cout << "checkpoint: " << outcome.final_checkpoint.string() << std::endl;
    } else if (*eval_cmd || *trace_cmd) {
      eval.mode = sjlstm::parse_read_mode(mode);
      eval.write_traces = static_cast<bool>(*trace_cmd);
      if (!baseline.empty()) eval.baseline_checkpoint = baseline;
      auto outcome = sjlstm::run_eval(eval);
      std::cout << sjlstm::report_to_json(outcome.report).dump(2) << std::endl;
    } else if (*synth_cmd) {
      auto truth = sjlstm::run_synth(synth);
      std::cout << sjlstm::to_json(truth, sjlstm::load_synth_spec(synth.spec_path), synth.seed)
                       .dump(2)
                << std::endl;
    }
  } catch (const sjlstm::Error& e) {
    return Fail(e.kind(), e.what(), 1);
  } catch (const sjlstm::ContractViolation& e) {
    return Fail("internal", e.what(), 3);
  } catch (const std::exception& e) {
    return Fail("internal", e.what(), 3);
  }
  return 0;
}
