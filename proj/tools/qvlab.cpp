// Copyright 2026 The qvlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "qvlab/experiment.hpp"

namespace {

void add_config_options(CLI::App* cmd, qvlab::ExperimentConfig* cfg) {
  cmd->set_config("--config")->transform(CLI::FileOnDefaultPath("."));
  cmd->add_option("--seed", cfg->seed, "base RNG seed");
  cmd->add_option("--a", cfg->a, "ancilla qubits of generated bases");
  cmd->add_option("--w", cfg->w, "witness qubits of generated bases");
  cmd->add_option("--c", cfg->c, "completeness annotation");
  cmd->add_option("--s", cfg->s, "soundness annotation");
  cmd->add_option("--d-sweep", cfg->d_sweep, "counter truncation sweep");
  cmd->add_option("--q-sweep", cfg->q_sweep, "completeness exponent sweep");
  cmd->add_option("--qbits-sweep", cfg->qbits_sweep,
                  "probability-truncation bit sweep");
  cmd->add_option("--m-sweep", cfg->m_sweep, "witness-restriction sweep");
  cmd->add_option("--rewinding-trials", cfg->rewinding_trials,
                  "rewinding suite verifier count");
  cmd->add_option("--lemma23-trials", cfg->lemma23_trials,
                  "controlled-gate-removal trial count");
  cmd->add_option("--soundness-bases", cfg->soundness_bases,
                  "no-instance bases per soundness check");
  cmd->add_option("--block-bases", cfg->block_bases,
                  "bases for the block-diagonality check");
  cmd->add_option("--truncation-trials", cfg->truncation_trials,
                  "witness-truncation trials per m");
  cmd->add_option("--base-t-a", cfg->base_t_a, "time-model input t_A");
  cmd->add_option("--gen-count", cfg->gen_count, "verifiers emitted by gen");
  cmd->add_option("--tol", cfg->tol, "assertion tolerance override");
  cmd->add_option("--out", cfg->out_dir,
                  "output directory (default $QVLAB_OUT or ./qvlab_out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qvlab: verifier-circuit constructions and amplifier sweeps"};
  app.require_subcommand(1);

  qvlab::ExperimentConfig cfg;

  CLI::App* run_cmd =
      app.add_subcommand("run", "run experiment suites and emit reports");
  add_config_options(run_cmd, &cfg);
  run_cmd->add_option("--suite", cfg.suite,
                      "rewinding | c1 | c2 | truncation | prob-trunc | all");
  run_cmd->add_flag("--check-only", cfg.check_only,
                    "recompute and compare against saved reports");

  CLI::App* gen_cmd =
      app.add_subcommand("gen", "emit a reproducible verifier corpus (.qvc)");
  add_config_options(gen_cmd, &cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const qvlab::RunResult result =
        run_cmd->parsed() ? qvlab::run(cfg) : qvlab::gen(cfg);
    for (const auto& line : result.summary) std::cout << line << "\n";
    if (result.exit_code != 0)
      std::cerr << "first failure: " << result.first_failure << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
