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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qvlab/amplifiers.hpp"

namespace qvlab {

/// Batch-experiment configuration; mirrors the CLI flags and the key=value
/// config file.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  Index a = 2;
  Index w = 2;
  double c = 2.0 / 3.0;
  double s = 1.0 / 3.0;

  std::vector<Index> d_sweep = {8, 16, 32, 64};
  std::vector<Index> q_sweep = {8, 12, 16, 20};
  std::vector<Index> qbits_sweep = {4, 6, 8, 10, 12};
  std::vector<Index> m_sweep = {4, 5, 6, 7, 8};

  int rewinding_trials = 200;
  int lemma23_trials = 500;
  int soundness_bases = 50;
  int block_bases = 20;
  int truncation_trials = 16;
  Index base_t_a = 100;
  Index gen_count = 100;

  double tol = 1e-9;

  std::string suite = "all";  // rewinding | c1 | c2 | truncation | prob-trunc | all
  std::string out_dir;        // default: $QVLAB_OUT or ./qvlab_out
  bool check_only = false;

  /// Returns human-readable problems; empty means valid.
  std::vector<std::string> validate() const;
  bool suite_enabled(const std::string& name) const;
};

struct RunResult {
  int exit_code = 0;                  // 0 ok, 1 failed invariant, 2 config error
  std::string first_failure;          // named first failing invariant
  std::vector<std::string> summary;   // one line per checked invariant
  std::map<std::string, std::string> artifacts;  // filename -> content
};

/// Run the configured suites. Writes artifacts under out_dir unless
/// check_only is set, in which case existing files are compared
/// byte-for-byte against the recomputation.
RunResult run(const ExperimentConfig& config);

/// Emit a reproducible corpus of verifiers as .qvc files with JSON
/// annotation sidecars ({c, s, seed, ...}); rejection-sampled so the
/// maximal acceptance spans (0.05, 0.95).
RunResult gen(const ExperimentConfig& config);

/// Regenerate a verifier from its sidecar annotations.
Verifier verifier_from_sidecar(const std::string& sidecar_json);

/// Parse a .qvc + sidecar pair back into a Verifier (elaborates the circuit
/// with the regenerated binding and checks unitarity).
Verifier load_verifier(const std::string& qvc_text,
                       const std::string& sidecar_json);

/// Default output directory resolution ($QVLAB_OUT, else ./qvlab_out).
std::string default_out_dir();

}  // namespace qvlab
