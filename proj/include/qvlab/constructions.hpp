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

#include <optional>

#include "qvlab/circuit_ir.hpp"
#include "qvlab/counter.hpp"
#include "qvlab/verifier.hpp"

namespace qvlab {

struct ResourceCounts {
  int v_calls = 0;
  int v_dagger_calls = 0;
  int counter_increments = 0;
  int counter_zero_controls = 0;  // zero checks / d>=1 controls
  Index counter_dim = 0;
  Index witness_qubits = 0;  // log2 of the witness dimension (counter incl.)
  Index total_qubits = 0;    // log2 of the full dimension

  bool operator==(const ResourceCounts&) const = default;
};

/// A verifier produced by one of the counter constructions (or by the
/// probability-truncation amplifier): a composed unitary over a layout with
/// the counter leftmost, plus an accept rule given as a product of commuting
/// reject projectors. Measurements are deferred into the single final
/// projector.
class AmplifiedVerifier {
 public:
  AmplifiedVerifier(Verifier base, ConstructionTag tag, Index counter_dim,
                    SpaceLayout layout, std::vector<EmbeddedOp> circuit,
                    std::vector<EmbeddedOp> reject_factors,
                    std::vector<std::string> ancilla_regs,
                    std::vector<std::string> witness_regs,
                    ResourceCounts resources);

  const Verifier& base() const { return base_; }
  ConstructionTag tag() const { return tag_; }
  Index counter_dim() const { return d_; }
  const SpaceLayout& layout() const { return layout_; }
  const std::vector<EmbeddedOp>& circuit() const { return circuit_; }
  const std::vector<EmbeddedOp>& reject_factors() const { return reject_; }
  const std::vector<std::string>& witness_regs() const { return witness_; }
  const std::vector<std::string>& ancilla_regs() const { return ancilla_; }
  const ResourceCounts& resources() const { return resources_; }

  Index total_dim() const { return layout_.total_dim(); }
  Index witness_dim() const;

  /// Full-space state |0>_anc (x) |wit>, witness factors enumerated in
  /// witness_regs order (counter slowest).
  Vector inject_witness(const Vector& witness) const;

  /// Run the composed circuit on |0>_anc (x) |wit>.
  Vector run(const Vector& witness) const;

  /// Pi_acc V' |0>_anc |wit> on the full space.
  Vector accepted_state(const Vector& witness) const;

  /// Acceptance probability of a witness-space state.
  double acceptance(const StateVector& witness) const;

  /// Acceptance POVM over the witness registers (dense).
  Operator accept_povm() const;

  /// Dense composed unitary (assembled on demand).
  Operator composed() const;
  /// Dense accept projector I - prod(reject factors).
  Operator accept_projector() const;

 private:
  Verifier base_;
  ConstructionTag tag_;
  Index d_;
  SpaceLayout layout_;
  std::vector<EmbeddedOp> circuit_;
  std::vector<EmbeddedOp> reject_;
  std::vector<std::string> ancilla_;
  std::vector<std::string> witness_;
  ResourceCounts resources_;
};

/// Construction 1 (counter + one CNOT between V and V^dag; accept unless the
/// ancilla returns to |0>_A while the counter measurement fails).
/// Guarantees hold when the base has c > 1/2 and s < 1/16; building succeeds
/// for any annotations.
AmplifiedVerifier build_c1(const Verifier& base, Index counter_dim);

/// Construction 2 (Eq.-6 style: V, increment on the reject branch, V^dag,
/// reflection R_0 on A controlled on d >= 1, V; accept on M = 1).
AmplifiedVerifier build_c2(const Verifier& base, Index counter_dim);

/// Rejection probability of construction 2 on a product witness whose base
/// part is an eigen-witness with acceptance p:
/// (1-p) sum_d |psi_{d-1}(1-2p) + 2 p psi_d|^2, with one trailing term.
double rejection_closed_form(double p, const Vector& psi);

/// Post-measurement R amplitude of construction 1 given eigenvalue p:
/// q = p^2 / (p^2 + (1-p)^2).
double c1_post_measurement_q(double p);

/// Soundness bounds: 1/2 + 2 sqrt(s(1-s)) (C1), 1 - (1-s)(1-4s)^2 (C2).
double soundness_bound_c1(double s);
double soundness_bound_c2(double s);

/// Top eigenpair of the amplified verifier's acceptance POVM.
EigenPair max_acceptance(const AmplifiedVerifier& av);

/// Block structure of P_V' in the basis {counter} (x) {eigenvectors of P_V}:
/// largest Frobenius norm of any off-diagonal block, plus the per-block top
/// eigenvalues. Degenerate base spectra are flagged unreliable rather than
/// perturbed.
struct BlockStructureReport {
  bool reliable = false;
  double min_eigengap = 0.0;
  double max_off_block_norm = 0.0;
  std::vector<double> block_top_eigenvalues;
  double global_top = 0.0;
};
BlockStructureReport block_structure_check(const AmplifiedVerifier& av);

/// The construction circuits as IR (the unitary part; callers bind "V").
CircuitDesc c1_circuit_desc(Index ancilla_qubits, Index witness_qubits,
                            Index counter_dim);
CircuitDesc c2_circuit_desc(Index ancilla_qubits, Index witness_qubits,
                            Index counter_dim);

}  // namespace qvlab
