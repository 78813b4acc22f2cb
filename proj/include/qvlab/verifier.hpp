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

#include "qvlab/algebra.hpp"
#include "qvlab/rng.hpp"

namespace qvlab {

/// A verifier: a unitary on ancilla (x) witness, where the first (most
/// significant) ancilla qubit M carries the accept bit after the run.
/// c and s are the promised completeness / soundness annotations.
class Verifier {
 public:
  Verifier(Operator v, Index ancilla_qubits, Index witness_qubits, double c,
           double s);

  const Operator& op() const { return v_; }
  Index ancilla_qubits() const { return a_; }
  Index witness_qubits() const { return w_; }
  Index ancilla_dim() const { return Index(1) << a_; }
  Index witness_dim() const { return Index(1) << w_; }
  Index total_dim() const { return Index(1) << (a_ + w_); }
  double completeness() const { return c_; }
  double soundness() const { return s_; }

  /// Layout [A, W] with A leftmost, matching the circuit diagrams.
  SpaceLayout layout() const;

  /// |1><1| on M tensored with identity, over the full A (x) W space.
  Operator accept_projector() const;
  /// |0><0|_A (x) I_W.
  Operator ancilla_zero_projector() const;

 private:
  Operator v_;
  Index a_;
  Index w_;
  double c_;
  double s_;
};

/// The POVM element P_V whose expectation on a witness is the acceptance
/// probability: (<0|_A (x) I_W) V^dag Pi_acc V (|0>_A (x) I_W).
Operator accept_povm(const Verifier& v);

/// ||Pi_acc V |0>_A |w>||^2.
double p_accept(const Verifier& v, const StateVector& w);

/// Top eigenpair of P_V.
EigenPair optimal_witness(const Verifier& v);

/// The four vectors of the rewinding decomposition for an eigen-witness of
/// P_V with eigenvalue p. In the degenerate cases the unconstructible
/// vectors are absent: p = 1 drops w1 and s0; p = 0 drops w1 and s1.
struct RewindingBasis {
  double p = 0.0;
  StateVector w0;                 // |0>_A |w>, on A (x) W
  std::optional<StateVector> w1;  // on A (x) W
  std::optional<StateVector> s0;  // |0>_M |phi0>
  std::optional<StateVector> s1;  // |1>_M |phi1>
};
RewindingBasis rewinding_basis(const Verifier& v, const StateVector& w);

/// Trace-distance bound 2 sqrt(p (1-p)) for dropping one controlled gate
/// whose control carries amplitude p.
double controlled_gate_removal_bound(double p);

/// Wrap a verifier so its annotations sit symmetrically around 1/4:
/// (c, s) -> (1/4 + delta', 1/4 - delta') with delta' = (c-s)/alpha, where
/// alpha is the smallest feasible stretch >= 2 keeping both coin
/// probabilities in [0, 1]. One fresh ancilla qubit, exactly one
/// (controlled) call to V; the acceptance POVM maps affinely, so the argmax
/// witness is preserved.
Verifier center_gap(const Verifier& v);

/// The stretch used by center_gap: max(2, 4(c+s), (4/3)(2-c-s)).
double center_gap_stretch(double c, double s);

/// Haar-random verifier on a + w qubits (QR of a complex Ginibre matrix).
Verifier haar_verifier(Rng& rng, Index ancilla_qubits, Index witness_qubits,
                       double c, double s);

/// Verifier (one ancilla qubit) whose acceptance POVM has exactly the given
/// spectrum, in a Haar-random witness eigenbasis. Used to generate yes/no
/// instances with controlled maximal acceptance.
Verifier verifier_with_spectrum(Rng& rng, const std::vector<double>& eigs,
                                double c, double s);

}  // namespace qvlab
