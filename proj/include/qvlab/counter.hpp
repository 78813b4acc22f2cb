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

#include <string>

#include "qvlab/algebra.hpp"

namespace qvlab {

/// D-level truncation of the counter register.
struct CounterRegister {
  Index dim;  // D >= 2
  std::string role = "B";

  explicit CounterRegister(Index d, std::string r = "B")
      : dim(d), role(std::move(r)) {
    if (d < 2) throw DimensionError("counter dimension must be >= 2");
  }
};

/// Which construction a verifier or witness belongs to. Geometric witnesses
/// exist for C1 (gamma = (1-p)/p, needs p > 1/2) and C2
/// (gamma = 1 - 1/(2p), needs p > 1/4).
enum class ConstructionTag { kC1, kC2, kProbTrunc };

/// Truncated geometric counter state: amplitudes proportional to gamma^d for
/// d = 0..D-2, zero on |D-1> so a single increment never wraps.
struct GeometricWitness {
  double gamma = 0.0;
  Index truncation = 0;  // D
  ConstructionTag tag = ConstructionTag::kC2;
  StateVector state;

  /// Overlap with the infinite-counter geometric state, in closed form:
  /// sqrt(1 - gamma^(2(D-1))).
  double overlap_with_infinite() const;
  /// Trace distance to the infinite state: |gamma|^(D-1).
  double distance_to_infinite() const;
};

/// Permutation |d> -> |d+1 mod D>.
Operator inc_mod(const CounterRegister& reg);

/// X on target_qubit controlled on the counter being |0>:
/// X_t (x) |0><0|_B + I (x) (I - |0><0|)_B, embedded per layout.
Operator zero_check(const CounterRegister& reg, const SpaceLayout& layout,
                    const std::string& counter_name,
                    const std::string& target_qubit);

/// Projector selecting d = 0 (|0><0| on a D-dim register).
Operator counter_zero_projector(Index dim);
/// Projector selecting d >= 1.
Operator counter_nonzero_projector(Index dim);

GeometricWitness geometric_witness(double p, Index truncation,
                                   ConstructionTag tag);

/// Rank-D projector on the 2D-dimensional B(x)R space spanned by |0>|1> and
/// (|d>|0> + |d+1>|1>)/sqrt(2) for d = 0..D-2. Outcome q = 1 of the
/// accepting measurement.
Operator q_projector(Index dim);

/// Remove the length-ell index interval [k, k+ell-1] that carries the least
/// mass (smallest k wins ties) and renormalize. Fidelity with the input is
/// at least sqrt(1 - ell/(D-ell)).
struct IntervalRemoval {
  Index k = 0;
  StateVector state;
  double removed_mass = 0.0;
  double fidelity = 0.0;
};
IntervalRemoval remove_interval(const StateVector& psi, Index ell);

}  // namespace qvlab
