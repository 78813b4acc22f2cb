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

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qvlab/common.hpp"

namespace qvlab {

/// A normalized pure state on a dim-dimensional space.
struct StateVector {
  Vector amplitudes;

  StateVector() = default;
  explicit StateVector(Vector v) : amplitudes(std::move(v)) {}

  Index dim() const { return amplitudes.size(); }
  bool is_normalized(double tol = kStateTol) const {
    return std::abs(amplitudes.norm() - 1.0) <= tol;
  }
  /// Basis state |k> of the given dimension.
  static StateVector basis(Index dim, Index k);
};

struct OperatorFlags {
  bool unitary = false;
  bool hermitian = false;
  bool projector = false;
  bool isometry = false;
};

/// A dense dim_out x dim_in complex operator with validated structure flags.
/// Flags are checked on construction (Frobenius norm, tolerance 1e-10).
class Operator {
 public:
  Operator() = default;

  static Operator general(Matrix m);
  static Operator unitary(Matrix m);
  static Operator hermitian(Matrix m);
  static Operator projector(Matrix m);
  static Operator isometry(Matrix m);
  static Operator make(Matrix m, OperatorFlags flags);  // validates all set flags

  static Operator identity(Index dim);

  const Matrix& mat() const { return m_; }
  const OperatorFlags& flags() const { return flags_; }
  Index dim_out() const { return m_.rows(); }
  Index dim_in() const { return m_.cols(); }

  Operator dagger() const;
  /// Matrix product this * rhs, with flag propagation for unitaries.
  Operator operator*(const Operator& rhs) const;

  Vector apply(const Vector& v) const;

 private:
  Operator(Matrix m, OperatorFlags flags) : m_(std::move(m)), flags_(flags) {}
  Matrix m_;
  OperatorFlags flags_;
};

/// Ordered list of named factor registers; the first register is the
/// leftmost (slowest-varying) tensor factor.
class SpaceLayout {
 public:
  struct Reg {
    std::string name;
    Index dim;
  };

  SpaceLayout() = default;
  SpaceLayout(std::initializer_list<Reg> regs);
  explicit SpaceLayout(std::vector<Reg> regs);

  Index total_dim() const { return total_dim_; }
  Index size() const { return static_cast<Index>(regs_.size()); }
  const std::vector<Reg>& regs() const { return regs_; }
  bool has(const std::string& name) const;
  Index position(const std::string& name) const;  // throws if missing
  Index dim_of(const std::string& name) const;

 private:
  std::vector<Reg> regs_;
  Index total_dim_ = 1;
};

/// Kronecker product in list order (first element leftmost / slowest).
/// Flags propagate: a product of unitaries is unitary, etc.
Operator tensor(std::span<const Operator> ops);
Operator tensor(std::initializer_list<Operator> ops);

/// op acting on the named factors (in the given target order), identity on
/// the rest, respecting the layout order. op's dimension must equal the
/// product of the target dims.
Operator embed(const Operator& op, const SpaceLayout& layout,
               const std::vector<std::string>& targets);

/// P_ctrl (x) op + (I - P_ctrl) (x) I, embedded per layout. The projector
/// lives on control_reg; open controls and counter controls (d = 0, d >= 1)
/// are selected by the choice of projector.
Operator controlled(const Operator& op, const Operator& control_projector,
                    const SpaceLayout& layout, const std::string& control_reg,
                    const std::vector<std::string>& targets);

/// Largest eigenvalue and a unit eigenvector of a Hermitian operator.
/// Tie-break among (near-)degenerate top eigenvectors: lexicographically
/// largest vector of absolute amplitudes; global phase fixed so the first
/// nonzero amplitude is real positive.
struct EigenPair {
  double value = 0.0;
  StateVector vector;
};
EigenPair top_eigenpair(const Operator& op);

/// In-place application of a local operator to the named factors of a
/// statevector over `layout` (gather / small matvec / scatter). Avoids
/// materializing the embedded matrix.
void apply_embedded(Vector& state, const Operator& op,
                    const SpaceLayout& layout,
                    const std::vector<std::string>& targets);

/// An operator bound to the registers it acts on.
struct EmbeddedOp {
  Operator op;
  std::vector<std::string> targets;
};

/// Apply a gate list in program order (ops[0] first).
void apply_circuit(Vector& state, std::span<const EmbeddedOp> ops,
                   const SpaceLayout& layout);

/// Dense product of the embedded gate list in program order, assembled
/// column-by-column. Cheaper than chained full-space matrix products.
Matrix compose_circuit(std::span<const EmbeddedOp> ops,
                       const SpaceLayout& layout);

}  // namespace qvlab
