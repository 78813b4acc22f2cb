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

#include "qvlab/constructions.hpp"

#include <cmath>

namespace qvlab {

namespace {

Index int_log2(Index n) {
  Index l = 0;
  while ((Index(1) << l) < n) ++l;
  return l;
}

// |1><1| on the top qubit of a dim-d block.
Matrix top_qubit_projector(Index d, int value) {
  Matrix m = Matrix::Zero(d, d);
  const Index half = d / 2;
  if (value == 1) {
    for (Index i = half; i < d; ++i) m(i, i) = 1.0;
  } else {
    for (Index i = 0; i < half; ++i) m(i, i) = 1.0;
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

}  // namespace

AmplifiedVerifier::AmplifiedVerifier(
    Verifier base, ConstructionTag tag, Index counter_dim, SpaceLayout layout,
    std::vector<EmbeddedOp> circuit, std::vector<EmbeddedOp> reject_factors,
    std::vector<std::string> ancilla_regs, std::vector<std::string> witness_regs,
    ResourceCounts resources)
    : base_(std::move(base)),
      tag_(tag),
      d_(counter_dim),
      layout_(std::move(layout)),
      circuit_(std::move(circuit)),
      reject_(std::move(reject_factors)),
      ancilla_(std::move(ancilla_regs)),
      witness_(std::move(witness_regs)),
      resources_(resources) {}

Index AmplifiedVerifier::witness_dim() const {
  Index d = 1;
  for (const auto& r : witness_) d *= layout_.dim_of(r);
  return d;
}

Vector AmplifiedVerifier::inject_witness(const Vector& witness) const {
  if (witness.size() != witness_dim())
    throw DimensionError("inject_witness: dimension mismatch");
  // strides of the witness registers inside the full space
  const auto& regs = layout_.regs();
  std::vector<Index> strides(regs.size());
  Index s = 1;
  for (Index i = layout_.size() - 1; i >= 0; --i) {
    strides[static_cast<size_t>(i)] = s;
    s *= regs[static_cast<size_t>(i)].dim;
  }
  std::vector<Index> wdims, wstrides;
  for (const auto& name : witness_) {
    const Index p = layout_.position(name);
    wdims.push_back(regs[static_cast<size_t>(p)].dim);
    wstrides.push_back(strides[static_cast<size_t>(p)]);
  }
  Vector full = Vector::Zero(layout_.total_dim());
  for (Index k = 0; k < witness.size(); ++k) {
    Index rem = k;
    Index off = 0;
    for (Index i = static_cast<Index>(wdims.size()) - 1; i >= 0; --i) {
      const Index d = wdims[static_cast<size_t>(i)];
      off += (rem % d) * wstrides[static_cast<size_t>(i)];
      rem /= d;
    }
    full(off) = witness(k);
  }
  return full;
}

Vector AmplifiedVerifier::run(const Vector& witness) const {
  Vector state = inject_witness(witness);
  apply_circuit(state, circuit_, layout_);
  return state;
}

Vector AmplifiedVerifier::accepted_state(const Vector& witness) const {
  Vector state = run(witness);
  Vector rejected = state;
  apply_circuit(rejected, reject_, layout_);
  return state - rejected;
}

double AmplifiedVerifier::acceptance(const StateVector& witness) const {
  Vector state = run(witness.amplitudes);
  apply_circuit(state, reject_, layout_);
  return 1.0 - state.squaredNorm();
}

Operator AmplifiedVerifier::accept_povm() const {
  const Index nw = witness_dim();
  const Index n = total_dim();
  // columns Pi_acc V' |0>_anc |e_j>; P = Gram matrix
  Matrix cols(n, nw);
  Vector wit = Vector::Zero(nw);
  for (Index j = 0; j < nw; ++j) {
    wit.setZero();
    wit(j) = 1.0;
    Vector state = run(wit);
    Vector rejected = state;
    apply_circuit(rejected, reject_, layout_);
    cols.col(j) = state - rejected;
  }
  Matrix p = cols.adjoint() * cols;
  p = (p + p.adjoint()) / 2.0;
  OperatorFlags f;
  f.hermitian = true;
  return Operator::make(std::move(p), f);
}

Operator AmplifiedVerifier::composed() const {
  return Operator::unitary(compose_circuit(circuit_, layout_));
}

Operator AmplifiedVerifier::accept_projector() const {
  const Index n = total_dim();
  Matrix rej = compose_circuit(reject_, layout_);
  return Operator::projector(Matrix::Identity(n, n) - rej);
}

AmplifiedVerifier build_c1(const Verifier& base, Index counter_dim) {
  if (counter_dim < 2) throw DimensionError("build_c1: counter dim must be >= 2");
  const Index da = base.ancilla_dim();
  const Index dw = base.witness_dim();
  const Index d = counter_dim;
  SpaceLayout layout{{"B", d}, {"R", 2}, {"A", da}, {"W", dw}};

  // CNOT from M (top qubit of A) to R, built jointly on (R, A).
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  Matrix cnot_ra = kron(x, top_qubit_projector(da, 1)) +
                   kron(Matrix::Identity(2, 2), top_qubit_projector(da, 0));

  std::vector<EmbeddedOp> circuit;
  circuit.push_back({base.op(), {"A", "W"}});
  circuit.push_back({Operator::unitary(std::move(cnot_ra)), {"R", "A"}});
  circuit.push_back({base.op().dagger(), {"A", "W"}});

  // Reject iff the A measurement lands on |0>_A while the (B,R) measurement
  // falls outside Q.
  const Operator q = q_projector(d);
  const Operator q_perp =
      Operator::projector(Matrix::Identity(2 * d, 2 * d) - q.mat());
  Matrix a0 = Matrix::Zero(da, da);
  a0(0, 0) = 1.0;
  std::vector<EmbeddedOp> reject;
  reject.push_back({q_perp, {"B", "R"}});
  reject.push_back({Operator::projector(std::move(a0)), {"A"}});

  ResourceCounts res;
  res.v_calls = 1;
  res.v_dagger_calls = 1;
  res.counter_increments = 1;      // the Q-measurement implementation
  res.counter_zero_controls = 1;   // reading k = 0
  res.counter_dim = d;
  res.witness_qubits = int_log2(d) + base.witness_qubits();
  res.total_qubits = int_log2(d) + 1 + base.ancilla_qubits() +
                     base.witness_qubits();

  return AmplifiedVerifier(base, ConstructionTag::kC1, d, std::move(layout),
                           std::move(circuit), std::move(reject), {"R", "A"},
                           {"B", "W"}, res);
}

AmplifiedVerifier build_c2(const Verifier& base, Index counter_dim) {
  if (counter_dim < 2) throw DimensionError("build_c2: counter dim must be >= 2");
  const Index da = base.ancilla_dim();
  const Index dw = base.witness_dim();
  const Index d = counter_dim;
  SpaceLayout layout{{"B", d}, {"A", da}, {"W", dw}};

  // Increment mod D on B, controlled on M = |0> (the reject branch after V).
  const Matrix inc = inc_mod(CounterRegister(d)).mat();
  Matrix cinc = kron(inc, top_qubit_projector(da, 0)) +
                kron(Matrix::Identity(d, d), top_qubit_projector(da, 1));

  // R_0 = 2|0><0|_A - I_A, controlled on the counter being d >= 1.
  Matrix r0 = -Matrix::Identity(da, da);
  r0(0, 0) = 1.0;
  Matrix dge1 = Matrix::Identity(d, d);
  dge1(0, 0) = 0.0;
  Matrix d0 = Matrix::Identity(d, d) - dge1;
  Matrix cr0 = kron(dge1, r0) + kron(d0, Matrix::Identity(da, da));

  std::vector<EmbeddedOp> circuit;
  circuit.push_back({base.op(), {"A", "W"}});
  circuit.push_back({Operator::unitary(std::move(cinc)), {"B", "A"}});
  circuit.push_back({base.op().dagger(), {"A", "W"}});
  circuit.push_back({Operator::unitary(std::move(cr0)), {"B", "A"}});
  circuit.push_back({base.op(), {"A", "W"}});

  // Accept on M = 1; reject projector |0><0|_M.
  std::vector<EmbeddedOp> reject;
  reject.push_back(
      {Operator::projector(top_qubit_projector(da, 0)), {"A"}});

  ResourceCounts res;
  res.v_calls = 2;
  res.v_dagger_calls = 1;
  res.counter_increments = 1;
  res.counter_zero_controls = 1;  // the d >= 1 control on R_0
  res.counter_dim = d;
  res.witness_qubits = int_log2(d) + base.witness_qubits();
  res.total_qubits = int_log2(d) + base.ancilla_qubits() +
                     base.witness_qubits();

  return AmplifiedVerifier(base, ConstructionTag::kC2, d, std::move(layout),
                           std::move(circuit), std::move(reject), {"A"},
                           {"B", "W"}, res);
}

double rejection_closed_form(double p, const Vector& psi) {
  const Index n = psi.size();
  double sum = 0.0;
  for (Index d = 1; d <= n; ++d) {
    const Cplx prev = psi(d - 1);
    const Cplx cur = (d < n) ? psi(d) : Cplx(0.0, 0.0);
    sum += std::norm(prev * (1.0 - 2.0 * p) + 2.0 * p * cur);
  }
  return (1.0 - p) * sum;
}

double c1_post_measurement_q(double p) {
  const double num = p * p;
  return num / (num + (1.0 - p) * (1.0 - p));
}

double soundness_bound_c1(double s) {
  return 0.5 + 2.0 * std::sqrt(s * (1.0 - s));
}

double soundness_bound_c2(double s) {
  const double t = 1.0 - 4.0 * s;
  return 1.0 - (1.0 - s) * t * t;
}

EigenPair max_acceptance(const AmplifiedVerifier& av) {
  return top_eigenpair(av.accept_povm());
}

BlockStructureReport block_structure_check(const AmplifiedVerifier& av) {
  BlockStructureReport rep;
  const Operator pv = accept_povm(av.base());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(pv.mat());
  if (solver.info() != Eigen::Success)
    throw Error("block_structure_check: base eigensolver failed");
  const Index nw = pv.mat().rows();

  rep.min_eigengap = 2.0;
  for (Index i = 0; i + 1 < nw; ++i)
    rep.min_eigengap = std::min(
        rep.min_eigengap, solver.eigenvalues()(i + 1) - solver.eigenvalues()(i));
  rep.reliable = rep.min_eigengap > 1e-8;

  const Operator pvp = av.accept_povm();
  const Index d = av.counter_dim();
  // transform to {counter basis} (x) {eigenbasis of P_V}
  const Matrix e = solver.eigenvectors();
  Matrix t = Matrix::Zero(d * nw, d * nw);
  for (Index b = 0; b < d; ++b)
    t.block(b * nw, b * nw, nw, nw) = e;
  const Matrix m = t.adjoint() * pvp.mat() * t;

  rep.max_off_block_norm = 0.0;
  rep.block_top_eigenvalues.assign(static_cast<size_t>(nw), 0.0);
  for (Index k = 0; k < nw; ++k) {
    for (Index kp = 0; kp < nw; ++kp) {
      double frob2 = 0.0;
      Matrix block(d, d);
      for (Index b = 0; b < d; ++b)
        for (Index bp = 0; bp < d; ++bp) {
          const Cplx v = m(b * nw + k, bp * nw + kp);
          block(b, bp) = v;
          frob2 += std::norm(v);
        }
      if (k == kp) {
        Eigen::SelfAdjointEigenSolver<Matrix> bs(
            (block + block.adjoint()) / 2.0);
        rep.block_top_eigenvalues[static_cast<size_t>(k)] =
            bs.eigenvalues()(d - 1);
      } else {
        rep.max_off_block_norm =
            std::max(rep.max_off_block_norm, std::sqrt(frob2));
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> gs((m + m.adjoint()) / 2.0);
  rep.global_top = gs.eigenvalues()(d * nw - 1);
  return rep;
}

namespace {

void declare_qreg(CircuitDesc& c, const std::string& name, Index size) {
  c.registers.push_back({name, RegKind::kQubit, size});
}

Gate call_gate(const std::string& name, bool dagger,
               std::vector<std::string> args) {
  Gate g;
  g.kind = GateKind::kCall;
  g.call_name = name;
  g.call_dagger = dagger;
  g.call_args = std::move(args);
  return g;
}

}  // namespace

CircuitDesc c1_circuit_desc(Index ancilla_qubits, Index witness_qubits,
                            Index counter_dim) {
  CircuitDesc c;
  c.registers.push_back({"b", RegKind::kCounter, counter_dim});
  declare_qreg(c, "r", 1);
  declare_qreg(c, "a", ancilla_qubits);
  declare_qreg(c, "w", witness_qubits);
  c.gates.push_back(call_gate("V", false, {"a", "w"}));
  Gate cnot;
  cnot.kind = GateKind::kCnot;
  cnot.targets = {{"a", 0}, {"r", 0}};
  c.gates.push_back(std::move(cnot));
  c.gates.push_back(call_gate("V", true, {"a", "w"}));
  return c;
}

CircuitDesc c2_circuit_desc(Index ancilla_qubits, Index witness_qubits,
                            Index counter_dim) {
  CircuitDesc c;
  c.registers.push_back({"b", RegKind::kCounter, counter_dim});
  declare_qreg(c, "a", ancilla_qubits);
  declare_qreg(c, "w", witness_qubits);
  c.gates.push_back(call_gate("V", false, {"a", "w"}));
  Gate inc;
  inc.kind = GateKind::kIncMod;
  inc.counter = "b";
  inc.controls.push_back({false, "a", 0, 0});  // open control on M
  c.gates.push_back(std::move(inc));
  c.gates.push_back(call_gate("V", true, {"a", "w"}));
  Gate refl;
  refl.kind = GateKind::kReflect0;
  for (Index i = 0; i < ancilla_qubits; ++i) refl.targets.push_back({"a", i});
  refl.controls.push_back({true, "b", 0, 1});  // counter control d >= 1
  c.gates.push_back(std::move(refl));
  c.gates.push_back(call_gate("V", false, {"a", "w"}));
  return c;
}

}  // namespace qvlab
