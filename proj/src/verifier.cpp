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

#include "qvlab/verifier.hpp"

#include <cmath>

namespace qvlab {

namespace {

constexpr double kDegenerate = 1e-12;

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix ry(double theta) {
  Matrix m(2, 2);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  m << c, -s, s, c;
  return m;
}

}  // namespace

Verifier::Verifier(Operator v, Index ancilla_qubits, Index witness_qubits,
                   double c, double s)
    : v_(std::move(v)), a_(ancilla_qubits), w_(witness_qubits), c_(c), s_(s) {
  if (a_ < 1) throw DimensionError("verifier needs at least one ancilla qubit");
  if (w_ < 0) throw DimensionError("negative witness size");
  if (!v_.flags().unitary) throw FlagError("verifier operator must be unitary");
  if (v_.dim_in() != total_dim())
    throw DimensionError("verifier dimension does not match a + w qubits");
  if (!(c_ > s_)) throw Error("verifier annotations require c > s");
}

SpaceLayout Verifier::layout() const {
  return SpaceLayout{{"A", ancilla_dim()}, {"W", witness_dim()}};
}

Operator Verifier::accept_projector() const {
  const Index n = total_dim();
  const Index half = n / 2;  // M is the most significant qubit
  Matrix m = Matrix::Zero(n, n);
  for (Index i = half; i < n; ++i) m(i, i) = 1.0;
  return Operator::projector(std::move(m));
}

Operator Verifier::ancilla_zero_projector() const {
  const Index n = total_dim();
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < witness_dim(); ++i) m(i, i) = 1.0;
  return Operator::projector(std::move(m));
}

namespace {

// Columns Pi_acc V |0>_A |e_j>, j over the witness basis. P_V is the Gram
// matrix of these columns.
Matrix accepted_columns(const Verifier& v) {
  const Index nw = v.witness_dim();
  const Index n = v.total_dim();
  const Index half = n / 2;
  Matrix cols(n, nw);
  for (Index j = 0; j < nw; ++j) {
    Vector in = Vector::Zero(n);
    in(j) = 1.0;  // ancilla |0...0>, witness |e_j>
    Vector out = v.op().mat() * in;
    out.head(half).setZero();
    cols.col(j) = out;
  }
  return cols;
}

}  // namespace

Operator accept_povm(const Verifier& v) {
  const Matrix cols = accepted_columns(v);
  Matrix p = cols.adjoint() * cols;
  // Hermitian and PSD by construction; symmetrize away rounding noise.
  p = (p + p.adjoint()) / 2.0;
  OperatorFlags f;
  f.hermitian = true;
  return Operator::make(std::move(p), f);
}

double p_accept(const Verifier& v, const StateVector& w) {
  if (w.dim() != v.witness_dim())
    throw DimensionError("p_accept: witness dimension mismatch");
  const Index n = v.total_dim();
  Vector in = Vector::Zero(n);
  in.head(w.dim()) = w.amplitudes;
  const Vector out = v.op().mat() * in;
  return out.tail(n / 2).squaredNorm();
}

EigenPair optimal_witness(const Verifier& v) {
  return top_eigenpair(accept_povm(v));
}

RewindingBasis rewinding_basis(const Verifier& v, const StateVector& w) {
  if (w.dim() != v.witness_dim())
    throw DimensionError("rewinding_basis: witness dimension mismatch");
  if (!w.is_normalized(kResidualTol))
    throw Error("rewinding_basis: witness not normalized");

  const Operator pv = accept_povm(v);
  const Vector pw = pv.mat() * w.amplitudes;
  const double p = std::real(w.amplitudes.dot(pw));
  if ((pw - p * w.amplitudes).norm() > kResidualTol)
    throw Error("rewinding_basis: witness is not an eigenvector of P_V");

  const Index n = v.total_dim();
  const Index half = n / 2;

  RewindingBasis basis;
  basis.p = p;
  Vector w0 = Vector::Zero(n);
  w0.head(w.dim()) = w.amplitudes;
  basis.w0 = StateVector(w0);

  const Vector vw0 = v.op().mat() * w0;
  Vector acc = vw0;
  acc.head(half).setZero();  // Pi_acc V w0
  Vector rej = vw0 - acc;

  if (p > kDegenerate) {
    basis.s1 = StateVector(acc / std::sqrt(p));
  }
  if (p < 1.0 - kDegenerate) {
    basis.s0 = StateVector(rej / std::sqrt(1.0 - p));
  }
  if (p > kDegenerate && p < 1.0 - kDegenerate) {
    // |w1> = -(I - Pi_0) V^dag |s1> / sqrt(1-p)
    Vector vt = v.op().mat().adjoint() * basis.s1->amplitudes;
    vt.head(v.witness_dim()).setZero();  // (I - Pi_0)
    basis.w1 = StateVector(Vector(-vt / std::sqrt(1.0 - p)));
  }
  return basis;
}

double controlled_gate_removal_bound(double p) {
  if (p < 0.0 || p > 1.0)
    throw Error("controlled_gate_removal_bound: p outside [0,1]");
  return 2.0 * std::sqrt(p * (1.0 - p));
}

double center_gap_stretch(double c, double s) {
  return std::max({2.0, 4.0 * (c + s), (4.0 / 3.0) * (2.0 - c - s)});
}

Verifier center_gap(const Verifier& v) {
  const double c = v.completeness();
  const double s = v.soundness();
  const double alpha = center_gap_stretch(c, s);
  const double run_weight = 2.0 / alpha;              // probability of running V
  const double delta = (c - s) / alpha;               // new half-gap
  const double accept_bias = 0.25 - (c + s) / alpha;  // outright-accept mass
  // Accept probability in the coin-off branch.
  const double off_accept =
      (run_weight < 1.0) ? accept_bias / (1.0 - run_weight) : 0.0;

  const Index da = v.ancilla_dim();
  const Index dw = v.witness_dim();
  const SpaceLayout layout{{"A", da}, {"F", 2}, {"W", dw}};

  // Coin: F -> sqrt(1-run_weight)|0> + sqrt(run_weight)|1>.
  const double theta_sel =
      2.0 * std::atan2(std::sqrt(run_weight), std::sqrt(1.0 - run_weight));
  // Coin-off accept rotation on M (M is the top qubit of A).
  const double theta_acc =
      2.0 * std::atan2(std::sqrt(off_accept), std::sqrt(1.0 - off_accept));

  Matrix ry_on_m(2, 2);
  ry_on_m = ry(theta_acc);
  Operator ry_m_block = tensor(
      {Operator::unitary(ry_on_m), Operator::identity(da / 2)});

  const Operator proj1 = Operator::projector((Matrix(2, 2) << 0, 0, 0, 1).finished());
  const Operator proj0 = Operator::projector((Matrix(2, 2) << 1, 0, 0, 0).finished());

  std::vector<EmbeddedOp> circuit;
  circuit.push_back({embed(Operator::unitary(ry(theta_sel)), layout, {"F"}),
                     {"A", "F", "W"}});
  circuit.push_back(
      {controlled(v.op(), proj1, layout, "F", {"A", "W"}), {"A", "F", "W"}});
  circuit.push_back(
      {controlled(ry_m_block, proj0, layout, "F", {"A"}), {"A", "F", "W"}});

  Matrix composed = compose_circuit(circuit, layout);
  return Verifier(Operator::unitary(std::move(composed)),
                  v.ancilla_qubits() + 1, v.witness_qubits(), 0.25 + delta,
                  0.25 - delta);
}

Verifier haar_verifier(Rng& rng, Index ancilla_qubits, Index witness_qubits,
                       double c, double s) {
  const Index n = Index(1) << (ancilla_qubits + witness_qubits);
  return Verifier(Operator::unitary(rng.haar_unitary(n)), ancilla_qubits,
                  witness_qubits, c, s);
}

Verifier verifier_with_spectrum(Rng& rng, const std::vector<double>& eigs,
                                double c, double s) {
  const Index nw = static_cast<Index>(eigs.size());
  if (nw < 1 || (nw & (nw - 1)) != 0)
    throw DimensionError("spectrum size must be a power of two");
  Index wq = 0;
  while ((Index(1) << wq) < nw) ++wq;

  const Matrix basis = rng.haar_unitary(nw);  // witness eigenbasis
  const Index n = 2 * nw;                     // one ancilla qubit (M)
  Matrix v = Matrix::Zero(n, n);
  for (Index k = 0; k < nw; ++k) {
    const double p = eigs[static_cast<size_t>(k)];
    if (p < 0.0 || p > 1.0) throw Error("spectrum entries must lie in [0,1]");
    const double sp = std::sqrt(p);
    const double sq = std::sqrt(1.0 - p);
    Vector in0 = Vector::Zero(n), in1 = Vector::Zero(n);
    in0.head(nw) = basis.col(k);  // |0>_M |w_k>
    in1.tail(nw) = basis.col(k);  // |1>_M |w_k>
    Vector out0 = Vector::Zero(n), out1 = Vector::Zero(n);
    out0(k) = sq;        // sqrt(1-p)|0>|k>
    out0(nw + k) = sp;   // + sqrt(p)|1>|k>
    out1(k) = sp;        // sqrt(p)|0>|k>
    out1(nw + k) = -sq;  // - sqrt(1-p)|1>|k>
    v += out0 * in0.adjoint() + out1 * in1.adjoint();
  }
  // Scramble the output N register; leaves P_V (and the spectrum) unchanged.
  const Matrix un = rng.haar_unitary(nw);
  Matrix scramble = Matrix::Zero(n, n);
  scramble.topLeftCorner(nw, nw) = un;
  scramble.bottomRightCorner(nw, nw) = un;
  return Verifier(Operator::unitary(scramble * v), 1, wq, c, s);
}

}  // namespace qvlab
