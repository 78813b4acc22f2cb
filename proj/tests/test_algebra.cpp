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

#include "qvlab/algebra.hpp"

#include <doctest.h>

#include "qvlab/rng.hpp"
#include "qvlab/verifier.hpp"

using namespace qvlab;

namespace {

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix hadamard() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("tensor of identities is the identity") {
  const Operator i2 = Operator::identity(2);
  const Operator t = tensor({i2, i2});
  CHECK((t.mat() - Matrix::Identity(4, 4)).norm() == 0.0);
  CHECK(t.flags().unitary);
  CHECK(t.flags().projector);
}

TEST_CASE("tensor of X gates flips both qubits") {
  const Operator x = Operator::unitary(pauli_x());
  const Operator xx = tensor({x, x});
  Vector v00 = Vector::Zero(4);
  v00(0) = 1.0;
  const Vector v11 = xx.apply(v00);
  CHECK(std::abs(v11(3) - 1.0) < 1e-15);
  CHECK(v11.head(3).norm() < 1e-15);
}

TEST_CASE("tensor H (x) I has unit column norms") {
  const Operator t = tensor({Operator::unitary(hadamard()),
                             Operator::identity(2)});
  for (Index j = 0; j < 4; ++j) CHECK(t.mat().col(j).norm() ==
                                      doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed X on one factor acts locally") {
  const SpaceLayout layout{{"A", 2}, {"W", 2}};
  const Operator x = Operator::unitary(pauli_x());
  const Operator e = embed(x, layout, {"A"});
  Rng rng(7);
  const Vector psi = rng.random_state(2);
  Vector in = Vector::Zero(4);
  in.head(2) = psi;  // |0>_A (x) |psi>_W ... A is the slow factor
  // build |0>_A |psi>: index = a*2 + w
  in.setZero();
  in(0) = psi(0);
  in(1) = psi(1);
  const Vector out = e.apply(in);
  CHECK(std::abs(out(2) - psi(0)) < 1e-15);
  CHECK(std::abs(out(3) - psi(1)) < 1e-15);
}

TEST_CASE("embedding the identity is the identity") {
  const SpaceLayout layout{{"A", 3}, {"B", 4}};
  const Operator e = embed(Operator::identity(4), layout, {"B"});
  CHECK((e.mat() - Matrix::Identity(12, 12)).norm() == 0.0);
}

TEST_CASE("embed matches brute-force permutation for CNOT on qubits 1,3") {
  // 3-qubit layout; CNOT control q1 (slowest), target q3 (fastest)
  const SpaceLayout layout{{"q1", 2}, {"q2", 2}, {"q3", 2}};
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const Operator e = embed(Operator::unitary(cnot), layout, {"q1", "q3"});

  Matrix expected = Matrix::Zero(8, 8);
  for (Index b1 = 0; b1 < 2; ++b1)
    for (Index b2 = 0; b2 < 2; ++b2)
      for (Index b3 = 0; b3 < 2; ++b3) {
        const Index in = (b1 << 2) | (b2 << 1) | b3;
        const Index out = (b1 << 2) | (b2 << 1) | (b1 ? (1 - b3) : b3);
        expected(out, in) = 1.0;
      }
  CHECK((e.mat() - expected).norm() == 0.0);
}

TEST_CASE("embed on all registers reproduces the operator") {
  Rng rng(11);
  const SpaceLayout layout{{"X", 2}, {"Y", 3}};
  const Operator u = Operator::unitary(rng.haar_unitary(6));
  const Operator e = embed(u, layout, {"X", "Y"});
  CHECK((e.mat() - u.mat()).norm() < 1e-14);
}

TEST_CASE("controlled with identity projector applies unconditionally") {
  const SpaceLayout layout{{"C", 2}, {"T", 2}};
  const Operator x = Operator::unitary(pauli_x());
  const Operator c =
      controlled(x, Operator::projector(Matrix::Identity(2, 2)), layout, "C",
                 {"T"});
  CHECK((c.mat() - embed(x, layout, {"T"}).mat()).norm() < 1e-14);
}

TEST_CASE("controlled with zero projector is the identity") {
  const SpaceLayout layout{{"C", 2}, {"T", 2}};
  const Operator x = Operator::unitary(pauli_x());
  const Operator c = controlled(
      x, Operator::projector(Matrix::Zero(2, 2)), layout, "C", {"T"});
  CHECK((c.mat() - Matrix::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("C[X] with control |1><1| is the CNOT matrix") {
  const SpaceLayout layout{{"C", 2}, {"T", 2}};
  Matrix p1 = Matrix::Zero(2, 2);
  p1(1, 1) = 1.0;
  const Operator c = controlled(Operator::unitary(pauli_x()),
                                Operator::projector(p1), layout, "C", {"T"});
  Matrix cnot = Matrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  CHECK((c.mat() - cnot).norm() == 0.0);
}

TEST_CASE("top_eigenpair identity tie-break returns the first basis vector") {
  const EigenPair top = top_eigenpair(Operator::identity(4));
  CHECK(top.value == doctest::Approx(1.0));
  CHECK(std::abs(top.vector.amplitudes(0) - 1.0) < 1e-12);
  CHECK(top.vector.amplitudes.tail(3).norm() < 1e-12);
}

TEST_CASE("top_eigenpair of a diagonal matrix") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 0.2;
  d(1, 1) = 0.7;
  const EigenPair top = top_eigenpair(Operator::hermitian(d));
  CHECK(top.value == doctest::Approx(0.7));
  CHECK(std::abs(top.vector.amplitudes(1)) == doctest::Approx(1.0));
}

TEST_CASE("top_eigenpair rejects non-hermitian input") {
  Matrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(top_eigenpair(Operator::general(m)), FlagError);
}

TEST_CASE("top_eigenpair residual on random hermitian matrices") {
  Rng rng(21);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index dim = 2 + static_cast<Index>(rng.uniform_int(511));
    Matrix g(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian_complex();
    const Operator h = Operator::hermitian(((g + g.adjoint()) / 2.0).eval());
    const EigenPair top = top_eigenpair(h);
    worst = std::max(worst, (h.mat() * top.vector.amplitudes -
                             top.value * top.vector.amplitudes)
                                .norm());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("top eigenvalue matches a grid-seeded ascent oracle") {
  // independent maximization of <w|P_V|w>: random starts polished by
  // repeated application of the shifted operator
  Rng rng(33);
  const Verifier v = haar_verifier(rng, 2, 2, 2.0 / 3.0, 1.0 / 3.0);
  const Operator pv = accept_povm(v);
  const Index dim = pv.mat().rows();

  double best = 0.0;
  Vector best_v;
  for (int t = 0; t < 10000; ++t) {
    const Vector w = rng.random_state(dim);
    const double val = std::real(w.dot(pv.mat() * w));
    if (val > best) {
      best = val;
      best_v = w;
    }
  }
  Vector it = best_v;
  for (int k = 0; k < 200; ++k) {
    it = pv.mat() * it + 0.1 * it;
    it.normalize();
  }
  const double polished = std::real(it.dot(pv.mat() * it));
  const EigenPair top = top_eigenpair(pv);
  CHECK(polished <= top.value + 1e-12);
  CHECK(top.value - polished <= 1e-3);
}

TEST_CASE("unitary flag validation rejects non-unitary matrices") {
  Matrix m(2, 2);
  m << 1, 0, 0, 2;
  CHECK_THROWS_AS(Operator::unitary(m), FlagError);
  CHECK_THROWS_AS(Operator::projector(m), FlagError);
}

TEST_CASE("apply_embedded agrees with dense embedding") {
  Rng rng(5);
  const SpaceLayout layout{{"B", 3}, {"A", 2}, {"W", 4}};
  const Operator u = Operator::unitary(rng.haar_unitary(8));
  const Operator dense = embed(u, layout, {"A", "W"});
  const Vector state = rng.random_state(24);
  Vector fast = state;
  apply_embedded(fast, u, layout, {"A", "W"});
  CHECK((fast - dense.apply(state)).norm() < 1e-13);
}

TEST_CASE("apply_embedded handles non-adjacent reversed targets") {
  Rng rng(6);
  const SpaceLayout layout{{"X", 2}, {"Y", 3}, {"Z", 2}};
  const Operator u = Operator::unitary(rng.haar_unitary(4));
  const Operator dense = embed(u, layout, {"Z", "X"});
  const Vector state = rng.random_state(12);
  Vector fast = state;
  apply_embedded(fast, u, layout, {"Z", "X"});
  CHECK((fast - dense.apply(state)).norm() < 1e-13);
}

TEST_CASE("compose_circuit multiplies in program order") {
  Rng rng(9);
  const SpaceLayout layout{{"A", 2}, {"B", 2}};
  const Operator u1 = Operator::unitary(rng.haar_unitary(2));
  const Operator u2 = Operator::unitary(rng.haar_unitary(2));
  std::vector<EmbeddedOp> ops;
  ops.push_back({u1, {"A"}});
  ops.push_back({u2, {"B"}});
  const Matrix m = compose_circuit(ops, layout);
  const Matrix expected =
      embed(u2, layout, {"B"}).mat() * embed(u1, layout, {"A"}).mat();
  CHECK((m - expected).norm() < 1e-13);
}
