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

#include <doctest.h>

using namespace qvlab;

namespace {

// V = X on the ancilla qubit: accepts every witness.
Verifier always_accept(Index witness_qubits = 1) {
  const Index nw = Index(1) << witness_qubits;
  Matrix v = Matrix::Zero(2 * nw, 2 * nw);
  v.topRightCorner(nw, nw) = Matrix::Identity(nw, nw);
  v.bottomLeftCorner(nw, nw) = Matrix::Identity(nw, nw);
  return Verifier(Operator::unitary(std::move(v)), 1, witness_qubits, 1.0,
                  0.5);
}

// V = I: the ancilla stays |0>, never accepts.
Verifier always_reject(Index witness_qubits = 1) {
  const Index n = Index(2) << witness_qubits;
  return Verifier(Operator::identity(n), 1, witness_qubits, 0.5, 0.1);
}

}  // namespace

TEST_CASE("accept_povm of the identity verifier is zero") {
  const Operator p = accept_povm(always_reject());
  CHECK(p.mat().norm() == 0.0);
}

TEST_CASE("accept_povm of the ancilla-flip verifier is the identity") {
  const Operator p = accept_povm(always_accept(2));
  CHECK((p.mat() - Matrix::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("p_accept agrees with the POVM expectation on random witnesses") {
  Rng rng(42);
  const Verifier v = haar_verifier(rng, 2, 2, 2.0 / 3.0, 1.0 / 3.0);
  const Operator pv = accept_povm(v);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Vector w = rng.random_state(4);
    const double via_povm = std::real(w.dot(pv.mat() * w));
    const double via_sim = p_accept(v, StateVector(w));
    worst = std::max(worst, std::abs(via_povm - via_sim));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("POVM spectrum lies in [0,1] for random verifiers") {
  Rng rng(7);
  for (int t = 0; t < 25; ++t) {
    const Verifier v = haar_verifier(rng, 1 + t % 2, 1 + t % 3 % 2 + 1, 0.9,
                                     0.1);
    const Operator pv = accept_povm(v);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pv.mat());
    CHECK(es.eigenvalues()(0) >= -1e-10);
    CHECK(es.eigenvalues()(es.eigenvalues().size() - 1) <= 1.0 + 1e-10);
  }
}

TEST_CASE("p_accept endpoints") {
  Vector w(2);
  w << 1, 0;
  CHECK(p_accept(always_reject(), StateVector(w)) == doctest::Approx(0.0));
  CHECK(p_accept(always_accept(), StateVector(w)) == doctest::Approx(1.0));
}

TEST_CASE("rewinding basis satisfies the two-row relations") {
  Rng rng(99);
  const Verifier v = haar_verifier(rng, 2, 2, 2.0 / 3.0, 1.0 / 3.0);
  const EigenPair top = optimal_witness(v);
  const RewindingBasis rb = rewinding_basis(v, top.vector);
  const double p = rb.p;
  REQUIRE(rb.w1.has_value());
  REQUIRE(rb.s0.has_value());
  REQUIRE(rb.s1.has_value());

  const Vector vw0 = v.op().mat() * rb.w0.amplitudes;
  const Vector vw1 = v.op().mat() * rb.w1->amplitudes;
  CHECK((vw0 - std::sqrt(1 - p) * rb.s0->amplitudes -
         std::sqrt(p) * rb.s1->amplitudes)
            .norm() <= 1e-9);
  CHECK((vw1 - std::sqrt(p) * rb.s0->amplitudes +
         std::sqrt(1 - p) * rb.s1->amplitudes)
            .norm() <= 1e-9);
  // Pi_0 w1 = 0 and orthogonality
  CHECK(rb.w1->amplitudes.head(v.witness_dim()).norm() <= 1e-9);
  CHECK(std::abs(rb.w0.amplitudes.dot(rb.w1->amplitudes)) <= 1e-9);
  // s0 lives on M=0, s1 on M=1
  CHECK(rb.s0->amplitudes.tail(v.total_dim() / 2).norm() <= 1e-9);
  CHECK(rb.s1->amplitudes.head(v.total_dim() / 2).norm() <= 1e-9);
}

TEST_CASE("rewinding block matrix matches the closed 2x2 form") {
  Rng rng(123);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Verifier v = haar_verifier(rng, 1 + (t % 2), 1 + (t % 2), 0.9, 0.1);
    const EigenPair top = optimal_witness(v);
    if (top.value < 1e-9 || top.value > 1 - 1e-9) continue;
    const RewindingBasis rb = rewinding_basis(v, top.vector);
    const double p = rb.p;
    const Vector vw0 = v.op().mat() * rb.w0.amplitudes;
    const Vector vw1 = v.op().mat() * rb.w1->amplitudes;
    worst = std::max({worst,
                      std::abs(rb.s0->amplitudes.dot(vw0) - std::sqrt(1 - p)),
                      std::abs(rb.s0->amplitudes.dot(vw1) - std::sqrt(p)),
                      std::abs(rb.s1->amplitudes.dot(vw0) - std::sqrt(p)),
                      std::abs(rb.s1->amplitudes.dot(vw1) + std::sqrt(1 - p))});
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("rewinding degenerates cleanly at p = 1") {
  const Verifier v = always_accept();
  Vector w(2);
  w << 1, 0;
  const RewindingBasis rb = rewinding_basis(v, StateVector(w));
  CHECK(rb.p == doctest::Approx(1.0));
  CHECK(!rb.w1.has_value());
  CHECK(!rb.s0.has_value());
  REQUIRE(rb.s1.has_value());
  const Vector vw0 = v.op().mat() * rb.w0.amplitudes;
  CHECK((vw0 - rb.s1->amplitudes).norm() <= 1e-12);
}

TEST_CASE("rewinding rejects non-eigenvectors") {
  Rng rng(5);
  const Verifier v = haar_verifier(rng, 2, 2, 0.9, 0.1);
  const Vector w = rng.random_state(4);
  CHECK_THROWS_AS(rewinding_basis(v, StateVector(w)), Error);
}

TEST_CASE("controlled gate removal bound endpoints and random pairs") {
  CHECK(controlled_gate_removal_bound(0.0) == 0.0);
  CHECK(controlled_gate_removal_bound(0.5) == doctest::Approx(1.0));
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Index dim = 4;
    const double p = rng.uniform();
    Vector psi(2 * dim);
    psi.head(dim) = std::sqrt(1 - p) * rng.random_state(dim);
    psi.tail(dim) = std::sqrt(p) * rng.random_state(dim);
    const Matrix u = rng.haar_unitary(dim);
    Vector phi = psi;
    phi.tail(dim) = u * psi.tail(dim);
    const double tdist =
        std::sqrt(std::max(0.0, 1.0 - std::norm(phi.dot(psi))));
    CHECK(tdist <= controlled_gate_removal_bound(p) + 1e-12);
  }
}

TEST_CASE("center_gap maps (2/3, 1/3) to annotations centered on 1/4") {
  Rng rng(31);
  const Verifier v = haar_verifier(rng, 1, 2, 2.0 / 3.0, 1.0 / 3.0);
  const Verifier c = center_gap(v);
  CHECK(c.completeness() == doctest::Approx(1.0 / 3.0));
  CHECK(c.soundness() == doctest::Approx(1.0 / 6.0));
  CHECK(c.ancilla_qubits() == v.ancilla_qubits() + 1);
  CHECK(c.witness_qubits() == v.witness_qubits());
}

TEST_CASE("center_gap acts affinely on the POVM spectrum") {
  Rng rng(77);
  const std::vector<double> eigs = {0.1, 0.9};
  const Verifier v = verifier_with_spectrum(rng, eigs, 2.0 / 3.0, 1.0 / 3.0);
  const Verifier c = center_gap(v);
  const Operator pc = accept_povm(c);
  Eigen::SelfAdjointEigenSolver<Matrix> es(pc.mat());
  // alpha = 4 for c + s = 1: spectrum halves
  CHECK(es.eigenvalues()(0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.45).epsilon(1e-9));
}

TEST_CASE("center_gap on already-centered annotations wraps trivially") {
  Rng rng(78);
  const Verifier v = haar_verifier(rng, 1, 1, 0.45, 0.05);
  const Verifier c = center_gap(v);
  CHECK(c.completeness() == doctest::Approx(0.45));
  CHECK(c.soundness() == doctest::Approx(0.05));
  // POVM unchanged: the coin always selects the V branch
  CHECK((accept_povm(c).mat() - accept_povm(v).mat()).norm() <= 1e-12);
}

TEST_CASE("center_gap of an always-accept verifier tops out at 1/4 + delta") {
  const Verifier v = always_accept();
  const Verifier c = center_gap(v);
  const double delta = (v.completeness() - v.soundness()) /
                       center_gap_stretch(v.completeness(), v.soundness());
  const EigenPair top = optimal_witness(c);
  CHECK(std::abs(top.value - (0.25 + delta)) <= 1e-9);
}

TEST_CASE("center_gap preserves the argmax witness") {
  Rng rng(80);
  const std::vector<double> eigs = {0.15, 0.35, 0.55, 0.75};
  const Verifier v = verifier_with_spectrum(rng, eigs, 2.0 / 3.0, 1.0 / 3.0);
  const Verifier c = center_gap(v);
  const EigenPair t0 = optimal_witness(v);
  const EigenPair t1 = optimal_witness(c);
  const double overlap = std::abs(t0.vector.amplitudes.dot(t1.vector.amplitudes));
  CHECK(overlap >= 1.0 - 1e-9);
}

TEST_CASE("verifier_with_spectrum realizes the requested spectrum") {
  Rng rng(55);
  const std::vector<double> eigs = {0.05, 0.2, 0.6, 0.95};
  const Verifier v = verifier_with_spectrum(rng, eigs, 2.0 / 3.0, 1.0 / 3.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(accept_povm(v).mat());
  std::vector<double> sorted = eigs;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i)
    CHECK(es.eigenvalues()(static_cast<Index>(i)) ==
          doctest::Approx(sorted[i]).epsilon(1e-10));
}
