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

#include "qvlab/counter.hpp"

#include <doctest.h>

#include "qvlab/rng.hpp"

using namespace qvlab;

TEST_CASE("inc_mod at D=2 is Pauli X") {
  const Operator inc = inc_mod(CounterRegister(2));
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  CHECK((inc.mat() - x).norm() == 0.0);
}

TEST_CASE("inc_mod wraps |D-1> to |0> and is a permutation") {
  const Index d = 5;
  const Operator inc = inc_mod(CounterRegister(d));
  Vector top = Vector::Zero(d);
  top(d - 1) = 1.0;
  const Vector wrapped = inc.apply(top);
  CHECK(std::abs(wrapped(0) - 1.0) == 0.0);
  for (Index r = 0; r < d; ++r) {
    int row_ones = 0, col_ones = 0;
    for (Index c = 0; c < d; ++c) {
      if (inc.mat()(r, c) == Cplx(1.0, 0.0)) ++row_ones;
      if (inc.mat()(c, r) == Cplx(1.0, 0.0)) ++col_ones;
      if (inc.mat()(r, c) != Cplx(0.0, 0.0))
        CHECK(inc.mat()(r, c) == Cplx(1.0, 0.0));
    }
    CHECK(row_ones == 1);
    CHECK(col_ones == 1);
  }
}

TEST_CASE("inc_mod to the D-th power is the identity") {
  const Index d = 6;
  const Operator inc = inc_mod(CounterRegister(d));
  Matrix acc = Matrix::Identity(d, d);
  for (Index k = 0; k < d; ++k) acc = inc.mat() * acc;
  CHECK((acc - Matrix::Identity(d, d)).norm() < 1e-14);
}

TEST_CASE("zero_check flips the target only on |0>_B") {
  const SpaceLayout layout{{"B", 4}, {"t", 2}};
  const Operator z = zero_check(CounterRegister(4), layout, "B", "t");
  // |0>_B |0> -> |0>_B |1>
  Vector in = Vector::Zero(8);
  in(0) = 1.0;
  Vector out = z.apply(in);
  CHECK(std::abs(out(1) - 1.0) == 0.0);
  // |3>_B |0> unchanged
  in.setZero();
  in(6) = 1.0;
  out = z.apply(in);
  CHECK(std::abs(out(6) - 1.0) == 0.0);
  // involution
  CHECK((z.mat() * z.mat() - Matrix::Identity(8, 8)).norm() < 1e-14);
}

TEST_CASE("geometric witness C2 at p=1 has gamma 1/2 and ratio-1/2 tail") {
  const GeometricWitness w = geometric_witness(1.0, 8, ConstructionTag::kC2);
  CHECK(w.gamma == doctest::Approx(0.5));
  for (Index i = 0; i + 2 < 8; ++i)
    CHECK(std::abs(w.state.amplitudes(i + 1) / w.state.amplitudes(i) - 0.5) <
          1e-12);
  CHECK(std::abs(w.state.amplitudes(7)) == 0.0);
  CHECK(w.state.is_normalized());
}

TEST_CASE("geometric witness C1 at p=1 collapses to |0>") {
  const GeometricWitness w = geometric_witness(1.0, 8, ConstructionTag::kC1);
  CHECK(w.gamma == 0.0);
  CHECK(std::abs(w.state.amplitudes(0) - 1.0) == 0.0);
  CHECK(w.state.amplitudes.tail(7).norm() == 0.0);
}

TEST_CASE("geometric witness overlap matches the infinite tail sum") {
  const Index d = 16;
  const GeometricWitness w = geometric_witness(0.4, d, ConstructionTag::kC2);
  CHECK(w.state.is_normalized());
  // direct inner product with the infinite state, tail in closed form
  const double g = w.gamma;
  const double inf_norm = std::sqrt(1.0 - g * g);
  double overlap = 0.0;
  for (Index i = 0; i + 1 < d; ++i)
    overlap += std::real(w.state.amplitudes(i)) * inf_norm * std::pow(g, i);
  CHECK(std::abs(overlap - w.overlap_with_infinite()) < 1e-12);
  CHECK(std::abs(w.overlap_with_infinite() -
                 std::sqrt(1.0 - std::pow(g * g, double(d - 1)))) < 1e-15);
  // trace distance relation for pure states
  CHECK(std::abs(std::sqrt(1.0 - overlap * overlap) -
                 w.distance_to_infinite()) < 1e-12);
}

TEST_CASE("geometric witness rejects out-of-range p") {
  CHECK_THROWS_AS(geometric_witness(0.5, 8, ConstructionTag::kC1), Error);
  CHECK_THROWS_AS(geometric_witness(0.25, 8, ConstructionTag::kC2), Error);
}

TEST_CASE("q_projector basics") {
  const Index d = 6;
  const Operator q = q_projector(d);
  // spanning vector |0>|1>
  Vector v01 = Vector::Zero(2 * d);
  v01(1) = 1.0;
  CHECK(std::abs(std::real(v01.dot(q.mat() * v01)) - 1.0) < 1e-14);
  // projector identities and rank
  CHECK((q.mat() * q.mat() - q.mat()).norm() < 1e-12);
  CHECK((q.mat() - q.mat().adjoint()).norm() < 1e-12);
  CHECK(std::abs(std::real(q.mat().trace()) - double(d)) < 1e-12);
}

TEST_CASE("q_projector spanning vectors are orthonormal") {
  const Index d = 5;
  std::vector<Vector> span;
  Vector v = Vector::Zero(2 * d);
  v(1) = 1.0;
  span.push_back(v);
  for (Index k = 0; k + 1 < d; ++k) {
    Vector phi = Vector::Zero(2 * d);
    phi(2 * k) = 1.0 / std::sqrt(2.0);
    phi(2 * (k + 1) + 1) = 1.0 / std::sqrt(2.0);
    span.push_back(phi);
  }
  for (size_t i = 0; i < span.size(); ++i)
    for (size_t j = 0; j < span.size(); ++j) {
      const double expect = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(std::abs(span[i].dot(span[j])) - expect) < 1e-14);
    }
}

TEST_CASE("q_projector equals its measurement circuit off the wrap state") {
  // circuit realization: increment on B (open control on R), H on R,
  // accept iff k = 0 or z = 0
  const Index d = 8;
  const SpaceLayout layout{{"B", d}, {"R", 2}};
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::sqrt(2.0);
  Matrix p0r = Matrix::Zero(2, 2);
  p0r(0, 0) = 1.0;
  const Operator cinc = controlled(inc_mod(CounterRegister(d)),
                                   Operator::projector(p0r), layout, "R",
                                   {"B"});
  const Operator hr = embed(Operator::unitary(h), layout, {"R"});
  const Matrix u = hr.mat() * cinc.mat();

  Matrix pacc = Matrix::Identity(2 * d, 2 * d);
  for (Index b = 1; b < d; ++b) pacc(2 * b + 1, 2 * b + 1) = 0.0;  // k>0, z=1
  const Matrix q_circ = u.adjoint() * pacc * u;

  const Matrix q = q_projector(d).mat();
  // difference is exactly the rank-one wrap artifact |D-1, 0><D-1, 0|
  Matrix wrap = Matrix::Zero(2 * d, 2 * d);
  wrap(2 * (d - 1), 2 * (d - 1)) = 1.0;
  CHECK((q_circ - q - wrap).norm() < 1e-12);
  // equality on states that never wrap (counter support <= D-2)
  Matrix pwf = Matrix::Identity(2 * d, 2 * d);
  pwf(2 * (d - 1), 2 * (d - 1)) = 0.0;
  pwf(2 * (d - 1) + 1, 2 * (d - 1) + 1) = 0.0;
  CHECK((pwf * (q_circ - q) * pwf).norm() < 1e-12);
}

TEST_CASE("remove_interval on a basis state keeps it intact") {
  const IntervalRemoval r = remove_interval(StateVector::basis(4, 0), 1);
  CHECK(r.k >= 1);  // smallest zero-mass window
  CHECK(r.k == 1);
  CHECK(std::abs(r.state.amplitudes(0) - 1.0) == 0.0);
  CHECK(r.fidelity == doctest::Approx(1.0));
}

TEST_CASE("remove_interval on the uniform state removes ell/D mass") {
  Vector u = Vector::Constant(8, 1.0 / std::sqrt(8.0));
  const IntervalRemoval r = remove_interval(StateVector(u), 2);
  CHECK(r.k == 0);  // all windows tie; smallest k wins
  CHECK(r.removed_mass == doctest::Approx(0.25));
  CHECK(r.fidelity == doctest::Approx(std::sqrt(0.75)));
  CHECK(r.fidelity >= std::sqrt(1.0 - 2.0 / 6.0) - 1e-12);
}

TEST_CASE("remove_interval matches brute force on random states") {
  Rng rng(1234);
  for (int t = 0; t < 200; ++t) {
    const Index d = 6 + static_cast<Index>(rng.uniform_int(27));
    const Index ell = 1 + static_cast<Index>(rng.uniform_int(
        static_cast<std::uint64_t>(std::min<Index>(4, d - 1))));
    const Vector psi = rng.random_state(d);
    const IntervalRemoval r = remove_interval(StateVector(psi), ell);
    CHECK(r.fidelity >=
          std::sqrt(1.0 - double(ell) / double(d - ell)) - 1e-12);
    // brute force over all windows
    double best = 2.0;
    Index best_k = 0;
    for (Index k = 0; k + ell <= d; ++k) {
      double mass = 0.0;
      for (Index l = 0; l < ell; ++l) mass += std::norm(psi(k + l));
      if (mass < best - 1e-12) {
        best = mass;
        best_k = k;
      }
    }
    CHECK(r.k == best_k);
    CHECK(std::abs(r.fidelity - std::sqrt(1.0 - best)) < 1e-9);
    // output carries exactly zero amplitude on the removed window
    for (Index l = 0; l < ell; ++l)
      CHECK(std::abs(r.state.amplitudes(r.k + l)) == 0.0);
  }
}
