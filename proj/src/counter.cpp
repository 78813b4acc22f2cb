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

#include <cmath>

namespace qvlab {

Operator inc_mod(const CounterRegister& reg) {
  const Index d = reg.dim;
  Matrix m = Matrix::Zero(d, d);
  for (Index i = 0; i < d; ++i) m((i + 1) % d, i) = 1.0;
  return Operator::unitary(std::move(m));
}

Operator counter_zero_projector(Index dim) {
  Matrix m = Matrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  return Operator::projector(std::move(m));
}

Operator counter_nonzero_projector(Index dim) {
  Matrix m = Matrix::Identity(dim, dim);
  m(0, 0) = 0.0;
  return Operator::projector(std::move(m));
}

Operator zero_check(const CounterRegister& reg, const SpaceLayout& layout,
                    const std::string& counter_name,
                    const std::string& target_qubit) {
  if (layout.dim_of(counter_name) != reg.dim)
    throw DimensionError("zero_check: layout counter dim mismatch");
  if (layout.dim_of(target_qubit) != 2)
    throw DimensionError("zero_check: target must be a qubit");
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return controlled(Operator::unitary(std::move(x)),
                    counter_zero_projector(reg.dim), layout, counter_name,
                    {target_qubit});
}

GeometricWitness geometric_witness(double p, Index truncation,
                                   ConstructionTag tag) {
  if (truncation < 2)
    throw DimensionError("geometric witness needs truncation >= 2");
  double gamma;
  if (tag == ConstructionTag::kC1) {
    if (!(p > 0.5)) throw Error("C1 geometric witness requires p > 1/2");
    gamma = (1.0 - p) / p;
  } else if (tag == ConstructionTag::kC2) {
    if (!(p > 0.25)) throw Error("C2 geometric witness requires p > 1/4");
    gamma = 1.0 - 1.0 / (2.0 * p);
  } else {
    throw Error("geometric witness exists only for C1/C2");
  }

  const Index d = truncation;
  Vector amp = Vector::Zero(d);
  if (gamma == 0.0) {
    amp(0) = 1.0;
  } else {
    // norm factor sqrt((1-gamma^2)/(1-gamma^(2(D-1)))) over support 0..D-2
    const double g2 = gamma * gamma;
    const double norm =
        std::sqrt((1.0 - g2) / (1.0 - std::pow(g2, double(d - 1))));
    double cur = norm;
    for (Index i = 0; i + 1 < d; ++i) {
      amp(i) = cur;
      cur *= gamma;
    }
  }

  GeometricWitness w;
  w.gamma = gamma;
  w.truncation = d;
  w.tag = tag;
  w.state = StateVector(std::move(amp));
  return w;
}

double GeometricWitness::overlap_with_infinite() const {
  return std::sqrt(1.0 -
                   std::pow(gamma * gamma, double(truncation - 1)));
}

double GeometricWitness::distance_to_infinite() const {
  return std::pow(std::abs(gamma), double(truncation - 1));
}

Operator q_projector(Index dim) {
  if (dim < 2) throw DimensionError("q_projector needs D >= 2");
  const Index n = 2 * dim;  // B (x) R, R a qubit (R is the fast factor)
  Matrix q = Matrix::Zero(n, n);
  const auto idx = [dim](Index d, Index r) { return 2 * d + r; };

  Vector v = Vector::Zero(n);
  v(idx(0, 1)) = 1.0;
  q += v * v.adjoint();
  for (Index d = 0; d + 1 < dim; ++d) {
    v.setZero();
    v(idx(d, 0)) = 1.0 / std::sqrt(2.0);
    v(idx(d + 1, 1)) = 1.0 / std::sqrt(2.0);
    q += v * v.adjoint();
  }
  return Operator::projector(std::move(q));
}

IntervalRemoval remove_interval(const StateVector& psi, Index ell) {
  const Index d = psi.dim();
  if (ell <= 0 || ell >= d)
    throw DimensionError("remove_interval requires 0 < ell < D");

  Eigen::VectorXd mass(d);
  for (Index i = 0; i < d; ++i) mass(i) = std::norm(psi.amplitudes(i));

  Index best_k = 0;
  double best = -1.0;
  double window = 0.0;
  for (Index i = 0; i < ell; ++i) window += mass(i);
  for (Index k = 0; k + ell <= d; ++k) {
    if (k > 0) window += mass(k + ell - 1) - mass(k - 1);
    if (best < 0.0 || window < best - kStateTol) {
      best = window;
      best_k = k;
    }
  }

  IntervalRemoval out;
  out.k = best_k;
  out.removed_mass = std::max(0.0, best);
  Vector phi = psi.amplitudes;
  for (Index i = best_k; i < best_k + ell; ++i) phi(i) = 0.0;
  const double norm = phi.norm();
  if (norm <= 0.0) throw Error("remove_interval: projection annihilated state");
  phi /= norm;
  out.fidelity = std::abs(phi.dot(psi.amplitudes));
  out.state = StateVector(std::move(phi));
  return out;
}

}  // namespace qvlab
