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

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace qvlab {

StateVector StateVector::basis(Index dim, Index k) {
  Vector v = Vector::Zero(dim);
  v(k) = 1.0;
  return StateVector(std::move(v));
}

namespace {

double unitarity_defect(const Matrix& m) {
  return (m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())).norm();
}

void validate_flags(const Matrix& m, const OperatorFlags& f) {
  if (f.unitary) {
    if (m.rows() != m.cols())
      throw FlagError("unitary operator must be square");
    if (unitarity_defect(m) > kFlagTol)
      throw FlagError("unitary flag violated: ||M^dag M - I|| > tol");
  }
  if (f.hermitian || f.projector) {
    if (m.rows() != m.cols())
      throw FlagError("hermitian operator must be square");
    if ((m - m.adjoint()).norm() > kFlagTol)
      throw FlagError("hermitian flag violated: ||M - M^dag|| > tol");
  }
  if (f.projector) {
    if ((m * m - m).norm() > kFlagTol)
      throw FlagError("projector flag violated: ||M^2 - M|| > tol");
  }
  if (f.isometry) {
    if (m.rows() < m.cols())
      throw FlagError("isometry needs dim_out >= dim_in");
    if (unitarity_defect(m) > kFlagTol)
      throw FlagError("isometry flag violated: ||M^dag M - I|| > tol");
  }
}

}  // namespace

Operator Operator::general(Matrix m) { return Operator(std::move(m), {}); }

Operator Operator::unitary(Matrix m) {
  OperatorFlags f;
  f.unitary = true;
  f.isometry = true;
  return make(std::move(m), f);
}

Operator Operator::hermitian(Matrix m) {
  OperatorFlags f;
  f.hermitian = true;
  return make(std::move(m), f);
}

Operator Operator::projector(Matrix m) {
  OperatorFlags f;
  f.hermitian = true;
  f.projector = true;
  return make(std::move(m), f);
}

Operator Operator::isometry(Matrix m) {
  OperatorFlags f;
  f.isometry = true;
  return make(std::move(m), f);
}

Operator Operator::make(Matrix m, OperatorFlags flags) {
  validate_flags(m, flags);
  return Operator(std::move(m), flags);
}

Operator Operator::identity(Index dim) {
  OperatorFlags f;
  f.unitary = true;
  f.hermitian = true;
  f.projector = true;
  f.isometry = true;
  return Operator(Matrix::Identity(dim, dim), f);
}

Operator Operator::dagger() const {
  OperatorFlags f;
  f.unitary = flags_.unitary;
  f.hermitian = flags_.hermitian;
  f.projector = flags_.projector;
  // The adjoint of a proper isometry is a coisometry; don't claim the flag.
  f.isometry = flags_.unitary;
  return Operator(m_.adjoint(), f);
}

Operator Operator::operator*(const Operator& rhs) const {
  if (m_.cols() != rhs.m_.rows())
    throw DimensionError("operator product dimension mismatch");
  OperatorFlags f;
  f.unitary = flags_.unitary && rhs.flags_.unitary;
  f.isometry = (flags_.isometry && rhs.flags_.isometry) || f.unitary;
  return Operator(m_ * rhs.m_, f);
}

Vector Operator::apply(const Vector& v) const {
  if (v.size() != m_.cols())
    throw DimensionError("operator apply dimension mismatch");
  return m_ * v;
}

SpaceLayout::SpaceLayout(std::initializer_list<Reg> regs)
    : SpaceLayout(std::vector<Reg>(regs)) {}

SpaceLayout::SpaceLayout(std::vector<Reg> regs) : regs_(std::move(regs)) {
  std::unordered_set<std::string> seen;
  total_dim_ = 1;
  for (const auto& r : regs_) {
    if (r.dim < 1) throw DimensionError("register dimension must be >= 1");
    if (!seen.insert(r.name).second)
      throw Error("duplicate register name: " + r.name);
    total_dim_ *= r.dim;
  }
}

bool SpaceLayout::has(const std::string& name) const {
  for (const auto& r : regs_)
    if (r.name == name) return true;
  return false;
}

Index SpaceLayout::position(const std::string& name) const {
  for (Index i = 0; i < size(); ++i)
    if (regs_[static_cast<size_t>(i)].name == name) return i;
  throw Error("unknown register: " + name);
}

Index SpaceLayout::dim_of(const std::string& name) const {
  return regs_[static_cast<size_t>(position(name))].dim;
}

Operator tensor(std::span<const Operator> ops) {
  if (ops.empty()) throw Error("tensor of empty list");
  Matrix acc = ops[0].mat();
  OperatorFlags f = ops[0].flags();
  for (size_t i = 1; i < ops.size(); ++i) {
    const Matrix& b = ops[i].mat();
    Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Index r = 0; r < acc.rows(); ++r)
      for (Index c = 0; c < acc.cols(); ++c)
        next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) =
            acc(r, c) * b;
    acc = std::move(next);
    const OperatorFlags& g = ops[i].flags();
    f.unitary = f.unitary && g.unitary;
    f.hermitian = f.hermitian && g.hermitian;
    f.projector = f.projector && g.projector;
    f.isometry = f.isometry && g.isometry;
  }
  return Operator::make(std::move(acc), f);
}

Operator tensor(std::initializer_list<Operator> ops) {
  return tensor(std::span<const Operator>(ops.begin(), ops.size()));
}

namespace {

// Index bookkeeping for embedding: strides of every factor in the full
// space, target factors in caller order, and the enumeration of the
// non-target ("rest") factors.
struct EmbedPlan {
  std::vector<Index> tgt_pos;      // layout positions of targets
  std::vector<Index> tgt_dim;
  std::vector<Index> tgt_stride;   // full-space strides of targets
  std::vector<Index> rest_dim;
  std::vector<Index> rest_stride;
  Index tgt_total = 1;
  Index rest_total = 1;
};

EmbedPlan make_plan(const SpaceLayout& layout,
                    const std::vector<std::string>& targets) {
  const auto& regs = layout.regs();
  std::vector<Index> strides(regs.size());
  Index s = 1;
  for (Index i = layout.size() - 1; i >= 0; --i) {
    strides[static_cast<size_t>(i)] = s;
    s *= regs[static_cast<size_t>(i)].dim;
  }

  EmbedPlan plan;
  std::unordered_set<std::string> tset;
  for (const auto& t : targets) {
    if (!tset.insert(t).second) throw Error("duplicate target register: " + t);
    const Index p = layout.position(t);
    plan.tgt_pos.push_back(p);
    plan.tgt_dim.push_back(regs[static_cast<size_t>(p)].dim);
    plan.tgt_stride.push_back(strides[static_cast<size_t>(p)]);
    plan.tgt_total *= regs[static_cast<size_t>(p)].dim;
  }
  for (Index i = 0; i < layout.size(); ++i) {
    if (tset.count(regs[static_cast<size_t>(i)].name)) continue;
    plan.rest_dim.push_back(regs[static_cast<size_t>(i)].dim);
    plan.rest_stride.push_back(strides[static_cast<size_t>(i)]);
    plan.rest_total *= regs[static_cast<size_t>(i)].dim;
  }
  return plan;
}

// Offset of the k-th point of a mixed-radix enumeration with given dims and
// full-space strides.
Index mixed_radix_offset(Index k, const std::vector<Index>& dims,
                         const std::vector<Index>& strides) {
  Index off = 0;
  for (Index i = static_cast<Index>(dims.size()) - 1; i >= 0; --i) {
    const Index d = dims[static_cast<size_t>(i)];
    off += (k % d) * strides[static_cast<size_t>(i)];
    k /= d;
  }
  return off;
}

}  // namespace

Operator embed(const Operator& op, const SpaceLayout& layout,
               const std::vector<std::string>& targets) {
  const EmbedPlan plan = make_plan(layout, targets);
  if (op.dim_in() != plan.tgt_total || op.dim_out() != plan.tgt_total)
    throw DimensionError("embed: operator dimension does not match targets");

  const Index n = layout.total_dim();
  Matrix out = Matrix::Zero(n, n);
  std::vector<Index> tgt_off(static_cast<size_t>(plan.tgt_total));
  for (Index t = 0; t < plan.tgt_total; ++t)
    tgt_off[static_cast<size_t>(t)] =
        mixed_radix_offset(t, plan.tgt_dim, plan.tgt_stride);

  for (Index r = 0; r < plan.rest_total; ++r) {
    const Index base = mixed_radix_offset(r, plan.rest_dim, plan.rest_stride);
    for (Index ti = 0; ti < plan.tgt_total; ++ti)
      for (Index to = 0; to < plan.tgt_total; ++to) {
        const Cplx v = op.mat()(to, ti);
        if (v != Cplx(0.0, 0.0))
          out(base + tgt_off[static_cast<size_t>(to)],
              base + tgt_off[static_cast<size_t>(ti)]) = v;
      }
  }
  OperatorFlags f = op.flags();
  f.isometry = f.unitary;  // embedding keeps square structure
  return Operator::make(std::move(out), f);
}

Operator controlled(const Operator& op, const Operator& control_projector,
                    const SpaceLayout& layout, const std::string& control_reg,
                    const std::vector<std::string>& targets) {
  if (!control_projector.flags().projector)
    throw FlagError("controlled: control operator must be a projector");
  if (!op.flags().unitary)
    throw FlagError("controlled: target operator must be unitary");
  for (const auto& t : targets)
    if (t == control_reg) throw Error("controlled: control overlaps targets");

  const Operator p_full = embed(control_projector, layout, {control_reg});
  const Operator u_full = embed(op, layout, targets);
  const Index n = layout.total_dim();
  // P U + (I - P); P and U commute since they act on disjoint factors.
  Matrix m = p_full.mat() * u_full.mat() + Matrix::Identity(n, n) -
             p_full.mat();
  return Operator::unitary(std::move(m));
}

namespace {

// abs-amplitude lexicographic comparison with a small tolerance.
bool abs_lex_less(const Vector& a, const Vector& b) {
  for (Index i = 0; i < a.size(); ++i) {
    const double da = std::abs(a(i));
    const double db = std::abs(b(i));
    if (std::abs(da - db) > kStateTol) return da < db;
  }
  return false;
}

void fix_phase(Vector& v) {
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > kStateTol) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

}  // namespace

EigenPair top_eigenpair(const Operator& op) {
  const Matrix& m = op.mat();
  if (m.rows() != m.cols() || (m - m.adjoint()).norm() > kFlagTol)
    throw FlagError("top_eigenpair: operator is not hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw Error("top_eigenpair: eigensolver failed");

  const auto& vals = solver.eigenvalues();
  const Index n = m.rows();
  const double top = vals(n - 1);

  Index best = n - 1;
  for (Index i = n - 1; i >= 0; --i) {
    if (top - vals(i) > kStateTol) break;
    if (i != best && abs_lex_less(solver.eigenvectors().col(best),
                                  solver.eigenvectors().col(i)))
      best = i;
  }
  Vector v = solver.eigenvectors().col(best);
  fix_phase(v);
  return EigenPair{vals(best), StateVector(std::move(v))};
}

void apply_embedded(Vector& state, const Operator& op,
                    const SpaceLayout& layout,
                    const std::vector<std::string>& targets) {
  const EmbedPlan plan = make_plan(layout, targets);
  if (op.dim_in() != plan.tgt_total || op.dim_out() != plan.tgt_total)
    throw DimensionError("apply_embedded: operator/target dim mismatch");
  if (state.size() != layout.total_dim())
    throw DimensionError("apply_embedded: state/layout dim mismatch");

  std::vector<Index> tgt_off(static_cast<size_t>(plan.tgt_total));
  for (Index t = 0; t < plan.tgt_total; ++t)
    tgt_off[static_cast<size_t>(t)] =
        mixed_radix_offset(t, plan.tgt_dim, plan.tgt_stride);

  Vector sub(plan.tgt_total);
  for (Index r = 0; r < plan.rest_total; ++r) {
    const Index base = mixed_radix_offset(r, plan.rest_dim, plan.rest_stride);
    for (Index t = 0; t < plan.tgt_total; ++t)
      sub(t) = state(base + tgt_off[static_cast<size_t>(t)]);
    const Vector res = op.mat() * sub;
    for (Index t = 0; t < plan.tgt_total; ++t)
      state(base + tgt_off[static_cast<size_t>(t)]) = res(t);
  }
}

void apply_circuit(Vector& state, std::span<const EmbeddedOp> ops,
                   const SpaceLayout& layout) {
  for (const auto& g : ops) apply_embedded(state, g.op, layout, g.targets);
}

Matrix compose_circuit(std::span<const EmbeddedOp> ops,
                       const SpaceLayout& layout) {
  const Index n = layout.total_dim();
  Matrix out(n, n);
  Vector col(n);
  for (Index j = 0; j < n; ++j) {
    col.setZero();
    col(j) = 1.0;
    apply_circuit(col, ops, layout);
    out.col(j) = col;
  }
  return out;
}

}  // namespace qvlab
