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

#include "qvlab/amplifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qvlab/rng.hpp"

namespace qvlab {

namespace {

Index int_log2(Index n) {
  Index l = 0;
  while ((Index(1) << l) < n) ++l;
  return l;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TruncationParams derive_truncation(double c, double s, Index q) {
  if (!(c > s)) throw Error("derive_truncation: requires c > s");
  TruncationParams tp;
  tp.q = q;
  tp.delta = (c - s) / center_gap_stretch(c, s);
  const double g = std::abs(1.0 - 4.0 * tp.delta);

  Index d0 = 2;
  if (q > 0) {
    const double ratio = static_cast<double>(q) / (c - s);
    while (static_cast<double>(d0) < ratio) d0 <<= 1;
  }
  Index kappa = 1;
  while (true) {
    const Index d = kappa * d0;
    const double resid_log2 =
        (g <= 0.0) ? -std::numeric_limits<double>::infinity()
                   : static_cast<double>(d - 1) * std::log2(g);
    if (resid_log2 <= -static_cast<double>(q)) break;
    kappa <<= 1;
    if (kappa > (Index(1) << 40))
      throw Error("derive_truncation: bound unreachable");
  }
  tp.kappa = kappa;
  tp.d_levels = kappa * d0;
  tp.ell = 1;
  tp.m = int_log2(tp.d_levels);
  return tp;
}

std::pair<AmplifiedVerifier, AmplifierReport> amplify_new(
    const Verifier& base, Index q, const AmplifyOptions& opts) {
  const Verifier centered = center_gap(base);
  const TruncationParams tp =
      derive_truncation(base.completeness(), base.soundness(), q);
  AmplifiedVerifier av = build_c2(centered, tp.d_levels);

  AmplifierReport r;
  r.id = "new";
  r.c_in = base.completeness();
  r.s_in = base.soundness();
  r.l_m_in = base.witness_qubits();
  r.l_a_in = base.ancilla_qubits() + base.witness_qubits();
  r.t_a_in = opts.t_a_in;
  r.q = q;
  r.d_levels = tp.d_levels;
  r.c_bound = 1.0 - std::pow(2.0, -static_cast<double>(q));

  const EigenPair top = optimal_witness(centered);
  if (top.value > 0.25 + kResidualTol) {
    const GeometricWitness gw =
        geometric_witness(top.value, tp.d_levels, ConstructionTag::kC2);
    Vector wit(tp.d_levels * centered.witness_dim());
    for (Index b = 0; b < tp.d_levels; ++b)
      wit.segment(b * centered.witness_dim(), centered.witness_dim()) =
          gw.state.amplitudes(b) * top.vector.amplitudes;
    r.c_measured = av.acceptance(StateVector(std::move(wit)));
    r.c_resid_log2 =
        (gw.gamma == 0.0)
            ? -std::numeric_limits<double>::infinity()
            : static_cast<double>(tp.d_levels - 1) *
                  std::log2(std::abs(gw.gamma));
  } else {
    r.c_measured = -1.0;
    r.c_resid_log2 = 0.0;
  }

  if (av.witness_dim() <= opts.max_eigens_dim)
    r.s_measured = max_acceptance(av).value;
  r.s_bound = soundness_bound_c2(centered.soundness());

  r.l_m_out = av.resources().witness_qubits;
  r.l_a_out = av.resources().total_qubits;
  r.t_a_model = 3 * opts.t_a_in + 2 * int_log2(tp.d_levels) +
                centered.ancilla_qubits();
  r.v_calls = av.resources().v_calls;
  r.v_dagger_calls = av.resources().v_dagger_calls;
  return {std::move(av), std::move(r)};
}

Index encode_probability(double p, Index q_bits, bool round_up) {
  if (q_bits < 1 || q_bits > 62) throw Error("encode_probability: bad q_bits");
  const double scale = std::pow(2.0, static_cast<double>(q_bits));
  double k = round_up ? std::ceil(p * scale) : std::floor(p * scale);
  k = std::min(k, scale - 1.0);
  k = std::max(k, 0.0);
  return static_cast<Index>(k);
}

ProbTruncEvaluator::ProbTruncEvaluator(const Verifier& base)
    : base_(base),
      layout_{{"G", 2},
              {"A", base.ancilla_dim()},
              {"W", base.witness_dim()}} {
  const Index da = base.ancilla_dim();
  // Z on M (top qubit of A), controlled on G = |1>.
  Matrix zm = Matrix::Identity(da, da);
  for (Index i = da / 2; i < da; ++i) zm(i, i) = -1.0;
  Matrix p1(2, 2), p0(2, 2);
  p1 << 0, 0, 0, 1;
  p0 << 1, 0, 0, 0;
  Matrix cz = kron(p1, zm) + kron(p0, Matrix::Identity(da, da));

  std::vector<EmbeddedOp> ops;
  ops.push_back({base.op(), {"A", "W"}});
  ops.push_back({Operator::unitary(std::move(cz)), {"G", "A"}});
  ops.push_back({base.op().dagger(), {"A", "W"}});
  kernel_ = compose_circuit(ops, layout_);
}

namespace {

Matrix u_of_p(double p) {
  if (!(p >= 0.5))
    throw Error("probability truncation requires p >= 1/2");
  const double gamma = 1.0 / (2.0 * p);
  Matrix u(2, 2);
  const double sg = std::sqrt(gamma);
  const double cg = std::sqrt(1.0 - gamma);
  u << cg, sg, sg, -cg;
  return u;
}

}  // namespace

Matrix ProbTruncEvaluator::reject_matrix(double p) const {
  const Operator u = Operator::unitary(u_of_p(p));
  const Operator ud = u.dagger();
  const Index dw = base_.witness_dim();
  const Index n = layout_.total_dim();
  Matrix r(dw, dw);
  Vector v(n);
  for (Index k = 0; k < dw; ++k) {
    v.setZero();
    v(k) = 1.0;  // |0>_G |0>_A |e_k>
    apply_embedded(v, u, layout_, {"G"});
    v = kernel_ * v;
    apply_embedded(v, ud, layout_, {"G"});
    r.col(k) = v.head(dw);
  }
  return r;
}

double ProbTruncEvaluator::acceptance(double p, const Vector& witness) const {
  const Matrix r = reject_matrix(p);
  return 1.0 - (r * witness).squaredNorm();
}

double ProbTruncEvaluator::max_acceptance(double p) const {
  return 1.0 - min_rejection(p);
}

double ProbTruncEvaluator::min_rejection(double p) const {
  const Matrix r = reject_matrix(p);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r.adjoint() * r);
  return std::max(0.0, solver.eigenvalues()(0));
}

ProbTruncResult amplify_prob_trunc(const Verifier& base, Index q_bits,
                                   const AmplifyOptions& opts) {
  ProbTruncResult out;
  const ProbTruncEvaluator eval(base);
  const EigenPair top = optimal_witness(base);

  out.exact_p_acceptance =
      (top.value >= 0.5) ? eval.acceptance(top.value, top.vector.amplitudes)
                         : -1.0;

  const double scale = std::pow(2.0, static_cast<double>(q_bits));
  for (Index qb = 1; qb <= q_bits; ++qb) {
    if (top.value < 0.5) break;
    const double sc = std::pow(2.0, static_cast<double>(qb));
    const double p_down =
        static_cast<double>(encode_probability(top.value, qb, false)) / sc;
    const double p_up =
        static_cast<double>(encode_probability(top.value, qb, true)) / sc;
    ProbTruncSweepPoint down{qb, p_down,
                             p_down >= 0.5
                                 ? 1.0 - eval.acceptance(
                                             p_down, top.vector.amplitudes)
                                 : 1.0};
    ProbTruncSweepPoint up{
        qb, p_up,
        1.0 - eval.acceptance(std::max(0.5, p_up), top.vector.amplitudes)};
    out.sweep_down.push_back(down);
    out.sweep_up.push_back(up);
  }
  if (!out.sweep_down.empty()) {
    out.fitted_c = 0.0;
    for (const auto& pt : out.sweep_down)
      out.fitted_c = std::max(
          out.fitted_c,
          pt.completeness_error * std::pow(2.0, double(pt.q_bits)));
  }

  AmplifierReport& r = out.report;
  r.id = "prob-trunc";
  r.c_in = base.completeness();
  r.s_in = base.soundness();
  r.l_m_in = base.witness_qubits();
  r.l_a_in = base.ancilla_qubits() + base.witness_qubits();
  r.t_a_in = opts.t_a_in;
  r.q = q_bits;
  r.d_levels = 0;
  r.c_bound = 1.0 - 1.0 / scale;
  r.c_measured = out.sweep_down.empty()
                     ? -1.0
                     : 1.0 - out.sweep_down.back().completeness_error;
  r.c_resid_log2 = (out.fitted_c > 0.0)
                       ? std::log2(out.fitted_c) - double(q_bits)
                       : -std::numeric_limits<double>::infinity();
  r.s_bound = 4.0 * base.soundness() * (1.0 - base.soundness());
  r.s_measured = -1.0;
  r.l_m_out = base.witness_qubits() + q_bits;
  r.l_a_out = base.ancilla_qubits() + base.witness_qubits() + q_bits + 1;
  r.t_a_model = 2 * opts.t_a_in + q_bits + base.ancilla_qubits();
  r.v_calls = 1;
  r.v_dagger_calls = 1;

  // Materialize the block-diagonal verifier when the dense size allows.
  const Index grid = Index(1) << q_bits;
  const Index nb = 2 * base.ancilla_dim() * base.witness_dim();
  if (grid * nb <= 4096) {
    SpaceLayout layout{{"P", grid},
                       {"G", 2},
                       {"A", base.ancilla_dim()},
                       {"W", base.witness_dim()}};
    const Index n = grid * nb;
    Matrix op = Matrix::Identity(n, n);
    Matrix rej = Matrix::Zero(n, n);
    for (Index k = 0; k < grid; ++k) {
      const double p = static_cast<double>(k) / static_cast<double>(grid);
      if (p >= 0.5) {
        const Matrix u = u_of_p(p);
        const Matrix ug = kron(u, Matrix::Identity(nb / 2, nb / 2));
        op.block(k * nb, k * nb, nb, nb) = ug.adjoint() * eval.kernel() * ug;
        // reject = |0>_G |0>_A on this block
        for (Index iw = 0; iw < base.witness_dim(); ++iw)
          rej(k * nb + iw, k * nb + iw) = 1.0;
      } else {
        // p < 1/2: reject outright
        rej.block(k * nb, k * nb, nb, nb) = Matrix::Identity(nb, nb);
      }
    }
    std::vector<std::string> all = {"P", "G", "A", "W"};
    std::vector<EmbeddedOp> circuit;
    circuit.push_back({Operator::unitary(std::move(op)), all});
    std::vector<EmbeddedOp> reject;
    reject.push_back({Operator::projector(std::move(rej)), all});

    ResourceCounts res;
    res.v_calls = 1;
    res.v_dagger_calls = 1;
    res.counter_dim = 0;
    res.witness_qubits = q_bits + base.witness_qubits();
    res.total_qubits = q_bits + 1 + base.ancilla_qubits() +
                       base.witness_qubits();
    out.verifier = AmplifiedVerifier(
        base, ConstructionTag::kProbTrunc, 0, std::move(layout),
        std::move(circuit), std::move(reject), {"G", "A"}, {"P", "W"}, res);
  }
  return out;
}

namespace {

// true when 2^m covers the whole counter, so restriction is vacuous
bool truncation_is_trivial(const AmplifiedVerifier& av, Index m) {
  return (Index(1) << m) >= av.counter_dim();
}

void check_truncation_args(const AmplifiedVerifier& av, Index m, Index ell) {
  if (av.tag() != ConstructionTag::kC2)
    throw Error("witness_truncation_check expects a construction-2 verifier");
  const Index d = av.counter_dim();
  if ((d & (d - 1)) != 0)
    throw Error("witness_truncation_check: D must be a power of two");
  if (truncation_is_trivial(av, m)) return;
  if (d < (Index(1) << m) + ell)
    throw Error("witness_truncation_check: D < 2^m + ell");
  if (!(static_cast<double>(m) > std::log2(double(ell)) + 3.0))
    throw Error("witness_truncation_check: requires m > log2(ell) + 3");
}

// One surgery on a given witness: per-block interval removal followed by
// shift-packing into [0, 2^m - 1]; returns the acceptance drop. The circuit
// makes a single increment, so the accepted images of the run components
// live in disjoint counter slices and one run of the circuit yields all
// component acceptances.
double truncation_drop_on(const AmplifiedVerifier& av, Index m, Index ell,
                          const Vector& w) {
  const Index d = av.counter_dim();
  const Index nw = av.witness_dim() / d;
  if (truncation_is_trivial(av, m)) return 0.0;  // no restriction
  // restriction-free when the support already fits the window
  double outside = 0.0;
  for (Index lvl = Index(1) << m; lvl < d; ++lvl)
    outside += w.segment(lvl * nw, nw).squaredNorm();
  if (outside <= 1e-28) return 0.0;

  const Index nblk = Index(1) << (m - 3);
  const Index nblocks = d / nblk;
  const double p_full = av.accepted_state(w).squaredNorm();

  // remove the lightest ell-window of counter levels in each block
  std::vector<bool> kept(static_cast<size_t>(d), true);
  Vector wt = w;
  for (Index j = 0; j < nblocks; ++j) {
    const Index base_lvl = j * nblk;
    Index best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k + ell <= nblk; ++k) {
      double mass = 0.0;
      for (Index l = 0; l < ell; ++l)
        mass += wt.segment((base_lvl + k + l) * nw, nw).squaredNorm();
      if (mass < best - kStateTol) {
        best = mass;
        best_k = k;
      }
    }
    for (Index l = 0; l < ell; ++l) {
      const Index lvl = base_lvl + best_k + l;
      kept[static_cast<size_t>(lvl)] = false;
      wt.segment(lvl * nw, nw).setZero();
    }
  }
  wt.normalize();

  // maximal runs of kept levels
  struct Run {
    Index start = 0, len = 0;
    double mass = 0.0;
  };
  std::vector<Run> runs;
  for (Index lvl = 0; lvl < d; ++lvl) {
    if (!kept[static_cast<size_t>(lvl)]) continue;
    if (!runs.empty() && runs.back().start + runs.back().len == lvl) {
      runs.back().len += 1;
    } else {
      runs.push_back({lvl, 1, 0.0});
    }
    runs.back().mass += wt.segment(lvl * nw, nw).squaredNorm();
  }
  if (runs.size() < 2) throw Error("witness surgery produced a single run");

  // acceptances of the run components from one circuit run: the accepted
  // image of run i occupies counter levels [start_i, end_i + 1]
  const Vector acc = av.accepted_state(wt);
  const Index level_span = av.total_dim() / d;
  std::vector<double> xs(runs.size(), 0.0);
  for (size_t i = 0; i < runs.size(); ++i) {
    double mass = 0.0;
    const Index lo = runs[i].start;
    const Index hi = std::min(runs[i].start + runs[i].len, d - 1);
    for (Index lvl = lo; lvl <= hi; ++lvl)
      mass += acc.segment(lvl * level_span, level_span).squaredNorm();
    xs[i] = mass / runs[i].mass;
  }
  size_t istar = 1;
  for (size_t i = 2; i < runs.size(); ++i)
    if (xs[i] > xs[istar]) istar = i;

  // pack: run 0 in place, best later run shifted down past a gap of ell
  const Index run0_end = runs[0].start + runs[0].len - 1;
  const Index new_start = run0_end + ell + 1;
  const double alpha0 = runs[0].mass;

  Vector wp = Vector::Zero(d * nw);
  wp.segment(runs[0].start * nw, runs[0].len * nw) =
      wt.segment(runs[0].start * nw, runs[0].len * nw);
  wp.segment(new_start * nw, runs[istar].len * nw) =
      std::sqrt((1.0 - alpha0) / runs[istar].mass) *
      wt.segment(runs[istar].start * nw, runs[istar].len * nw);

  const Index support_end = new_start + runs[istar].len - 1;
  if (support_end >= (Index(1) << m))
    throw Error("witness surgery escaped the 2^m window");

  const double p_trunc = av.accepted_state(wp).squaredNorm();
  return p_full - p_trunc;
}

// Spread witness (uniform magnitudes, random phases) for the law sweep.
Vector spread_witness(Index dim, Rng& rng) {
  Vector w(dim);
  const double mag = 1.0 / std::sqrt(double(dim));
  for (Index i = 0; i < dim; ++i) {
    const double phi = 2.0 * M_PI * rng.uniform();
    w(i) = Cplx(mag * std::cos(phi), mag * std::sin(phi));
  }
  return w;
}

}  // namespace

double truncation_drop_for_witness(const AmplifiedVerifier& av, Index m,
                                   Index ell, const StateVector& witness) {
  check_truncation_args(av, m, ell);
  if (witness.dim() != av.witness_dim())
    throw DimensionError("truncation_drop_for_witness: dimension mismatch");
  return truncation_drop_on(av, m, ell, witness.amplitudes);
}

WitnessTruncationResult witness_truncation_check(const AmplifiedVerifier& av,
                                                 Index m, Index ell,
                                                 int trials,
                                                 std::uint64_t seed) {
  check_truncation_args(av, m, ell);
  WitnessTruncationResult result;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t));
    const Vector w = spread_witness(av.witness_dim(), rng);
    result.drops.push_back(truncation_drop_on(av, m, ell, w));
  }
  result.worst_drop =
      *std::max_element(result.drops.begin(), result.drops.end());
  result.fitted_k =
      result.worst_drop / std::sqrt(std::pow(2.0, -double(m)) * double(ell));
  return result;
}

TruncationLawSweep truncation_law_sweep(Index ancilla_qubits,
                                        Index witness_qubits, Index d,
                                        const std::vector<Index>& ms,
                                        Index ell, int trials,
                                        std::uint64_t seed) {
  TruncationLawSweep sweep;
  sweep.ms = ms;
  sweep.worst_drops.assign(ms.size(), 0.0);
  sweep.fitted_ks.assign(ms.size(), 0.0);

  for (int t = 0; t < trials; ++t) {
    Rng base_rng(seed + 0x1000 * static_cast<std::uint64_t>(t) + 1);
    const Verifier base =
        haar_verifier(base_rng, ancilla_qubits, witness_qubits, 2.0 / 3.0,
                      1.0 / 3.0);
    const AmplifiedVerifier av = build_c2(base, d);
    // same witness draw for every m: common random numbers
    Rng wit_rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t));
    const Vector w = spread_witness(av.witness_dim(), wit_rng);
    for (size_t mi = 0; mi < ms.size(); ++mi) {
      check_truncation_args(av, ms[mi], ell);
      const double drop = truncation_drop_on(av, ms[mi], ell, w);
      sweep.worst_drops[mi] = std::max(sweep.worst_drops[mi], drop);
    }
  }
  for (size_t mi = 0; mi < ms.size(); ++mi)
    sweep.fitted_ks[mi] =
        sweep.worst_drops[mi] /
        std::sqrt(std::pow(2.0, -double(ms[mi])) * double(ell));

  std::vector<double> xs(ms.size());
  for (size_t i = 0; i < ms.size(); ++i) xs[i] = double(ms[i]);
  sweep.slope = log_regression_slope(xs, sweep.worst_drops);
  return sweep;
}

double log_regression_slope(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("log_regression_slope: need matching samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

const char* kTable1Header =
    "schema_version,id,implemented,q,d_levels,one_minus_c_bound,c_measured,"
    "c_resid_log2,s_bound,s_measured,calls,t_a_model,l_m_out,l_a_out\n";

void table1_row(std::ostringstream& csv, nlohmann::ordered_json& rows,
                const AmplifierReport& r) {
  const double one_minus_c =
      (r.c_bound >= 0.0) ? 1.0 - r.c_bound : -1.0;
  const int calls = r.v_calls + r.v_dagger_calls;
  csv << "1," << r.id << "," << (r.implemented ? 1 : 0) << "," << r.q << ","
      << r.d_levels << "," << fmt(one_minus_c) << "," << fmt(r.c_measured)
      << "," << fmt(r.c_resid_log2) << "," << fmt(r.s_bound) << ","
      << fmt(r.s_measured) << "," << calls << "," << r.t_a_model << ","
      << r.l_m_out << "," << r.l_a_out << "\n";
  nlohmann::ordered_json row;
  row["id"] = r.id;
  row["implemented"] = r.implemented;
  row["q"] = r.q;
  row["d_levels"] = r.d_levels;
  row["one_minus_c_bound"] = one_minus_c;
  row["c_measured"] = r.c_measured;
  row["c_resid_log2"] = r.c_resid_log2;
  row["s_bound"] = r.s_bound;
  row["s_measured"] = r.s_measured;
  row["calls"] = calls;
  row["t_a_model"] = r.t_a_model;
  row["l_m_out"] = r.l_m_out;
  row["l_a_out"] = r.l_a_out;
  rows.push_back(std::move(row));
}

}  // namespace

Table1 table1_report(const std::vector<AmplifierReport>& reports) {
  std::ostringstream csv;
  csv << kTable1Header;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : reports) table1_row(csv, rows, r);

  if (!reports.empty()) {
    // reference row for the cited poly-call amplifier; formulas only
    const AmplifierReport& first = reports.front();
    AmplifierReport fk;
    fk.id = "fk16";
    fk.implemented = false;
    fk.c_in = first.c_in;
    fk.s_in = first.s_in;
    fk.q = first.q;
    const double gap = std::max(first.c_in - first.s_in, 1e-12);
    const Index calls =
        static_cast<Index>(std::ceil(static_cast<double>(first.q) / gap));
    fk.c_bound = 1.0 - std::pow(2.0, -double(first.q));
    fk.s_bound = std::pow(2.0, -double(first.q));
    fk.v_calls = static_cast<int>(calls);
    fk.v_dagger_calls = 0;
    fk.t_a_model = calls * first.t_a_in;
    fk.l_m_out = first.l_m_in;
    fk.l_a_out = first.l_a_in +
                 static_cast<Index>(std::ceil(std::log2(
                     std::max(2.0, static_cast<double>(first.q) / gap))));
    table1_row(csv, rows, fk);
  }

  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["rows"] = std::move(rows);
  return Table1{csv.str(), doc.dump(2) + "\n"};
}

}  // namespace qvlab
