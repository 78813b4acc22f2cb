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

#include "qvlab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qvlab/circuit_ir.hpp"

namespace qvlab {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Summary {
  std::vector<std::string> lines;
  std::string first_failure;
  bool ok = true;

  void check(const std::string& name, bool pass, const std::string& detail) {
    lines.push_back(std::string(pass ? "[PASS] " : "[FAIL] ") + name +
                    (detail.empty() ? "" : ": " + detail));
    if (!pass && ok) {
      ok = false;
      first_failure = name;
    }
  }
};

Index int_log2(Index n) {
  Index l = 0;
  while ((Index(1) << l) < n) ++l;
  return l;
}

Vector kron_witness(const Vector& counter_part, const Vector& w_part) {
  Vector out(counter_part.size() * w_part.size());
  for (Index b = 0; b < counter_part.size(); ++b)
    out.segment(b * w_part.size(), w_part.size()) =
        counter_part(b) * w_part;
  return out;
}

// Haar base whose maximal acceptance clears a floor; seeds advance until it
// does, so the pick is deterministic.
Verifier haar_base_with_pmax_at_least(std::uint64_t seed, Index a, Index w,
                                      double c, double s, double floor,
                                      double* pmax_out) {
  for (std::uint64_t k = 0; k < 512; ++k) {
    Rng rng(seed + k);
    Verifier v = haar_verifier(rng, a, w, c, s);
    const double pmax = optimal_witness(v).value;
    if (pmax >= floor) {
      if (pmax_out) *pmax_out = pmax;
      return v;
    }
  }
  throw Error("could not sample a base verifier above the acceptance floor");
}

Verifier spectrum_base(std::uint64_t seed, Index w, double lo, double hi,
                       double c, double s, double* pmax_out) {
  Rng rng(seed);
  std::vector<double> eigs(static_cast<size_t>(Index(1) << w));
  double pmax = 0.0;
  for (auto& e : eigs) {
    e = lo + (hi - lo) * rng.uniform();
    pmax = std::max(pmax, e);
  }
  if (pmax_out) *pmax_out = pmax;
  return verifier_with_spectrum(rng, eigs, c, s);
}

const char* kReportHeader =
    "schema_version,id,implemented,c_in,s_in,l_m_in,l_a_in,t_a_in,q,d_levels,"
    "c_bound,c_measured,c_resid_log2,s_bound,s_measured,l_m_out,l_a_out,"
    "t_a_model,calls_v,calls_vdag\n";

void report_csv_row(std::ostringstream& out, const AmplifierReport& r) {
  out << "1," << r.id << "," << (r.implemented ? 1 : 0) << "," << fmt(r.c_in)
      << "," << fmt(r.s_in) << "," << r.l_m_in << "," << r.l_a_in << ","
      << r.t_a_in << "," << r.q << "," << r.d_levels << "," << fmt(r.c_bound)
      << "," << fmt(r.c_measured) << "," << fmt(r.c_resid_log2) << ","
      << fmt(r.s_bound) << "," << fmt(r.s_measured) << "," << r.l_m_out << ","
      << r.l_a_out << "," << r.t_a_model << "," << r.v_calls << ","
      << r.v_dagger_calls << "\n";
}

ordered_json report_json(const AmplifierReport& r) {
  ordered_json j;
  j["id"] = r.id;
  j["implemented"] = r.implemented;
  j["c_in"] = r.c_in;
  j["s_in"] = r.s_in;
  j["l_m_in"] = r.l_m_in;
  j["l_a_in"] = r.l_a_in;
  j["t_a_in"] = r.t_a_in;
  j["q"] = r.q;
  j["d_levels"] = r.d_levels;
  j["c_bound"] = r.c_bound;
  j["c_measured"] = r.c_measured;
  j["c_resid_log2"] = r.c_resid_log2;
  j["s_bound"] = r.s_bound;
  j["s_measured"] = r.s_measured;
  j["l_m_out"] = r.l_m_out;
  j["l_a_out"] = r.l_a_out;
  j["t_a_model"] = r.t_a_model;
  j["calls_v"] = r.v_calls;
  j["calls_vdag"] = r.v_dagger_calls;
  return j;
}

ordered_json resources_json(const ResourceCounts& res) {
  ordered_json j;
  j["v_calls"] = res.v_calls;
  j["v_dagger_calls"] = res.v_dagger_calls;
  j["counter_increments"] = res.counter_increments;
  j["counter_zero_controls"] = res.counter_zero_controls;
  j["counter_dim"] = res.counter_dim;
  j["witness_qubits"] = res.witness_qubits;
  j["total_qubits"] = res.total_qubits;
  return j;
}

void suite_rewinding(const ExperimentConfig& cfg, Summary& sum) {
  Rng rng(cfg.seed ^ 0x7265770ULL);
  double max_residual = 0.0;
  double max_block_err = 0.0;
  int done = 0;
  for (int t = 0; t < cfg.rewinding_trials; ++t) {
    const Index a = 1 + static_cast<Index>(rng.uniform_int(2));
    const Index w = 1 + static_cast<Index>(rng.uniform_int(2));
    const Verifier v = haar_verifier(rng, a, w, cfg.c, cfg.s);
    const EigenPair top = optimal_witness(v);
    if (top.value < 1e-9 || top.value > 1.0 - 1e-9) continue;
    const RewindingBasis rb = rewinding_basis(v, top.vector);
    const double p = rb.p;
    const Vector vw0 = v.op().mat() * rb.w0.amplitudes;
    const Vector vw1 = v.op().mat() * rb.w1->amplitudes;
    const Vector& s0 = rb.s0->amplitudes;
    const Vector& s1 = rb.s1->amplitudes;
    max_residual = std::max(
        max_residual,
        (vw0 - std::sqrt(1 - p) * s0 - std::sqrt(p) * s1).norm());
    max_residual = std::max(
        max_residual,
        (vw1 - std::sqrt(p) * s0 + std::sqrt(1 - p) * s1).norm());
    // Pi_0 w1 = 0 and <w0|w1> = 0
    max_residual = std::max(
        max_residual, rb.w1->amplitudes.head(v.witness_dim()).norm());
    max_residual = std::max(
        max_residual, std::abs(rb.w0.amplitudes.dot(rb.w1->amplitudes)));
    // 2x2 block entries <s_i|V|w_j>
    const Cplx m00 = s0.dot(vw0), m01 = s0.dot(vw1);
    const Cplx m10 = s1.dot(vw0), m11 = s1.dot(vw1);
    max_block_err = std::max(
        {max_block_err, std::abs(m00 - Cplx(std::sqrt(1 - p))),
         std::abs(m01 - Cplx(std::sqrt(p))),
         std::abs(m10 - Cplx(std::sqrt(p))),
         std::abs(m11 - Cplx(-std::sqrt(1 - p)))});
    ++done;
  }
  sum.check("rewinding/lemma-relations", max_residual <= cfg.tol,
            "max residual " + fmt(max_residual) + " over " +
                std::to_string(done) + " verifiers");
  sum.check("rewinding/block-matrix", max_block_err <= cfg.tol,
            "max entry error " + fmt(max_block_err));

  // controlled-gate-removal bound on random (state, unitary) pairs
  Rng rng2(cfg.seed ^ 0x6c656dULL);
  double worst_slack = 1.0;
  for (int t = 0; t < cfg.lemma23_trials; ++t) {
    const Index k = 1 + static_cast<Index>(rng2.uniform_int(3));
    const Index dim = Index(1) << k;
    const double p = rng2.uniform();
    const Vector phi0 = rng2.random_state(dim);
    const Vector phi1 = rng2.random_state(dim);
    Vector psi(2 * dim);
    psi.head(dim) = std::sqrt(1 - p) * phi0;
    psi.tail(dim) = std::sqrt(p) * phi1;
    const Matrix u = rng2.haar_unitary(dim);
    Vector phi = psi;
    phi.tail(dim) = u * psi.tail(dim);
    const double overlap2 = std::norm(phi.dot(psi));
    const double tdist = std::sqrt(std::max(0.0, 1.0 - overlap2));
    worst_slack = std::min(
        worst_slack, controlled_gate_removal_bound(p) + 1e-12 - tdist);
  }
  sum.check("rewinding/controlled-gate-removal", worst_slack >= 0.0,
            "min bound slack " + fmt(worst_slack));
}

void suite_c1(const ExperimentConfig& cfg, Summary& sum,
              std::map<std::string, std::string>& artifacts) {
  // completeness of the truncated geometric witness across the D sweep
  double worst_margin = 1.0;
  double p1_err = 0.0;
  for (int b = 0; b < 3; ++b) {
    double pmax = 0.0;
    const Verifier base = haar_base_with_pmax_at_least(
        cfg.seed + 100 + static_cast<std::uint64_t>(b) * 7919, cfg.a, cfg.w,
        cfg.c, cfg.s, 0.5 + 1e-6, &pmax);
    const EigenPair top = optimal_witness(base);
    for (const Index d : cfg.d_sweep) {
      const AmplifiedVerifier av = build_c1(base, d);
      const GeometricWitness gw =
          geometric_witness(pmax, d, ConstructionTag::kC1);
      const double acc = av.acceptance(StateVector(
          kron_witness(gw.state.amplitudes, top.vector.amplitudes)));
      const double bound = 1.0 - gw.distance_to_infinite();
      worst_margin = std::min(worst_margin, acc - (bound - cfg.tol));
    }
  }
  sum.check("c1/completeness-geometric", worst_margin >= 0.0,
            "min margin " + fmt(worst_margin));

  {
    // always-accept base: X on the ancilla, acceptance exactly 1
    Matrix x(2, 2);
    x << 0, 1, 1, 0;
    Matrix v = Matrix::Zero(4, 4);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) v.block(2 * i, 2 * j, 2, 2) =
          x(i, j) * Matrix::Identity(2, 2);
    const Verifier base(Operator::unitary(std::move(v)), 1, 1, 1.0, 0.5);
    const AmplifiedVerifier av = build_c1(base, 8);
    const GeometricWitness gw = geometric_witness(1.0, 8, ConstructionTag::kC1);
    Vector w0(2);
    w0 << 1, 0;
    p1_err = std::abs(1.0 - av.acceptance(StateVector(kron_witness(
                                gw.state.amplitudes, w0))));
    sum.check("c1/always-accept-exact", p1_err <= 1e-12,
              "deviation " + fmt(p1_err));
  }

  // soundness against the closed-form bound on low-acceptance bases
  double worst_slack = 1.0;
  const int bases = std::min(cfg.soundness_bases, 20);
  for (int b = 0; b < bases; ++b) {
    double pmax = 0.0;
    const Verifier base =
        spectrum_base(cfg.seed + 500 + static_cast<std::uint64_t>(b), cfg.w,
                      0.0, 1.0 / 16.0, cfg.c, cfg.s, &pmax);
    const AmplifiedVerifier av = build_c1(base, 16);
    const double pmax_amp = max_acceptance(av).value;
    worst_slack = std::min(
        worst_slack, soundness_bound_c1(pmax) + cfg.tol - pmax_amp);
  }
  sum.check("c1/soundness-bound", worst_slack >= 0.0,
            "min slack " + fmt(worst_slack));

  // post-measurement R amplitude formula at p = 2/3 and p = 1/2
  const double q23 = c1_post_measurement_q(2.0 / 3.0);
  const double q12 = c1_post_measurement_q(0.5);
  sum.check("c1/q-given-p",
            std::abs(q23 - 0.8) <= 1e-15 && std::abs(q12 - 0.5) <= 1e-15,
            "q(2/3) = " + fmt(q23) + ", q(1/2) = " + fmt(q12));

  const CircuitDesc desc = c1_circuit_desc(cfg.a, cfg.w, 16);
  artifacts["construction1.qvc"] = serialize(desc);
  ordered_json j;
  j["schema_version"] = 1;
  j["construction"] = "c1";
  j["d_levels"] = 16;
  {
    double pmax = 0.0;
    const Verifier base = haar_base_with_pmax_at_least(
        cfg.seed + 100, cfg.a, cfg.w, cfg.c, cfg.s, 0.5 + 1e-6, &pmax);
    j["resources"] = resources_json(build_c1(base, 16).resources());
  }
  artifacts["construction1.json"] = j.dump(2) + "\n";
}

void suite_c2(const ExperimentConfig& cfg, Summary& sum,
              std::map<std::string, std::string>& artifacts) {
  // closed-form rejection versus full simulation (geometric and random
  // truncated witnesses)
  Rng rng(cfg.seed ^ 0xc2c2ULL);
  double worst_gap = 0.0;
  double worst_margin = 1.0;
  double worst_centered_margin = 1.0;
  for (int b = 0; b < 10; ++b) {
    double pmax = 0.0;
    const Verifier base = haar_base_with_pmax_at_least(
        cfg.seed + 900 + static_cast<std::uint64_t>(b) * 131, cfg.a, cfg.w,
        cfg.c, cfg.s, 0.30, &pmax);
    const EigenPair top = optimal_witness(base);
    for (const Index d : cfg.d_sweep) {
      const AmplifiedVerifier av = build_c2(base, d);
      const GeometricWitness gw =
          geometric_witness(pmax, d, ConstructionTag::kC2);
      const double acc = av.acceptance(StateVector(
          kron_witness(gw.state.amplitudes, top.vector.amplitudes)));
      const double closed = rejection_closed_form(pmax, gw.state.amplitudes);
      worst_gap = std::max(worst_gap, std::abs((1.0 - acc) - closed));
      worst_margin = std::min(
          worst_margin,
          acc - (1.0 - gw.distance_to_infinite() - cfg.tol));

      // random truncated counter state against the closed form
      Vector psi = Vector::Zero(d);
      for (Index i = 0; i + 1 < d; ++i) psi(i) = rng.gaussian_complex();
      psi.normalize();
      const double acc_r = av.acceptance(
          StateVector(kron_witness(psi, top.vector.amplitudes)));
      const double closed_r = rejection_closed_form(pmax, psi);
      worst_gap = std::max(worst_gap, std::abs((1.0 - acc_r) - closed_r));
    }

    // centered law
    const Verifier centered = center_gap(base);
    const EigenPair ctop = optimal_witness(centered);
    if (ctop.value > 0.25 + 1e-9) {
      const double delta = ctop.value - 0.25;
      for (const Index d : cfg.d_sweep) {
        const AmplifiedVerifier av = build_c2(centered, d);
        const GeometricWitness gw =
            geometric_witness(ctop.value, d, ConstructionTag::kC2);
        const double acc = av.acceptance(StateVector(
            kron_witness(gw.state.amplitudes, ctop.vector.amplitudes)));
        const double law =
            1.0 - std::pow(1.0 - 4.0 * delta, double(d - 1)) - cfg.tol;
        worst_centered_margin = std::min(worst_centered_margin, acc - law);
      }
    }
  }
  sum.check("c2/closed-form-vs-simulation", worst_gap <= cfg.tol,
            "max |closed - simulated| " + fmt(worst_gap));
  sum.check("c2/completeness-geometric", worst_margin >= 0.0,
            "min margin " + fmt(worst_margin));
  sum.check("c2/completeness-centered-law", worst_centered_margin >= 0.0,
            "min margin " + fmt(worst_centered_margin));

  // soundness bound on no-instance bases
  double worst_slack = 1.0;
  for (int b = 0; b < cfg.soundness_bases; ++b) {
    double pmax = 0.0;
    const Verifier base =
        spectrum_base(cfg.seed + 1500 + static_cast<std::uint64_t>(b), cfg.w,
                      0.0, 0.25 - 1e-6, cfg.c, cfg.s, &pmax);
    const AmplifiedVerifier av = build_c2(base, 16);
    const double pmax_amp = max_acceptance(av).value;
    worst_slack = std::min(
        worst_slack, soundness_bound_c2(pmax) + cfg.tol - pmax_amp);
  }
  sum.check("c2/soundness-bound", worst_slack >= 0.0,
            "min slack " + fmt(worst_slack));
  sum.check("c2/soundness-boundary-identity",
            soundness_bound_c2(0.25) == 1.0,
            "bound(1/4) = " + fmt(soundness_bound_c2(0.25)));

  // block diagonality of P_V' in eigenbasis (x) counter basis
  double worst_off = 0.0;
  double worst_product_gap = 0.0;
  int reliable = 0;
  for (int b = 0; b < cfg.block_bases; ++b) {
    Rng brng(cfg.seed + 2500 + static_cast<std::uint64_t>(b));
    const Verifier base = haar_verifier(brng, cfg.a, cfg.w, cfg.c, cfg.s);
    const AmplifiedVerifier av = build_c2(base, 8);
    const BlockStructureReport rep = block_structure_check(av);
    if (!rep.reliable) continue;
    ++reliable;
    worst_off = std::max(worst_off, rep.max_off_block_norm);
    const double block_max = *std::max_element(
        rep.block_top_eigenvalues.begin(), rep.block_top_eigenvalues.end());
    worst_product_gap =
        std::max(worst_product_gap, std::abs(block_max - rep.global_top));
  }
  sum.check("c2/block-diagonality", worst_off <= cfg.tol && reliable > 0,
            "max off-block norm " + fmt(worst_off) + " over " +
                std::to_string(reliable) + " bases");
  sum.check("c2/product-witness-optimality", worst_product_gap <= cfg.tol,
            "max gap " + fmt(worst_product_gap));

  const CircuitDesc desc = c2_circuit_desc(cfg.a, cfg.w, 16);
  artifacts["construction2.qvc"] = serialize(desc);
  ordered_json j;
  j["schema_version"] = 1;
  j["construction"] = "c2";
  j["d_levels"] = 16;
  {
    const Verifier base = haar_base_with_pmax_at_least(
        cfg.seed + 900, cfg.a, cfg.w, cfg.c, cfg.s, 0.30, nullptr);
    j["resources"] = resources_json(build_c2(base, 16).resources());
  }
  artifacts["construction2.json"] = j.dump(2) + "\n";
}

void suite_truncation(const ExperimentConfig& cfg, Summary& sum,
                      std::vector<AmplifierReport>& reports,
                      std::map<std::string, std::string>& artifacts) {
  double pmax = 0.0;
  const Verifier yes_base = haar_base_with_pmax_at_least(
      cfg.seed + 4000, cfg.a, cfg.w, cfg.c, cfg.s, cfg.c, &pmax);

  double worst_completeness = 1.0;
  bool counters_ok = true;
  bool qubit_count_ok = true;
  for (const Index q : cfg.q_sweep) {
    auto [av, report] = amplify_new(yes_base, q, {cfg.base_t_a, 2048});
    if (report.c_measured >= 0.0)
      worst_completeness = std::min(
          worst_completeness,
          report.c_measured - (1.0 - std::pow(2.0, -double(q)) - cfg.tol));
    counters_ok = counters_ok && av.resources().v_calls == 2 &&
                  av.resources().v_dagger_calls == 1;
    const double lg =
        std::log2(static_cast<double>(q) / (cfg.c - cfg.s));
    const double diff = double(int_log2(report.d_levels)) - lg;
    qubit_count_ok = qubit_count_ok && diff >= 0.0 && diff <= 3.0;
    reports.push_back(report);

    if (q == cfg.q_sweep.back()) {
      const CircuitDesc desc = c2_circuit_desc(
          cfg.a + 1, cfg.w, report.d_levels);
      artifacts["amplified_new.qvc"] = serialize(desc);
      ordered_json j;
      j["schema_version"] = 1;
      j["construction"] = "c2";
      j["q"] = q;
      j["d_levels"] = report.d_levels;
      j["resources"] = resources_json(av.resources());
      artifacts["amplified_new.json"] = j.dump(2) + "\n";
    }
  }
  sum.check("truncation/completeness-target", worst_completeness >= 0.0,
            "min margin " + fmt(worst_completeness));
  sum.check("truncation/call-counts", counters_ok, "2 calls to V, 1 to Vdag");
  sum.check("truncation/counter-qubits", qubit_count_ok,
            "log2 D within log2(q/(c-s)) + [0,3]");

  // soundness through the pipeline on a no-instance base
  double worst_slack = 1.0;
  for (int b = 0; b < 5; ++b) {
    const Verifier no_base =
        spectrum_base(cfg.seed + 4600 + static_cast<std::uint64_t>(b), cfg.w,
                      0.0, cfg.s, cfg.c, cfg.s, nullptr);
    auto [av, report] = amplify_new(no_base, cfg.q_sweep.front(),
                                    {cfg.base_t_a, 2048});
    const Verifier centered = center_gap(no_base);
    const double centered_pmax = optimal_witness(centered).value;
    if (report.s_measured >= 0.0 && centered_pmax < 0.25)
      worst_slack = std::min(worst_slack,
                             soundness_bound_c2(centered_pmax) + cfg.tol -
                                 report.s_measured);
  }
  sum.check("truncation/soundness-bound", worst_slack >= 0.0,
            "min slack " + fmt(worst_slack));

  // witness-truncation law: drop scaling ~ sqrt(2^-m)
  const Index d_law = Index(1) << (cfg.m_sweep.back() + 1);
  const TruncationLawSweep law =
      truncation_law_sweep(1, 1, d_law, cfg.m_sweep, 1,
                           cfg.truncation_trials, cfg.seed + 4800);
  const double target = -std::log(2.0) / 2.0;
  sum.check("truncation/witness-law-slope",
            std::abs(law.slope - target) <= 0.15,
            "slope " + fmt(law.slope) + " target " + fmt(target));

  std::ostringstream law_csv;
  law_csv << "schema_version,m,worst_drop,fitted_k\n";
  for (size_t i = 0; i < law.ms.size(); ++i)
    law_csv << "1," << law.ms[i] << "," << fmt(law.worst_drops[i]) << ","
            << fmt(law.fitted_ks[i]) << "\n";
  artifacts["truncation_law.csv"] = law_csv.str();
}

void suite_probtrunc(const ExperimentConfig& cfg, Summary& sum,
                     std::vector<AmplifierReport>& reports,
                     std::map<std::string, std::string>& artifacts) {
  double pmax = 0.0;
  const Verifier yes_base = haar_base_with_pmax_at_least(
      cfg.seed + 5000, cfg.a, cfg.w, cfg.c, cfg.s, 0.55, &pmax);

  std::ostringstream sweep_csv;
  sweep_csv << "schema_version,q_bits,p_grid_down,err_down,p_grid_up,err_up\n";

  double exact_err = 1.0;
  std::vector<double> xs, ys;
  ProbTruncResult last;
  for (const Index qb : cfg.qbits_sweep) {
    ProbTruncResult res = amplify_prob_trunc(yes_base, qb, {cfg.base_t_a});
    exact_err = std::min(exact_err, 1.0 - res.exact_p_acceptance);
    const auto& down = res.sweep_down.back();
    const auto& up = res.sweep_up.back();
    sweep_csv << "1," << qb << "," << fmt(down.p_grid) << ","
              << fmt(down.completeness_error) << "," << fmt(up.p_grid) << ","
              << fmt(up.completeness_error) << "\n";
    if (down.completeness_error > 0) {
      xs.push_back(double(qb));
      ys.push_back(down.completeness_error);
    }
    last = std::move(res);
  }
  sum.check("prob-trunc/exact-p-perfect", exact_err <= cfg.tol,
            "max completeness error " + fmt(exact_err));
  if (xs.size() >= 2) {
    const double slope = log_regression_slope(xs, ys) / std::log(2.0);
    sum.check("prob-trunc/error-slope", slope <= -1.0 + 0.1,
              "log2 error slope per bit " + fmt(slope));
  }
  reports.push_back(last.report);
  artifacts["prob_trunc_sweep.csv"] = sweep_csv.str();

  // rejection floor on a no-instance base over the full dyadic grid
  const double delta = 0.1;
  double dmax = 0.0;
  const Verifier no_base =
      spectrum_base(cfg.seed + 5600, cfg.w, 0.0, 0.5 - delta, cfg.c, cfg.s,
                    &dmax);
  const double delta_eff = 0.5 - dmax;
  const ProbTruncEvaluator eval(no_base);
  const Index qb = 8;
  const Index grid = Index(1) << qb;
  double min_reject = 1.0;
  for (Index k = grid / 2; k < grid; ++k) {
    const double p = double(k) / double(grid);
    min_reject = std::min(min_reject, eval.min_rejection(p));
  }
  sum.check("prob-trunc/rejection-floor",
            min_reject >= 4.0 * delta_eff * delta_eff - cfg.tol,
            "min rejection " + fmt(min_reject) + " vs 4 delta^2 " +
                fmt(4.0 * delta_eff * delta_eff));
}

void write_or_check(const ExperimentConfig& cfg, RunResult& result) {
  namespace fs = std::filesystem;
  const fs::path out(cfg.out_dir);
  if (cfg.check_only) {
    for (const auto& [name, content] : result.artifacts) {
      const fs::path p = out / name;
      std::ifstream in(p, std::ios::binary);
      if (!in) {
        result.exit_code = 1;
        result.first_failure = "determinism/" + name + " (missing)";
        return;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      if (buf.str() != content) {
        result.exit_code = 1;
        result.first_failure = "determinism/" + name + " (differs)";
        return;
      }
    }
    return;
  }
  fs::create_directories(out);
  for (const auto& [name, content] : result.artifacts) {
    std::ofstream o(out / name, std::ios::binary);
    o << content;
  }
}

}  // namespace

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  if (a < 1) problems.push_back("a must be >= 1");
  if (w < 1) problems.push_back("w must be >= 1");
  if (!(c > s)) problems.push_back("requires c > s");
  if (c > 1.0 || s < 0.0) problems.push_back("annotations must lie in [0,1]");
  const Index max_d =
      d_sweep.empty() ? 2 : *std::max_element(d_sweep.begin(), d_sweep.end());
  if (max_d * (Index(1) << (a + w + 1)) > (Index(1) << 14))
    problems.push_back("total dimension exceeds 2^14");
  if (d_sweep.empty() || q_sweep.empty() || qbits_sweep.empty() ||
      m_sweep.empty())
    problems.push_back("sweep grids must be nonempty");
  for (const Index d : d_sweep)
    if (d < 2) problems.push_back("counter sweep values must be >= 2");
  if ((suite_enabled("c2") || suite_enabled("truncation")) && s >= 0.25)
    problems.push_back(
        "construction-2 soundness guarantee requires s < 1/4");
  if (suite != "all" && suite != "rewinding" && suite != "c1" &&
      suite != "c2" && suite != "truncation" && suite != "prob-trunc")
    problems.push_back("unknown suite '" + suite + "'");
  return problems;
}

bool ExperimentConfig::suite_enabled(const std::string& name) const {
  return suite == "all" || suite == name;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("QVLAB_OUT")) return env;
  return "qvlab_out";
}

RunResult run(const ExperimentConfig& config) {
  RunResult result;
  ExperimentConfig cfg = config;
  if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();

  const std::vector<std::string> problems = cfg.validate();
  if (!problems.empty()) {
    result.exit_code = 2;
    result.first_failure = problems.front();
    for (const auto& p : problems) result.summary.push_back("[CONFIG] " + p);
    return result;
  }

  Summary sum;
  std::vector<AmplifierReport> reports;
  if (cfg.suite_enabled("rewinding")) suite_rewinding(cfg, sum);
  if (cfg.suite_enabled("c1")) suite_c1(cfg, sum, result.artifacts);
  if (cfg.suite_enabled("c2")) suite_c2(cfg, sum, result.artifacts);
  if (cfg.suite_enabled("truncation"))
    suite_truncation(cfg, sum, reports, result.artifacts);
  if (cfg.suite_enabled("prob-trunc"))
    suite_probtrunc(cfg, sum, reports, result.artifacts);

  std::ostringstream reports_csv;
  reports_csv << kReportHeader;
  ordered_json reports_rows = ordered_json::array();
  for (const auto& r : reports) {
    report_csv_row(reports_csv, r);
    reports_rows.push_back(report_json(r));
  }
  ordered_json reports_doc;
  reports_doc["schema_version"] = 1;
  reports_doc["rows"] = std::move(reports_rows);
  result.artifacts["reports.csv"] = reports_csv.str();
  result.artifacts["reports.json"] = reports_doc.dump(2) + "\n";

  const Table1 table = table1_report(reports);
  result.artifacts["table1.csv"] = table.csv;
  result.artifacts["table1.json"] = table.json;

  std::ostringstream summary_txt;
  for (const auto& line : sum.lines) summary_txt << line << "\n";
  summary_txt << (sum.ok ? "RESULT PASS" : "RESULT FAIL " + sum.first_failure)
              << "\n";
  result.artifacts["summary.txt"] = summary_txt.str();

  result.summary = sum.lines;
  if (!sum.ok) {
    result.exit_code = 1;
    result.first_failure = sum.first_failure;
  }
  write_or_check(cfg, result);
  return result;
}

namespace {

ordered_json make_sidecar(const std::string& generator, std::uint64_t seed,
                          Index a, Index w, double c, double s, double pmax,
                          double lo, double hi) {
  ordered_json j;
  j["schema_version"] = 1;
  j["generator"] = generator;
  j["seed"] = seed;
  j["a"] = a;
  j["w"] = w;
  j["c"] = c;
  j["s"] = s;
  j["p_max"] = pmax;
  j["lo"] = lo;
  j["hi"] = hi;
  return j;
}

CircuitDesc call_only_circuit(Index a, Index w) {
  CircuitDesc c;
  c.registers.push_back({"a", RegKind::kQubit, a});
  c.registers.push_back({"w", RegKind::kQubit, w});
  Gate g;
  g.kind = GateKind::kCall;
  g.call_name = "V";
  g.call_args = {"a", "w"};
  c.gates.push_back(std::move(g));
  return c;
}

}  // namespace

RunResult gen(const ExperimentConfig& config) {
  RunResult result;
  ExperimentConfig cfg = config;
  if (cfg.out_dir.empty()) cfg.out_dir = default_out_dir();
  const std::vector<std::string> problems = cfg.validate();
  if (!problems.empty()) {
    result.exit_code = 2;
    result.first_failure = problems.front();
    return result;
  }

  std::ostringstream manifest;
  manifest << "schema_version,file,generator,p_max\n";
  for (Index i = 0; i < cfg.gen_count; ++i) {
    const int bucket = static_cast<int>(i % 3);
    const std::uint64_t seed = cfg.seed + 10007 * static_cast<std::uint64_t>(i);
    double pmax = 0.0;
    std::string generator;
    Verifier v = [&]() -> Verifier {
      if (bucket == 2) {
        // high bucket: Haar with rejection into (0.65, 0.95)
        for (std::uint64_t k = 0; k < 500; ++k) {
          Rng rng(seed + k);
          Verifier cand = haar_verifier(rng, cfg.a, cfg.w, cfg.c, cfg.s);
          const double p = optimal_witness(cand).value;
          if (p > 0.65 && p < 0.95) {
            pmax = p;
            generator = "haar";
            return cand;
          }
        }
        generator = "spectrum";
        return spectrum_base(seed, cfg.w, 0.65, 0.95, cfg.c, cfg.s, &pmax);
      }
      const double lo = (bucket == 0) ? 0.05 : 0.35;
      const double hi = (bucket == 0) ? 0.35 : 0.65;
      generator = "spectrum";
      return spectrum_base(seed, cfg.w, lo, hi, cfg.c, cfg.s, &pmax);
    }();

    char name[64];
    std::snprintf(name, sizeof(name), "verifier_%03lld",
                  static_cast<long long>(i));
    const CircuitDesc circ =
        call_only_circuit(v.ancilla_qubits(), v.witness_qubits());
    result.artifacts[std::string(name) + ".qvc"] = serialize(circ);
    const double lo = (bucket == 0) ? 0.05 : (bucket == 1 ? 0.35 : 0.65);
    const double hi = (bucket == 0) ? 0.35 : (bucket == 1 ? 0.65 : 0.95);
    ordered_json side = make_sidecar(generator, seed, v.ancilla_qubits(),
                                     v.witness_qubits(), cfg.c, cfg.s, pmax,
                                     lo, hi);
    result.artifacts[std::string(name) + ".json"] = side.dump(2) + "\n";
    manifest << "1," << name << ".qvc," << generator << "," << fmt(pmax)
             << "\n";
  }
  result.artifacts["manifest.csv"] = manifest.str();
  write_or_check(cfg, result);
  return result;
}

Verifier verifier_from_sidecar(const std::string& sidecar_json) {
  const auto j = nlohmann::json::parse(sidecar_json);
  const std::string generator = j.at("generator");
  const std::uint64_t seed = j.at("seed");
  const Index a = j.at("a");
  const Index w = j.at("w");
  const double c = j.at("c");
  const double s = j.at("s");
  if (generator == "haar") {
    Rng rng(seed);
    return haar_verifier(rng, a, w, c, s);
  }
  if (generator == "spectrum") {
    const double lo = j.at("lo");
    const double hi = j.at("hi");
    double pmax = 0.0;
    return spectrum_base(seed, w, lo, hi, c, s, &pmax);
  }
  throw Error("unknown generator '" + generator + "'");
}

Verifier load_verifier(const std::string& qvc_text,
                       const std::string& sidecar_json) {
  const Verifier regen = verifier_from_sidecar(sidecar_json);
  const CircuitDesc desc = parse(qvc_text);
  const SpaceLayout layout = natural_layout(desc);
  const Operator elaborated =
      elaborate(desc, layout, {{"V", regen.op()}});
  return Verifier(elaborated, regen.ancilla_qubits(), regen.witness_qubits(),
                  regen.completeness(), regen.soundness());
}

}  // namespace qvlab
