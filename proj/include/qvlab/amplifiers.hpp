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

#include <optional>
#include <string>
#include <vector>

#include "qvlab/constructions.hpp"

namespace qvlab {

/// Parameters of the counter-truncation amplifier. D is chosen as
/// kappa * 2^ceil(log2(q/(c-s))) with kappa the smallest power of two such
/// that (1-4 delta)^(D-1) <= 2^-q, delta the centered half-gap.
struct TruncationParams {
  Index q = 0;
  double delta = 0.0;
  Index kappa = 1;
  Index d_levels = 2;
  Index m = 0;    // witness-restriction split, when used
  Index ell = 1;  // increments in the verifier under test

  bool operator==(const TruncationParams&) const = default;
};

TruncationParams derive_truncation(double c, double s, Index q);

/// Table-1 style record for one amplifier run. Measured fields are -1 when
/// not applicable to the given base.
struct AmplifierReport {
  std::string id;  // "new", "new+", "prob-trunc", "fk16"
  bool implemented = true;

  // input annotations and resource model
  double c_in = 0.0, s_in = 0.0;
  Index l_m_in = 0, l_a_in = 0, t_a_in = 0;

  Index q = 0;  // completeness exponent (or q_bits for prob-trunc)
  Index d_levels = 0;

  double c_measured = -1.0;
  double c_bound = -1.0;           // 1 - 2^-q target
  double c_resid_log2 = 0.0;       // analytic log2 of the completeness residual
  double s_measured = -1.0;
  double s_bound = -1.0;

  Index l_m_out = 0, l_a_out = 0, t_a_model = 0;
  int v_calls = 0, v_dagger_calls = 0;
};

struct AmplifyOptions {
  Index t_a_in = 100;  // base time-model input
  // Eigensolving the witness space is skipped above this dimension.
  Index max_eigens_dim = 2048;
};

/// The counter-truncation amplifier: center the gap, build construction 2
/// at the derived D, and measure completeness (geometric witness on the
/// base optimum) and soundness (full eigensolve, when the dimension allows).
std::pair<AmplifiedVerifier, AmplifierReport> amplify_new(
    const Verifier& base, Index q, const AmplifyOptions& opts = {});

/// Dyadic encoding of p: big-endian fixed point in [0,1) over q_bits qubits,
/// read as k / 2^q_bits. Rounding down keeps gamma = 1/(2p_grid) at or above
/// the exact value.
Index encode_probability(double p, Index q_bits, bool round_up = false);

/// Probability-truncation evaluator. The P register is measured first, so
/// the verifier is block diagonal over the dyadic grid; each block reduces
/// to a small reject matrix R(p) on the witness register W.
class ProbTruncEvaluator {
 public:
  explicit ProbTruncEvaluator(const Verifier& base);

  /// Reject matrix on W: <0_G 0_A| U(p)^dag V^dag CZ V U(p) |0_G 0_A>.
  Matrix reject_matrix(double p) const;
  /// Acceptance of a witness at rotation parameter p.
  double acceptance(double p, const Vector& witness) const;
  /// max over witnesses = 1 - lambda_min(R^dag R).
  double max_acceptance(double p) const;
  /// min over witnesses of the rejection probability.
  double min_rejection(double p) const;

  const Verifier& base() const { return base_; }
  /// V^dag CZ(G->M) V on G (x) A (x) W; the p-independent circuit core.
  const Matrix& kernel() const { return kernel_; }

 private:
  Verifier base_;
  SpaceLayout layout_;       // G, A, W
  Matrix kernel_;            // V^dag CZ(G->M) V, independent of p
};

struct ProbTruncSweepPoint {
  Index q_bits = 0;
  double p_grid = 0.0;
  double completeness_error = 0.0;  // 1 - acceptance with the encoded p
};

struct ProbTruncResult {
  /// Materialized only when the full dimension fits the dense cap.
  std::optional<AmplifiedVerifier> verifier;
  AmplifierReport report;
  double exact_p_acceptance = 0.0;
  std::vector<ProbTruncSweepPoint> sweep_down;   // p rounded down
  std::vector<ProbTruncSweepPoint> sweep_up;     // p rounded up
  double fitted_c = 0.0;  // completeness error <= fitted_c * 2^-q_bits
};

ProbTruncResult amplify_prob_trunc(const Verifier& base, Index q_bits,
                                   const AmplifyOptions& opts = {});

/// Witness-truncation law check: per trial, a spread witness on the full
/// counter is carved down to support [0, 2^m - 1] by the interval-removal /
/// shift-packing surgery, and the acceptance drop is measured. The worst
/// drop obeys drop <= K sqrt(2^-m ell); K is reported, not assumed.
struct WitnessTruncationResult {
  double worst_drop = 0.0;
  double fitted_k = 0.0;
  std::vector<double> drops;
};
WitnessTruncationResult witness_truncation_check(const AmplifiedVerifier& av,
                                                 Index m, Index ell,
                                                 int trials,
                                                 std::uint64_t seed);

/// Drop for one supplied witness. Zero when 2^m covers the counter or the
/// witness is already supported on [0, 2^m - 1] (restriction is free).
double truncation_drop_for_witness(const AmplifiedVerifier& av, Index m,
                                   Index ell, const StateVector& witness);

/// The truncation law over an m-sweep: per trial a fresh random base (and
/// the same witness draw for every m), worst drop per m, and the slope of
/// ln(worst drop) against m. Scaling as sqrt(2^-m) shows up as a slope of
/// -(ln 2)/2.
struct TruncationLawSweep {
  std::vector<Index> ms;
  std::vector<double> worst_drops;
  std::vector<double> fitted_ks;
  double slope = 0.0;
};
TruncationLawSweep truncation_law_sweep(Index ancilla_qubits,
                                        Index witness_qubits, Index d,
                                        const std::vector<Index>& ms,
                                        Index ell, int trials,
                                        std::uint64_t seed);

/// Least-squares slope of ln(y) against x.
double log_regression_slope(const std::vector<double>& x,
                            const std::vector<double>& y);

/// Table-1 style comparison table. Rows for the given measured reports plus
/// the formula-only reference rows; CSV and JSON renderings.
struct Table1 {
  std::string csv;
  std::string json;
};
Table1 table1_report(const std::vector<AmplifierReport>& reports);

}  // namespace qvlab
