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

#include <map>
#include <string>
#include <vector>

#include "qvlab/algebra.hpp"

namespace qvlab {

// Gate-level IR for verifier circuits (.qvc files). Line-oriented UTF-8, one
// declaration or gate per line in canonical form, '#' comments, decimal
// parameters. See docs/qvc_format.md for the exact grammar.

enum class RegKind { kQubit, kCounter };

struct RegDecl {
  std::string name;
  RegKind kind = RegKind::kQubit;
  Index size = 1;  // qubit count, or counter dimension D

  bool operator==(const RegDecl&) const = default;
};

struct QubitRef {
  std::string reg;
  Index index = 0;

  bool operator==(const QubitRef&) const = default;
};

/// Gate control. Qubit controls have polarity 0 (fires on |0>) or 1
/// (fires on |1>). Counter controls support exactly the two sanctioned
/// forms: d = 0 (polarity 0) and d >= 1 (polarity 1).
struct Control {
  bool on_counter = false;
  std::string reg;
  Index qubit_index = 0;  // unused for counters
  int polarity = 1;

  bool operator==(const Control&) const = default;
};

enum class GateKind {
  kH,
  kX,
  kZ,
  kCnot,
  kRy,        // 1 parameter
  kU2,        // 4 parameters: arbitrary single-qubit unitary
  kIncMod,    // increment modulo D on a counter
  kZeroCheck, // X on a qubit controlled on counter == 0
  kReflect0,  // 2|0..0><0..0| - I on a qubit block
  kCall,      // named sub-circuit, optionally daggered
};

struct Gate {
  GateKind kind = GateKind::kX;
  std::vector<QubitRef> targets;       // qubit targets, in order
  std::string counter;                 // inc_mod / zero_check
  std::string call_name;               // call
  bool call_dagger = false;
  std::vector<std::string> call_args;  // whole-register arguments, in order
  std::vector<double> params;
  std::vector<Control> controls;

  bool operator==(const Gate&) const = default;
};

struct CircuitDesc {
  std::vector<RegDecl> registers;
  std::vector<Gate> gates;

  bool operator==(const CircuitDesc&) const = default;

  const RegDecl* find_register(const std::string& name) const;
};

class ParseError : public Error {
 public:
  ParseError(int line, int col, const std::string& msg);
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Parse .qvc text. Throws ParseError with line/column on syntax errors,
/// undeclared registers, or counter misuse.
CircuitDesc parse(const std::string& text);

/// Canonical form: declarations first, then gates, one per line.
/// parse(serialize(c)) == c.
std::string serialize(const CircuitDesc& c);

/// The layout a circuit naturally elaborates over: one dim-2 factor named
/// "r[i]" per qubit of each qubit register, one dim-D factor per counter,
/// in declaration order.
SpaceLayout natural_layout(const CircuitDesc& c);

/// Product of the embedded gate matrices in program order. `layout` must
/// contain exactly the factors of natural_layout(c) (any order); bindings
/// supply the operators for `call` gates.
Operator elaborate(const CircuitDesc& c, const SpaceLayout& layout,
                   const std::map<std::string, Operator>& bindings);

/// The same elaboration as a list of embedded local gates (program order);
/// useful for applying a circuit to statevectors without forming the dense
/// product.
std::vector<EmbeddedOp> elaborate_ops(
    const CircuitDesc& c, const SpaceLayout& layout,
    const std::map<std::string, Operator>& bindings);

}  // namespace qvlab
