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

#include "qvlab/circuit_ir.hpp"

#include <doctest.h>

#include "qvlab/constructions.hpp"
#include "qvlab/counter.hpp"
#include "qvlab/rng.hpp"
#include "qvlab/verifier.hpp"

using namespace qvlab;

TEST_CASE("parse accepts the gate-keyword form") {
  const CircuitDesc c = parse("qreg a[1]; gate x a[0];");
  CHECK(c.registers.size() == 1);
  CHECK(c.gates.size() == 1);
  CHECK(c.gates[0].kind == GateKind::kX);
  CHECK(c.gates[0].targets[0] == QubitRef{"a", 0});
}

TEST_CASE("empty gate list elaborates to the identity") {
  const CircuitDesc c = parse("qreg a[2];\n");
  const Operator u = elaborate(c, natural_layout(c), {});
  CHECK((u.mat() - Matrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("parse reports line and column on syntax errors") {
  try {
    parse("qreg a[1];\nx a[7];\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("x q[0];"), ParseError);          // undeclared
  CHECK_THROWS_AS(parse("qreg a[1]; y a[0];"), ParseError);  // unknown gate
  CHECK_THROWS_AS(parse("qreg a[1]; x a[0]"), ParseError);   // missing ';'
}

TEST_CASE("counter misuse is rejected") {
  CHECK_THROWS_AS(parse("breg b[4]; x b[0];"), ParseError);
  CHECK_THROWS_AS(parse("qreg a[2]; inc_mod a;"), ParseError);
  CHECK_THROWS_AS(parse("breg b[4]; qreg a[1]; call V b, a;"), ParseError);
  CHECK_THROWS_AS(parse("breg b[4]; breg c[4]; inc_mod b ctrl c=2;"),
                  ParseError);
}

TEST_CASE("serialization round-trips core gate forms") {
  const std::string text =
      "breg b[8];\n"
      "qreg a[2];\n"
      "qreg w[1];\n"
      "h a[0];\n"
      "ry(0.78539816339744828) w[0];\n"
      "u2(0.1, -0.25, 3.5, 0.0001) a[1];\n"
      "cnot a[0], w[0];\n"
      "inc_mod b ctrl a[0]=0;\n"
      "zero_check b, a[1];\n"
      "reflect0 a[0], a[1] ctrl b>=1;\n"
      "call V! a, w ctrl b=0;\n";
  const CircuitDesc c = parse(text);
  CHECK(serialize(c) == text);
  CHECK(parse(serialize(c)) == c);
}

namespace {

CircuitDesc random_circuit(Rng& rng) {
  CircuitDesc c;
  const Index nregs = 1 + static_cast<Index>(rng.uniform_int(2));
  for (Index r = 0; r < nregs; ++r)
    c.registers.push_back({"q" + std::to_string(r), RegKind::kQubit,
                           1 + static_cast<Index>(rng.uniform_int(2))});
  const bool with_counter = rng.uniform() < 0.5;
  if (with_counter)
    c.registers.push_back({"b", RegKind::kCounter,
                           2 + static_cast<Index>(rng.uniform_int(5))});

  const auto random_qubit = [&]() -> QubitRef {
    const Index r = static_cast<Index>(rng.uniform_int(
        static_cast<std::uint64_t>(nregs)));
    const auto& reg = c.registers[static_cast<size_t>(r)];
    return {reg.name,
            static_cast<Index>(rng.uniform_int(
                static_cast<std::uint64_t>(reg.size)))};
  };

  const int ngates = 1 + static_cast<int>(rng.uniform_int(8));
  for (int g = 0; g < ngates; ++g) {
    Gate gate;
    switch (rng.uniform_int(with_counter ? 7 : 5)) {
      case 0:
        gate.kind = GateKind::kH;
        gate.targets = {random_qubit()};
        break;
      case 1:
        gate.kind = GateKind::kX;
        gate.targets = {random_qubit()};
        break;
      case 2:
        gate.kind = GateKind::kRy;
        gate.params = {rng.gaussian()};
        gate.targets = {random_qubit()};
        break;
      case 3:
        gate.kind = GateKind::kU2;
        gate.params = {rng.gaussian(), rng.gaussian(), rng.gaussian(),
                       rng.gaussian()};
        gate.targets = {random_qubit()};
        break;
      case 4: {
        gate.kind = GateKind::kCnot;
        QubitRef a = random_qubit();
        QubitRef b = random_qubit();
        if (a == b) {
          gate.kind = GateKind::kZ;
          gate.targets = {a};
        } else {
          gate.targets = {a, b};
        }
        break;
      }
      case 5:
        gate.kind = GateKind::kIncMod;
        gate.counter = "b";
        break;
      default:
        gate.kind = GateKind::kZeroCheck;
        gate.counter = "b";
        gate.targets = {random_qubit()};
        break;
    }
    // sometimes attach a control on a register the gate does not touch
    if (rng.uniform() < 0.35) {
      const QubitRef ctl = random_qubit();
      bool clash = ctl.reg == gate.counter;
      for (const auto& t : gate.targets)
        clash = clash || (t == ctl);
      if (!clash)
        gate.controls.push_back(
            {false, ctl.reg, ctl.index,
             static_cast<int>(rng.uniform_int(2))});
    }
    c.gates.push_back(std::move(gate));
  }
  return c;
}

}  // namespace

TEST_CASE("round-trip is exact on generated circuits") {
  Rng rng(2024);
  for (int t = 0; t < 50; ++t) {
    const CircuitDesc c = random_circuit(rng);
    CHECK(parse(serialize(c)) == c);
  }
}

TEST_CASE("x twice elaborates to the identity") {
  const CircuitDesc c = parse("qreg a[1]; x a[0]; x a[0];");
  const Operator u = elaborate(c, natural_layout(c), {});
  CHECK((u.mat() - Matrix::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("inc_mod on a D=4 counter wraps |3> to |0>") {
  const CircuitDesc c = parse("breg b[4]; inc_mod b;");
  const Operator u = elaborate(c, natural_layout(c), {});
  Vector in = Vector::Zero(4);
  in(3) = 1.0;
  CHECK(std::abs(u.apply(in)(0) - 1.0) == 0.0);
}

TEST_CASE("elaborate is multiplicative over concatenation") {
  Rng rng(303);
  for (int t = 0; t < 10; ++t) {
    CircuitDesc whole = random_circuit(rng);
    const size_t cut = whole.gates.size() / 2;
    CircuitDesc first = whole;
    first.gates.assign(whole.gates.begin(), whole.gates.begin() + cut);
    CircuitDesc second = whole;
    second.gates.assign(whole.gates.begin() + cut, whole.gates.end());

    const SpaceLayout layout = natural_layout(whole);
    const Matrix u = elaborate(whole, layout, {}).mat();
    const Matrix u1 = elaborate(first, layout, {}).mat();
    const Matrix u2 = elaborate(second, layout, {}).mat();
    CHECK((u - u2 * u1).norm() < 1e-12);
  }
}

TEST_CASE("zero_check gate matches the counter module operator") {
  const CircuitDesc c = parse("breg b[3]; qreg a[1]; zero_check b, a[0];");
  const SpaceLayout layout = natural_layout(c);
  const Operator via_ir = elaborate(c, layout, {});
  const Operator via_counter =
      zero_check(CounterRegister(3), layout, "b", "a[0]");
  CHECK((via_ir.mat() - via_counter.mat()).norm() < 1e-14);
}

TEST_CASE("unbound call is an error") {
  const CircuitDesc c = parse("qreg a[1]; call V a;");
  CHECK_THROWS_AS(elaborate(c, natural_layout(c), {}), Error);
}

TEST_CASE("call binding dimension is checked") {
  const CircuitDesc c = parse("qreg a[2]; call V a;");
  CHECK_THROWS_AS(elaborate(c, natural_layout(c), {{"V", Operator::identity(2)}}),
                  DimensionError);
}

TEST_CASE("elaborated Eq.-style circuits match the hand-built constructions") {
  Rng rng(404);
  const Verifier base = haar_verifier(rng, 2, 1, 2.0 / 3.0, 1.0 / 3.0);

  SUBCASE("construction 2") {
    const Index d = 4;
    const AmplifiedVerifier av = build_c2(base, d);
    const CircuitDesc desc = c2_circuit_desc(2, 1, d);
    const Operator via_ir =
        elaborate(desc, natural_layout(desc), {{"V", base.op()}});
    CHECK((via_ir.mat() - av.composed().mat()).norm() < 1e-12);
  }

  SUBCASE("construction 1") {
    const Index d = 4;
    const AmplifiedVerifier av = build_c1(base, d);
    const CircuitDesc desc = c1_circuit_desc(2, 1, d);
    const Operator via_ir =
        elaborate(desc, natural_layout(desc), {{"V", base.op()}});
    CHECK((via_ir.mat() - av.composed().mat()).norm() < 1e-12);
  }
}

TEST_CASE("daggered call inverts the binding") {
  Rng rng(505);
  const Operator v = Operator::unitary(rng.haar_unitary(4));
  const CircuitDesc c = parse("qreg a[2]; call V a; call V! a;");
  const Operator u = elaborate(c, natural_layout(c), {{"V", v}});
  CHECK((u.mat() - Matrix::Identity(4, 4)).norm() < 1e-12);
}
