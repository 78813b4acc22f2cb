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

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "qvlab/counter.hpp"

namespace qvlab {

const RegDecl* CircuitDesc::find_register(const std::string& name) const {
  for (const auto& r : registers)
    if (r.name == name) return &r;
  return nullptr;
}

ParseError::ParseError(int line, int col, const std::string& msg)
    : Error("line " + std::to_string(line) + ", col " + std::to_string(col) +
            ": " + msg),
      line_(line),
      col_(col) {}

namespace {

struct Token {
  enum Kind { kIdent, kNumber, kSymbol, kEnd } kind = kEnd;
  std::string text;
  double number = 0.0;
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  Token next() {
    skip_space_and_comments();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= text_.size()) {
      t.kind = Token::kEnd;
      return t;
    }
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::kIdent;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        t.text += advance();
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' ||
        c == '.') {
      t.kind = Token::kNumber;
      std::string num;
      if (c == '-' || c == '+') num += advance();
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
              ((text_[pos_] == '-' || text_[pos_] == '+') && !num.empty() &&
               (num.back() == 'e' || num.back() == 'E'))))
        num += advance();
      try {
        t.number = std::stod(num);
      } catch (const std::exception&) {
        throw ParseError(t.line, t.col, "malformed number '" + num + "'");
      }
      t.text = num;
      return t;
    }
    // multi-char symbol: >=
    if (c == '>' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
      t.kind = Token::kSymbol;
      t.text = ">=";
      advance();
      advance();
      return t;
    }
    t.kind = Token::kSymbol;
    t.text = std::string(1, advance());
    return t;
  }

 private:
  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { bump(); }

  CircuitDesc parse_circuit() {
    CircuitDesc c;
    while (cur_.kind != Token::kEnd) {
      if (cur_.kind != Token::kIdent)
        throw ParseError(cur_.line, cur_.col,
                         "expected declaration or gate, got '" + cur_.text +
                             "'");
      if (cur_.text == "qreg" || cur_.text == "breg") {
        parse_decl(c);
      } else {
        parse_gate(c);
      }
    }
    return c;
  }

 private:
  void bump() { cur_ = lex_.next(); }

  void expect_symbol(const std::string& s) {
    if (cur_.kind != Token::kSymbol || cur_.text != s)
      throw ParseError(cur_.line, cur_.col,
                       "expected '" + s + "', got '" + cur_.text + "'");
    bump();
  }

  std::string expect_ident() {
    if (cur_.kind != Token::kIdent)
      throw ParseError(cur_.line, cur_.col,
                       "expected identifier, got '" + cur_.text + "'");
    std::string s = cur_.text;
    bump();
    return s;
  }

  Index expect_int() {
    if (cur_.kind != Token::kNumber ||
        cur_.number != std::floor(cur_.number) || cur_.number < 0)
      throw ParseError(cur_.line, cur_.col,
                       "expected nonnegative integer, got '" + cur_.text + "'");
    const Index v = static_cast<Index>(cur_.number);
    bump();
    return v;
  }

  double expect_number() {
    if (cur_.kind != Token::kNumber)
      throw ParseError(cur_.line, cur_.col,
                       "expected number, got '" + cur_.text + "'");
    const double v = cur_.number;
    bump();
    return v;
  }

  void parse_decl(CircuitDesc& c) {
    const bool counter = (cur_.text == "breg");
    const int line = cur_.line, col = cur_.col;
    bump();
    RegDecl d;
    d.kind = counter ? RegKind::kCounter : RegKind::kQubit;
    d.name = expect_ident();
    expect_symbol("[");
    d.size = expect_int();
    expect_symbol("]");
    expect_symbol(";");
    if (c.find_register(d.name))
      throw ParseError(line, col, "register '" + d.name + "' redeclared");
    if (d.size < 1)
      throw ParseError(line, col, "register size must be positive");
    if (counter && d.size < 2)
      throw ParseError(line, col, "counter dimension must be >= 2");
    c.registers.push_back(std::move(d));
  }

  const RegDecl& lookup(const CircuitDesc& c, const std::string& name,
                        int line, int col) {
    const RegDecl* r = c.find_register(name);
    if (!r) throw ParseError(line, col, "undeclared register '" + name + "'");
    return *r;
  }

  QubitRef parse_qubit_ref(const CircuitDesc& c) {
    const int line = cur_.line, col = cur_.col;
    QubitRef q;
    q.reg = expect_ident();
    const RegDecl& r = lookup(c, q.reg, line, col);
    if (r.kind != RegKind::kQubit)
      throw ParseError(line, col,
                       "counter register '" + q.reg +
                           "' used where a qubit is required");
    expect_symbol("[");
    q.index = expect_int();
    expect_symbol("]");
    if (q.index >= r.size)
      throw ParseError(line, col, "qubit index out of range for '" + q.reg +
                                      "'");
    return q;
  }

  void parse_controls(CircuitDesc& c, Gate& g) {
    if (cur_.kind == Token::kIdent && cur_.text == "ctrl") {
      bump();
      while (true) {
        const int line = cur_.line, col = cur_.col;
        Control ctl;
        ctl.reg = expect_ident();
        const RegDecl& r = lookup(c, ctl.reg, line, col);
        if (r.kind == RegKind::kCounter) {
          ctl.on_counter = true;
          if (cur_.kind == Token::kSymbol && cur_.text == ">=") {
            bump();
            if (expect_int() != 1)
              throw ParseError(line, col, "counter control must be >=1 or =0");
            ctl.polarity = 1;
          } else {
            expect_symbol("=");
            if (expect_int() != 0)
              throw ParseError(line, col, "counter control must be >=1 or =0");
            ctl.polarity = 0;
          }
        } else {
          expect_symbol("[");
          ctl.qubit_index = expect_int();
          expect_symbol("]");
          if (ctl.qubit_index >= r.size)
            throw ParseError(line, col, "control qubit index out of range");
          expect_symbol("=");
          const Index pol = expect_int();
          if (pol != 0 && pol != 1)
            throw ParseError(line, col, "qubit control polarity must be 0 or 1");
          ctl.polarity = static_cast<int>(pol);
        }
        g.controls.push_back(std::move(ctl));
        if (cur_.kind == Token::kSymbol && cur_.text == ",") {
          bump();
          continue;
        }
        break;
      }
    }
    expect_symbol(";");
  }

  void parse_params(Gate& g, size_t count) {
    expect_symbol("(");
    for (size_t i = 0; i < count; ++i) {
      if (i > 0) expect_symbol(",");
      g.params.push_back(expect_number());
    }
    expect_symbol(")");
  }

  void parse_gate(CircuitDesc& c) {
    // Optional 'gate' keyword prefix is accepted.
    if (cur_.text == "gate") bump();
    const int line = cur_.line, col = cur_.col;
    const std::string kind = expect_ident();
    Gate g;
    if (kind == "h" || kind == "x" || kind == "z") {
      g.kind = kind == "h" ? GateKind::kH
                           : (kind == "x" ? GateKind::kX : GateKind::kZ);
      g.targets.push_back(parse_qubit_ref(c));
    } else if (kind == "cnot") {
      g.kind = GateKind::kCnot;
      g.targets.push_back(parse_qubit_ref(c));
      expect_symbol(",");
      g.targets.push_back(parse_qubit_ref(c));
      if (g.targets[0] == g.targets[1])
        throw ParseError(line, col, "cnot control equals target");
    } else if (kind == "ry") {
      g.kind = GateKind::kRy;
      parse_params(g, 1);
      g.targets.push_back(parse_qubit_ref(c));
    } else if (kind == "u2") {
      g.kind = GateKind::kU2;
      parse_params(g, 4);
      g.targets.push_back(parse_qubit_ref(c));
    } else if (kind == "inc_mod") {
      g.kind = GateKind::kIncMod;
      g.counter = expect_ident();
      const RegDecl& r = lookup(c, g.counter, line, col);
      if (r.kind != RegKind::kCounter)
        throw ParseError(line, col, "inc_mod target must be a counter");
    } else if (kind == "zero_check") {
      g.kind = GateKind::kZeroCheck;
      g.counter = expect_ident();
      const RegDecl& r = lookup(c, g.counter, line, col);
      if (r.kind != RegKind::kCounter)
        throw ParseError(line, col, "zero_check source must be a counter");
      expect_symbol(",");
      g.targets.push_back(parse_qubit_ref(c));
    } else if (kind == "reflect0") {
      g.kind = GateKind::kReflect0;
      while (true) {
        const int tline = cur_.line, tcol = cur_.col;
        const std::string name = expect_ident();
        const RegDecl& r = lookup(c, name, tline, tcol);
        if (r.kind != RegKind::kQubit)
          throw ParseError(tline, tcol, "reflect0 acts on qubit registers");
        if (cur_.kind == Token::kSymbol && cur_.text == "[") {
          bump();
          const Index idx = expect_int();
          expect_symbol("]");
          if (idx >= r.size)
            throw ParseError(tline, tcol, "qubit index out of range");
          g.targets.push_back({name, idx});
        } else {
          // whole register shorthand expands to all its qubits
          for (Index i = 0; i < r.size; ++i) g.targets.push_back({name, i});
        }
        if (cur_.kind == Token::kSymbol && cur_.text == ",") {
          bump();
          continue;
        }
        break;
      }
    } else if (kind == "call") {
      g.kind = GateKind::kCall;
      g.call_name = expect_ident();
      if (cur_.kind == Token::kSymbol && cur_.text == "!") {
        g.call_dagger = true;
        bump();
      }
      while (true) {
        const int aline = cur_.line, acol = cur_.col;
        const std::string name = expect_ident();
        const RegDecl& r = lookup(c, name, aline, acol);
        if (r.kind != RegKind::kQubit)
          throw ParseError(aline, acol,
                           "counter register cannot be a call argument");
        g.call_args.push_back(name);
        if (cur_.kind == Token::kSymbol && cur_.text == ",") {
          bump();
          continue;
        }
        break;
      }
    } else {
      throw ParseError(line, col, "unknown gate '" + kind + "'");
    }
    parse_controls(c, g);

    // controls may not touch the gate's own targets/counter
    for (const auto& ctl : g.controls) {
      if (ctl.on_counter) {
        if (ctl.reg == g.counter)
          throw ParseError(line, col, "control overlaps gate counter");
      } else {
        for (const auto& t : g.targets)
          if (t.reg == ctl.reg && t.index == ctl.qubit_index)
            throw ParseError(line, col, "control overlaps gate target");
      }
    }
    c.gates.push_back(std::move(g));
  }

  Lexer lex_;
  Token cur_;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string qubit_str(const QubitRef& q) {
  return q.reg + "[" + std::to_string(q.index) + "]";
}

}  // namespace

CircuitDesc parse(const std::string& text) {
  Parser p(text);
  return p.parse_circuit();
}

std::string serialize(const CircuitDesc& c) {
  std::ostringstream out;
  for (const auto& r : c.registers) {
    out << (r.kind == RegKind::kCounter ? "breg " : "qreg ") << r.name << "["
        << r.size << "];\n";
  }
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::kH:
        out << "h " << qubit_str(g.targets[0]);
        break;
      case GateKind::kX:
        out << "x " << qubit_str(g.targets[0]);
        break;
      case GateKind::kZ:
        out << "z " << qubit_str(g.targets[0]);
        break;
      case GateKind::kCnot:
        out << "cnot " << qubit_str(g.targets[0]) << ", "
            << qubit_str(g.targets[1]);
        break;
      case GateKind::kRy:
        out << "ry(" << fmt_double(g.params[0]) << ") "
            << qubit_str(g.targets[0]);
        break;
      case GateKind::kU2:
        out << "u2(" << fmt_double(g.params[0]) << ", "
            << fmt_double(g.params[1]) << ", " << fmt_double(g.params[2])
            << ", " << fmt_double(g.params[3]) << ") "
            << qubit_str(g.targets[0]);
        break;
      case GateKind::kIncMod:
        out << "inc_mod " << g.counter;
        break;
      case GateKind::kZeroCheck:
        out << "zero_check " << g.counter << ", " << qubit_str(g.targets[0]);
        break;
      case GateKind::kReflect0: {
        out << "reflect0 ";
        for (size_t i = 0; i < g.targets.size(); ++i) {
          if (i > 0) out << ", ";
          out << qubit_str(g.targets[i]);
        }
        break;
      }
      case GateKind::kCall: {
        out << "call " << g.call_name << (g.call_dagger ? "!" : "") << " ";
        for (size_t i = 0; i < g.call_args.size(); ++i) {
          if (i > 0) out << ", ";
          out << g.call_args[i];
        }
        break;
      }
    }
    if (!g.controls.empty()) {
      out << " ctrl ";
      for (size_t i = 0; i < g.controls.size(); ++i) {
        if (i > 0) out << ", ";
        const Control& ctl = g.controls[i];
        if (ctl.on_counter) {
          out << ctl.reg << (ctl.polarity == 1 ? ">=1" : "=0");
        } else {
          out << ctl.reg << "[" << ctl.qubit_index << "]=" << ctl.polarity;
        }
      }
    }
    out << ";\n";
  }
  return out.str();
}

namespace {

std::string qubit_factor(const std::string& reg, Index i) {
  return reg + "[" + std::to_string(i) + "]";
}

Matrix gate_matrix_1q(const Gate& g) {
  Matrix m(2, 2);
  switch (g.kind) {
    case GateKind::kH:
      m << 1, 1, 1, -1;
      m /= std::sqrt(2.0);
      break;
    case GateKind::kX:
      m << 0, 1, 1, 0;
      break;
    case GateKind::kZ:
      m << 1, 0, 0, -1;
      break;
    case GateKind::kRy: {
      const double t = g.params[0];
      m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
      break;
    }
    case GateKind::kU2: {
      // (theta, phi, lambda, global phase)
      const double t = g.params[0], ph = g.params[1], la = g.params[2],
                   ga = g.params[3];
      const Cplx i(0.0, 1.0);
      m << std::cos(t / 2), -std::exp(i * la) * std::sin(t / 2),
          std::exp(i * ph) * std::sin(t / 2),
          std::exp(i * (ph + la)) * std::cos(t / 2);
      m *= std::exp(i * ga);
      break;
    }
    default:
      throw Error("not a single-qubit gate");
  }
  return m;
}

}  // namespace

SpaceLayout natural_layout(const CircuitDesc& c) {
  std::vector<SpaceLayout::Reg> regs;
  for (const auto& r : c.registers) {
    if (r.kind == RegKind::kCounter) {
      regs.push_back({r.name, r.size});
    } else {
      for (Index i = 0; i < r.size; ++i)
        regs.push_back({qubit_factor(r.name, i), 2});
    }
  }
  return SpaceLayout(std::move(regs));
}

std::vector<EmbeddedOp> elaborate_ops(
    const CircuitDesc& c, const SpaceLayout& layout,
    const std::map<std::string, Operator>& bindings) {
  // layout must carry exactly the circuit's factors
  const SpaceLayout natural = natural_layout(c);
  if (layout.total_dim() != natural.total_dim())
    throw DimensionError("elaborate: layout does not cover the circuit");
  for (const auto& r : natural.regs()) {
    if (!layout.has(r.name) || layout.dim_of(r.name) != r.dim)
      throw DimensionError("elaborate: layout missing register " + r.name);
  }

  std::vector<EmbeddedOp> ops;
  for (const auto& g : c.gates) {
    Matrix base;
    std::vector<std::string> targets;
    switch (g.kind) {
      case GateKind::kH:
      case GateKind::kX:
      case GateKind::kZ:
      case GateKind::kRy:
      case GateKind::kU2:
        base = gate_matrix_1q(g);
        targets.push_back(qubit_factor(g.targets[0].reg, g.targets[0].index));
        break;
      case GateKind::kCnot: {
        base = Matrix::Zero(4, 4);
        base(0, 0) = base(1, 1) = base(2, 3) = base(3, 2) = 1.0;
        targets.push_back(qubit_factor(g.targets[0].reg, g.targets[0].index));
        targets.push_back(qubit_factor(g.targets[1].reg, g.targets[1].index));
        break;
      }
      case GateKind::kIncMod: {
        const RegDecl* r = c.find_register(g.counter);
        base = inc_mod(CounterRegister(r->size)).mat();
        targets.push_back(g.counter);
        break;
      }
      case GateKind::kZeroCheck: {
        const RegDecl* r = c.find_register(g.counter);
        const Index d = r->size;
        Matrix x(2, 2);
        x << 0, 1, 1, 0;
        Matrix p0 = Matrix::Zero(d, d);
        p0(0, 0) = 1.0;
        Matrix m = Matrix::Zero(2 * d, 2 * d);
        // targets (counter, qubit): X on qubit iff d == 0
        for (Index a = 0; a < d; ++a)
          for (Index qa = 0; qa < 2; ++qa)
            for (Index qb = 0; qb < 2; ++qb) {
              const double xv = (a == 0) ? std::real(x(qa, qb))
                                         : (qa == qb ? 1.0 : 0.0);
              if (xv != 0.0) m(2 * a + qa, 2 * a + qb) = xv;
            }
        base = std::move(m);
        targets.push_back(g.counter);
        targets.push_back(qubit_factor(g.targets[0].reg, g.targets[0].index));
        break;
      }
      case GateKind::kReflect0: {
        const Index n = Index(1) << g.targets.size();
        base = -Matrix::Identity(n, n);
        base(0, 0) = 1.0;
        for (const auto& t : g.targets)
          targets.push_back(qubit_factor(t.reg, t.index));
        break;
      }
      case GateKind::kCall: {
        const auto it = bindings.find(g.call_name);
        if (it == bindings.end())
          throw Error("elaborate: unbound call '" + g.call_name + "'");
        if (g.call_dagger)
          base = it->second.mat().adjoint();
        else
          base = it->second.mat();
        Index want = 1;
        for (const auto& arg : g.call_args) {
          const RegDecl* r = c.find_register(arg);
          for (Index i = 0; i < r->size; ++i)
            targets.push_back(qubit_factor(arg, i));
          want <<= r->size;
        }
        if (base.rows() != want || base.cols() != want)
          throw DimensionError("elaborate: binding '" + g.call_name +
                               "' has wrong dimension");
        break;
      }
    }

    if (!g.controls.empty()) {
      // C[U] = I + P (x) (U - I), P the product of the control projectors.
      Matrix proj = Matrix::Identity(1, 1);
      std::vector<std::string> ctl_targets;
      for (const auto& ctl : g.controls) {
        Matrix p;
        if (ctl.on_counter) {
          const Index d = c.find_register(ctl.reg)->size;
          p = Matrix::Zero(d, d);
          if (ctl.polarity == 0) {
            p(0, 0) = 1.0;
          } else {
            p = Matrix::Identity(d, d);
            p(0, 0) = 0.0;
          }
          ctl_targets.push_back(ctl.reg);
        } else {
          p = Matrix::Zero(2, 2);
          p(ctl.polarity, ctl.polarity) = 1.0;
          ctl_targets.push_back(qubit_factor(ctl.reg, ctl.qubit_index));
        }
        Matrix next(proj.rows() * p.rows(), proj.cols() * p.cols());
        for (Index r = 0; r < proj.rows(); ++r)
          for (Index cc = 0; cc < proj.cols(); ++cc)
            next.block(r * p.rows(), cc * p.cols(), p.rows(), p.cols()) =
                proj(r, cc) * p;
        proj = std::move(next);
      }
      const Index nb = base.rows();
      const Index np = proj.rows();
      Matrix full = Matrix::Identity(np * nb, np * nb);
      const Matrix delta = base - Matrix::Identity(nb, nb);
      for (Index r = 0; r < np; ++r)
        for (Index cc = 0; cc < np; ++cc)
          if (proj(r, cc) != Cplx(0.0, 0.0))
            full.block(r * nb, cc * nb, nb, nb) += proj(r, cc) * delta;
      base = std::move(full);
      ctl_targets.insert(ctl_targets.end(), targets.begin(), targets.end());
      targets = std::move(ctl_targets);
    }

    ops.push_back({Operator::unitary(std::move(base)), std::move(targets)});
  }
  return ops;
}

Operator elaborate(const CircuitDesc& c, const SpaceLayout& layout,
                   const std::map<std::string, Operator>& bindings) {
  const std::vector<EmbeddedOp> ops = elaborate_ops(c, layout, bindings);
  return Operator::unitary(compose_circuit(ops, layout));
}

}  // namespace qvlab
