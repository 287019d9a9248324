// Copyright 2026 The snakecr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "snakecr/parser.hpp"

#include <cctype>
#include <cmath>

namespace snakecr {

namespace {

using Node = std::unique_ptr<ExprNode>;

Node MakeNode(ExprNode::Kind kind, std::size_t pos) {
  auto n = std::make_unique<ExprNode>();
  n->kind = kind;
  n->position = pos;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Node Run() {
    Node n = Expr();
    SkipSpace();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return n;
  }

 private:
  void SkipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool Accept(char c) {
    SkipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void Expect(char c) {
    if (!Accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Node Expr() {
    Node lhs = Term();
    while (true) {
      SkipSpace();
      std::size_t at = pos_;
      if (Accept('+')) {
        auto n = MakeNode(ExprNode::Kind::kAdd, at);
        n->children.push_back(std::move(lhs));
        n->children.push_back(Term());
        lhs = std::move(n);
      } else if (Accept('-')) {
        auto n = MakeNode(ExprNode::Kind::kSub, at);
        n->children.push_back(std::move(lhs));
        n->children.push_back(Term());
        lhs = std::move(n);
      } else {
        return lhs;
      }
    }
  }

  Node Term() {
    Node lhs = Unary();
    while (true) {
      SkipSpace();
      std::size_t at = pos_;
      ExprNode::Kind kind;
      if (Accept('*')) {
        kind = ExprNode::Kind::kMul;
      } else if (Accept('/')) {
        kind = ExprNode::Kind::kDiv;
      } else {
        return lhs;
      }
      auto n = MakeNode(kind, at);
      n->children.push_back(std::move(lhs));
      n->children.push_back(Unary());
      lhs = std::move(n);
    }
  }

  Node Unary() {
    SkipSpace();
    std::size_t at = pos_;
    if (Accept('-')) {
      auto n = MakeNode(ExprNode::Kind::kNeg, at);
      n->children.push_back(Unary());
      return n;
    }
    if (Accept('+')) return Unary();
    return Power();
  }

  Node Power() {
    Node base = Primary();
    SkipSpace();
    std::size_t at = pos_;
    if (!Accept('^')) return base;
    SkipSpace();
    bool negative = Accept('-');
    SkipSpace();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      throw ParseError("exponent must be an integer literal", pos_);
    }
    long e = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      e = e * 10 + (text_[pos_++] - '0');
      if (e > 1000) throw ParseError("exponent too large", at);
    }
    auto n = MakeNode(ExprNode::Kind::kPow, at);
    n->exponent = negative ? -static_cast<int>(e) : static_cast<int>(e);
    n->children.push_back(std::move(base));
    return n;
  }

  Node Primary() {
    SkipSpace();
    std::size_t at = pos_;
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Node n = Expr();
      Expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      auto n = MakeNode(ExprNode::Kind::kNumber, at);
      n->number = mpz_class(std::string(text_.substr(start, pos_ - start)));
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      if (name == "sin" || name == "cos") {
        auto n = MakeNode(name == "sin" ? ExprNode::Kind::kSin : ExprNode::Kind::kCos, at);
        Expect('(');
        n->children.push_back(Expr());
        Expect(')');
        return n;
      }
      if (name != "s1" && name != "s2" && name != "s3" && !VarFromName(name)) {
        throw ParseError("unknown symbol '" + name + "'", at);
      }
      auto n = MakeNode(ExprNode::Kind::kSymbol, at);
      n->symbol = name;
      return n;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", at);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int ParamIndex(const std::string& s) {
  if (s == "s1") return 0;
  if (s == "s2") return 1;
  if (s == "s3") return 2;
  return -1;
}

// Integer-linear combination of angle variables, or throws.
std::array<int16_t, kNumAngles> LinearAngles(const ExprNode& n) {
  using K = ExprNode::Kind;
  auto scale = [](std::array<int16_t, kNumAngles> f, long c) {
    for (auto& v : f) v = static_cast<int16_t>(v * c);
    return f;
  };
  switch (n.kind) {
    case K::kSymbol: {
      auto v = VarFromName(n.symbol);
      if (!v || !IsAngle(*v)) throw ParseError("trig argument must be linear in angle variables", n.position);
      return TrigExpr::UnitFreq(*v);
    }
    case K::kNeg:
      return scale(LinearAngles(*n.children[0]), -1);
    case K::kAdd:
    case K::kSub: {
      auto a = LinearAngles(*n.children[0]);
      auto b = LinearAngles(*n.children[1]);
      const int s = n.kind == K::kAdd ? 1 : -1;
      for (int k = 0; k < kNumAngles; ++k) a[k] = static_cast<int16_t>(a[k] + s * b[k]);
      return a;
    }
    case K::kMul: {
      const ExprNode* num = nullptr;
      const ExprNode* other = nullptr;
      if (n.children[0]->kind == K::kNumber) {
        num = n.children[0].get();
        other = n.children[1].get();
      } else if (n.children[1]->kind == K::kNumber) {
        num = n.children[1].get();
        other = n.children[0].get();
      } else {
        throw ParseError("trig argument must be linear in angle variables", n.position);
      }
      if (!num->number.fits_slong_p() || abs(num->number) > 1000) throw ParseError("frequency too large", num->position);
      return scale(LinearAngles(*other), num->number.get_si());
    }
    default:
      throw ParseError("trig argument must be an integer-linear combination of angle variables", n.position);
  }
}

}  // namespace

std::unique_ptr<ExprNode> ParseTree(std::string_view text) { return Parser(text).Run(); }

TrigExpr Lower(const ExprNode& n) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::kNumber:
      return TrigExpr(ParamField(mpq_class(n.number)));
    case K::kSymbol: {
      const int p = ParamIndex(n.symbol);
      if (p >= 0) return TrigExpr(ParamField::Param(p));
      Var v = *VarFromName(n.symbol);
      if (IsAngle(v)) throw ParseError("angle variable '" + n.symbol + "' outside sin/cos", n.position);
      return TrigExpr::Variable(v);
    }
    case K::kNeg:
      return -Lower(*n.children[0]);
    case K::kAdd:
      return Lower(*n.children[0]) + Lower(*n.children[1]);
    case K::kSub:
      return Lower(*n.children[0]) - Lower(*n.children[1]);
    case K::kMul:
      return Lower(*n.children[0]) * Lower(*n.children[1]);
    case K::kDiv: {
      TrigExpr d = Lower(*n.children[1]);
      auto p = d.AsParam();
      if (!p) throw ParseError("division by an expression that is not a pure parameter function", n.position);
      if (p->IsZero()) throw ParseError("division by zero", n.position);
      return Lower(*n.children[0]).Scaled(p->Inverse());
    }
    case K::kPow: {
      TrigExpr b = Lower(*n.children[0]);
      if (n.exponent >= 0) return b.Pow(n.exponent);
      auto p = b.AsParam();
      if (!p) throw ParseError("negative power of an expression that is not a pure parameter function", n.position);
      if (p->IsZero()) throw ParseError("negative power of zero", n.position);
      return TrigExpr(p->Pow(n.exponent));
    }
    case K::kSin:
      return TrigExpr::Sin(LinearAngles(*n.children[0]));
    case K::kCos:
      return TrigExpr::Cos(LinearAngles(*n.children[0]));
  }
  return {};
}

double EvalTree(const ExprNode& n, const NumericPoint& p) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::kNumber:
      return n.number.get_d();
    case K::kSymbol: {
      const int i = ParamIndex(n.symbol);
      if (i >= 0) {
        if (!((p.param_mask >> i) & 1u)) throw std::invalid_argument("unassigned parameter " + n.symbol);
        return p.params[i];
      }
      Var v = *VarFromName(n.symbol);
      if (!p.Has(v)) throw std::invalid_argument("unassigned variable " + n.symbol);
      return p.Get(v);
    }
    case K::kNeg:
      return -EvalTree(*n.children[0], p);
    case K::kAdd:
      return EvalTree(*n.children[0], p) + EvalTree(*n.children[1], p);
    case K::kSub:
      return EvalTree(*n.children[0], p) - EvalTree(*n.children[1], p);
    case K::kMul:
      return EvalTree(*n.children[0], p) * EvalTree(*n.children[1], p);
    case K::kDiv:
      return EvalTree(*n.children[0], p) / EvalTree(*n.children[1], p);
    case K::kPow:
      return std::pow(EvalTree(*n.children[0], p), n.exponent);
    case K::kSin:
      return std::sin(EvalTree(*n.children[0], p));
    case K::kCos:
      return std::cos(EvalTree(*n.children[0], p));
  }
  return 0.0;
}

TrigExpr Parse(std::string_view text) { return Lower(*ParseTree(text)); }

ParamField ParseParam(std::string_view text) {
  TrigExpr e = Parse(text);
  auto p = e.AsParam();
  if (!p) throw ParseError("expected a parameter expression", 0);
  return *p;
}

}  // namespace snakecr
