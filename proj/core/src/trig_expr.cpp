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

#include "snakecr/trig_expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace snakecr {

namespace {

constexpr const char* kVarNames[kNumVars] = {"x",  "y",  "x1",    "x2",  "x3",  "x4",    "y1",    "y2",
                                             "y3", "y4", "theta", "phi", "psi", "beta1", "beta2", "beta3"};

bool IsZeroFreq(const std::array<int16_t, kNumAngles>& f) {
  return std::all_of(f.begin(), f.end(), [](int16_t v) { return v == 0; });
}

// Folds the sign of the frequency vector into the coefficient.  Returns false
// when the term vanishes (sin of zero).
bool CanonicalizeTerm(TermKey& key, ParamField& coeff) {
  for (int k = 0; k < kNumAngles; ++k) {
    if (key.freq[k] == 0) continue;
    if (key.freq[k] < 0) {
      for (auto& f : key.freq) f = static_cast<int16_t>(-f);
      if (key.kind == TrigKind::kSin) coeff = -coeff;
    }
    return !coeff.IsZero();
  }
  if (key.kind == TrigKind::kSin) return false;
  return !coeff.IsZero();
}

std::vector<TrigExpr::Term> Merge(std::vector<TrigExpr::Term> raw) {
  std::vector<TrigExpr::Term> canon;
  canon.reserve(raw.size());
  for (auto& t : raw) {
    if (CanonicalizeTerm(t.first, t.second)) canon.push_back(std::move(t));
  }
  std::sort(canon.begin(), canon.end(),
            [](const TrigExpr::Term& a, const TrigExpr::Term& b) { return a.first < b.first; });
  std::vector<TrigExpr::Term> out;
  out.reserve(canon.size());
  for (auto& t : canon) {
    if (!out.empty() && out.back().first == t.first) {
      out.back().second += t.second;
      if (out.back().second.IsZero()) out.pop_back();
    } else {
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::array<int16_t, kNumAngles> AddFreq(const std::array<int16_t, kNumAngles>& a,
                                        const std::array<int16_t, kNumAngles>& b, int sign) {
  std::array<int16_t, kNumAngles> r{};
  for (int k = 0; k < kNumAngles; ++k) r[k] = static_cast<int16_t>(a[k] + sign * b[k]);
  return r;
}

void MultiplyTerms(const TrigExpr::Term& s, const TrigExpr::Term& t, std::vector<TrigExpr::Term>& out) {
  TermKey base;
  for (int k = 0; k < kNumCartesian; ++k) base.cart[k] = static_cast<uint8_t>(s.first.cart[k] + t.first.cart[k]);
  ParamField c = s.second * t.second;
  if (IsZeroFreq(s.first.freq) || IsZeroFreq(t.first.freq)) {
    const TermKey& trig = IsZeroFreq(s.first.freq) ? t.first : s.first;
    base.freq = trig.freq;
    base.kind = trig.kind;
    out.emplace_back(base, std::move(c));
    return;
  }
  static const ParamField kHalf = ParamField::Rational(1, 2);
  ParamField h = c * kHalf;
  TermKey diff = base;
  TermKey sum = base;
  diff.freq = AddFreq(s.first.freq, t.first.freq, -1);
  sum.freq = AddFreq(s.first.freq, t.first.freq, +1);
  const TrigKind ks = s.first.kind;
  const TrigKind kt = t.first.kind;
  if (ks == TrigKind::kCos && kt == TrigKind::kCos) {
    diff.kind = sum.kind = TrigKind::kCos;
    out.emplace_back(diff, h);
    out.emplace_back(sum, h);
  } else if (ks == TrigKind::kSin && kt == TrigKind::kSin) {
    diff.kind = sum.kind = TrigKind::kCos;
    out.emplace_back(diff, h);
    out.emplace_back(sum, -h);
  } else if (ks == TrigKind::kSin) {
    diff.kind = sum.kind = TrigKind::kSin;
    out.emplace_back(sum, h);
    out.emplace_back(diff, h);
  } else {
    diff.kind = sum.kind = TrigKind::kSin;
    out.emplace_back(sum, h);
    out.emplace_back(diff, -h);
  }
}

}  // namespace

const char* VarName(Var v) { return kVarNames[static_cast<int>(v)]; }

std::optional<Var> VarFromName(std::string_view name) {
  for (int i = 0; i < kNumVars; ++i) {
    if (name == kVarNames[i]) return static_cast<Var>(i);
  }
  return std::nullopt;
}

TrigExpr::TrigExpr(const ParamField& c) {
  if (!c.IsZero()) terms_.emplace_back(TermKey{}, c);
}

std::array<int16_t, kNumAngles> TrigExpr::UnitFreq(Var angle) {
  if (!IsAngle(angle)) throw std::invalid_argument("not an angle variable");
  std::array<int16_t, kNumAngles> f{};
  f[AngleIndex(angle)] = 1;
  return f;
}

TrigExpr TrigExpr::Variable(Var v) {
  if (IsAngle(v)) throw std::invalid_argument("angle variables appear only inside sin/cos");
  TermKey k;
  k.cart[CartIndex(v)] = 1;
  return FromTerms({{k, ParamField(1)}});
}

TrigExpr TrigExpr::Cos(const std::array<int16_t, kNumAngles>& freq) {
  TermKey k;
  k.freq = freq;
  k.kind = TrigKind::kCos;
  return FromTerms({{k, ParamField(1)}});
}

TrigExpr TrigExpr::Sin(const std::array<int16_t, kNumAngles>& freq) {
  TermKey k;
  k.freq = freq;
  k.kind = TrigKind::kSin;
  return FromTerms({{k, ParamField(1)}});
}

TrigExpr TrigExpr::FromTerms(std::vector<Term> terms) {
  TrigExpr e;
  e.terms_ = Merge(std::move(terms));
  return e;
}

std::optional<ParamField> TrigExpr::AsParam() const {
  if (terms_.empty()) return ParamField();
  if (terms_.size() == 1 && terms_[0].first == TermKey{}) return terms_[0].second;
  return std::nullopt;
}

bool TrigExpr::UsesVar(Var v) const {
  for (const auto& [k, c] : terms_) {
    if (IsAngle(v) ? k.freq[AngleIndex(v)] != 0 : k.cart[CartIndex(v)] != 0) return true;
  }
  return false;
}

TrigExpr TrigExpr::operator-() const {
  TrigExpr r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

TrigExpr operator+(const TrigExpr& a, const TrigExpr& b) {
  if (a.IsZero()) return b;
  if (b.IsZero()) return a;
  TrigExpr r;
  r.terms_.reserve(a.terms_.size() + b.terms_.size());
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
      r.terms_.push_back(*i++);
    } else if (i == a.terms_.end() || j->first < i->first) {
      r.terms_.push_back(*j++);
    } else {
      ParamField c = i->second + j->second;
      if (!c.IsZero()) r.terms_.emplace_back(i->first, std::move(c));
      ++i;
      ++j;
    }
  }
  return r;
}

TrigExpr operator-(const TrigExpr& a, const TrigExpr& b) { return a + (-b); }

TrigExpr operator*(const TrigExpr& a, const TrigExpr& b) {
  if (a.IsZero() || b.IsZero()) return TrigExpr();
  std::vector<TrigExpr::Term> raw;
  raw.reserve(2 * a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) MultiplyTerms(s, t, raw);
  }
  return TrigExpr::FromTerms(std::move(raw));
}

TrigExpr TrigExpr::Scaled(const ParamField& c) const {
  if (c.IsZero()) return TrigExpr();
  TrigExpr r = *this;
  for (auto& t : r.terms_) t.second = t.second * c;
  return r;
}

TrigExpr TrigExpr::Pow(int n) const {
  if (n < 0) throw std::invalid_argument("negative power of TrigExpr");
  TrigExpr r(1);
  TrigExpr base = *this;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

TrigExpr TrigExpr::Differentiate(Var v) const {
  std::vector<Term> raw;
  raw.reserve(terms_.size());
  for (const auto& [k, c] : terms_) {
    if (IsAngle(v)) {
      const int f = k.freq[AngleIndex(v)];
      if (f == 0) continue;
      TermKey nk = k;
      if (k.kind == TrigKind::kCos) {
        nk.kind = TrigKind::kSin;
        raw.emplace_back(nk, c * ParamField(-f));
      } else {
        nk.kind = TrigKind::kCos;
        raw.emplace_back(nk, c * ParamField(f));
      }
    } else {
      const int e = k.cart[CartIndex(v)];
      if (e == 0) continue;
      TermKey nk = k;
      nk.cart[CartIndex(v)] = static_cast<uint8_t>(e - 1);
      raw.emplace_back(nk, c * ParamField(e));
    }
  }
  return FromTerms(std::move(raw));
}

TrigExpr TrigExpr::Substitute(const Substitution& s) const {
  std::map<std::pair<int, int>, TrigExpr> power_cache;
  auto power = [&](int cart, int e) -> const TrigExpr& {
    auto key = std::make_pair(cart, e);
    auto it = power_cache.find(key);
    if (it != power_cache.end()) return it->second;
    const Var v = static_cast<Var>(cart);
    auto sub = s.cartesian.find(v);
    TrigExpr base = sub != s.cartesian.end() ? sub->second : TrigExpr::Variable(v);
    return power_cache.emplace(key, base.Pow(e)).first->second;
  };
  TrigExpr acc;
  std::vector<Term> plain;
  for (const auto& [k, c] : terms_) {
    std::array<int16_t, kNumAngles> freq{};
    int quarter = 0;
    for (int a = 0; a < kNumAngles; ++a) {
      if (k.freq[a] == 0) continue;
      auto sub = s.angles.find(AngleVar(a));
      if (sub == s.angles.end()) {
        freq[a] = static_cast<int16_t>(freq[a] + k.freq[a]);
      } else {
        for (int b = 0; b < kNumAngles; ++b) freq[b] = static_cast<int16_t>(freq[b] + k.freq[a] * sub->second.coeff[b]);
        quarter += k.freq[a] * sub->second.quarter_turns;
      }
    }
    quarter = ((quarter % 4) + 4) % 4;
    TermKey trig;
    trig.freq = freq;
    ParamField coeff = c;
    if (k.kind == TrigKind::kCos) {
      static constexpr TrigKind kKinds[4] = {TrigKind::kCos, TrigKind::kSin, TrigKind::kCos, TrigKind::kSin};
      static constexpr int kSigns[4] = {1, -1, -1, 1};
      trig.kind = kKinds[quarter];
      if (kSigns[quarter] < 0) coeff = -coeff;
    } else {
      static constexpr TrigKind kKinds[4] = {TrigKind::kSin, TrigKind::kCos, TrigKind::kSin, TrigKind::kCos};
      static constexpr int kSigns[4] = {1, 1, -1, -1};
      trig.kind = kKinds[quarter];
      if (kSigns[quarter] < 0) coeff = -coeff;
    }
    bool touched = false;
    TrigExpr factor;
    for (int v = 0; v < kNumCartesian; ++v) {
      if (k.cart[v] == 0) continue;
      if (s.cartesian.count(static_cast<Var>(v)) == 0) {
        trig.cart[v] = k.cart[v];
        continue;
      }
      factor = touched ? factor * power(v, k.cart[v]) : power(v, k.cart[v]);
      touched = true;
    }
    if (!touched) {
      plain.emplace_back(trig, coeff);
    } else {
      acc += factor * TrigExpr::FromTerms({{trig, coeff}});
    }
  }
  return acc + FromTerms(std::move(plain));
}

TrigExpr TrigExpr::SpecializeParams(const std::array<std::optional<mpq_class>, kNumParams>& values) const {
  std::vector<Term> raw;
  raw.reserve(terms_.size());
  for (const auto& [k, c] : terms_) raw.emplace_back(k, c.Specialize(values));
  return FromTerms(std::move(raw));
}

double TrigExpr::Eval(const NumericPoint& p) const {
  double acc = 0.0;
  for (const auto& [k, c] : terms_) {
    for (int i = 0; i < kNumParams; ++i) {
      if (c.UsesParam(i) && !((p.param_mask >> i) & 1u)) {
        throw std::invalid_argument(std::string("unassigned parameter ") + ParamName(i));
      }
    }
    double v = c.Eval(p.params);
    for (int i = 0; i < kNumCartesian; ++i) {
      if (k.cart[i] == 0) continue;
      if (!p.Has(static_cast<Var>(i))) throw std::invalid_argument(std::string("unassigned variable ") + kVarNames[i]);
      v *= std::pow(p.vars[i], k.cart[i]);
    }
    double arg = 0.0;
    for (int a = 0; a < kNumAngles; ++a) {
      if (k.freq[a] == 0) continue;
      if (!p.Has(AngleVar(a))) throw std::invalid_argument(std::string("unassigned variable ") + kVarNames[a + kNumCartesian]);
      arg += k.freq[a] * p.vars[a + kNumCartesian];
    }
    v *= k.kind == TrigKind::kCos ? std::cos(arg) : std::sin(arg);
    acc += v;
  }
  return acc;
}

std::string TrigExpr::ToString() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    std::vector<std::string> factors;
    for (int i = 0; i < kNumCartesian; ++i) {
      if (k.cart[i] == 0) continue;
      std::string f = kVarNames[i];
      if (k.cart[i] > 1) f += "^" + std::to_string(k.cart[i]);
      factors.push_back(f);
    }
    if (!IsZeroFreq(k.freq)) {
      std::string arg;
      for (int a = 0; a < kNumAngles; ++a) {
        const int f = k.freq[a];
        if (f == 0) continue;
        if (f < 0) {
          arg += "-";
        } else if (!arg.empty()) {
          arg += "+";
        }
        if (std::abs(f) != 1) arg += std::to_string(std::abs(f)) + "*";
        arg += kVarNames[a + kNumCartesian];
      }
      factors.push_back(std::string(k.kind == TrigKind::kCos ? "cos(" : "sin(") + arg + ")");
    }
    std::string term;
    if (factors.empty()) {
      term = c.ToString();
    } else {
      std::string body;
      for (std::size_t i = 0; i < factors.size(); ++i) body += (i ? "*" : "") + factors[i];
      if (c.IsOne()) {
        term = body;
      } else if ((-c).IsOne()) {
        term = "-" + body;
      } else if (c.NeedsParens()) {
        term = "(" + c.ToString() + ")*" + body;
      } else {
        term = c.ToString() + "*" + body;
      }
    }
    if (!first && term[0] != '-') os << "+";
    os << term;
    first = false;
  }
  return os.str();
}

TrigExpr Combine(const TrigExpr& a, const TrigExpr& b, CombineOp op) {
  switch (op) {
    case CombineOp::kAdd:
      return a + b;
    case CombineOp::kSub:
      return a - b;
    case CombineOp::kMul:
      return a * b;
  }
  return {};
}

}  // namespace snakecr
