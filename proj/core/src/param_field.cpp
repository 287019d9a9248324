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

#include "snakecr/param_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace snakecr {

namespace {

ParamExp AddExp(const ParamExp& a, const ParamExp& b) {
  return {static_cast<uint16_t>(a[0] + b[0]), static_cast<uint16_t>(a[1] + b[1]),
          static_cast<uint16_t>(a[2] + b[2])};
}

bool Divides(const ParamExp& a, const ParamExp& b) {
  return a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2];
}

ParamExp SubExp(const ParamExp& b, const ParamExp& a) {
  return {static_cast<uint16_t>(b[0] - a[0]), static_cast<uint16_t>(b[1] - a[1]),
          static_cast<uint16_t>(b[2] - a[2])};
}

// Sorts and merges equal exponents, dropping zeros.
std::vector<Poly::Term> Canonical(std::vector<Poly::Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Poly::Term& a, const Poly::Term& b) { return a.first < b.first; });
  std::vector<Poly::Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && out.back().first == t.first) {
      out.back().second += t.second;
    } else {
      if (!out.empty() && out.back().second == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().second == 0) out.pop_back();
  return out;
}

}  // namespace

class PolyBuilder {
 public:
  static Poly Make(std::vector<Poly::Term> terms) {
    Poly p;
    p.terms_ = Canonical(std::move(terms));
    return p;
  }
  static Poly MakeSorted(std::vector<Poly::Term> terms) {
    Poly p;
    p.terms_ = std::move(terms);
    return p;
  }
};

const char* ParamName(int index) {
  static const char* kNames[] = {"s1", "s2", "s3"};
  return kNames[index];
}

Poly::Poly(const mpz_class& c) {
  if (c != 0) terms_.emplace_back(ParamExp{0, 0, 0}, c);
}

Poly Poly::Monomial(const ParamExp& e, const mpz_class& c) {
  Poly p;
  if (c != 0) p.terms_.emplace_back(e, c);
  return p;
}

Poly Poly::Param(int index) {
  ParamExp e{0, 0, 0};
  e[index] = 1;
  return Monomial(e, 1);
}

bool Poly::IsConstant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first == ParamExp{0, 0, 0});
}

mpz_class Poly::ConstantValue() const { return terms_.empty() ? mpz_class(0) : terms_[0].second; }

int Poly::Degree(int var) const {
  int d = 0;
  for (const auto& t : terms_) d = std::max<int>(d, t.first[var]);
  return d;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& t : p.terms_) t.second = -t.second;
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  std::vector<Poly::Term> out;
  out.reserve(a.terms_.size() + b.terms_.size());
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.terms_.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      mpz_class c = i->second + j->second;
      if (c != 0) out.emplace_back(i->first, std::move(c));
      ++i;
      ++j;
    }
  }
  return PolyBuilder::MakeSorted(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.IsZero() || b.IsZero()) return Poly();
  std::vector<Poly::Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) out.emplace_back(AddExp(s.first, t.first), s.second * t.second);
  }
  return PolyBuilder::Make(std::move(out));
}

Poly Poly::Scaled(const mpz_class& c) const {
  if (c == 0) return Poly();
  Poly p = *this;
  for (auto& t : p.terms_) t.second *= c;
  return p;
}

std::vector<Poly> Poly::CoefficientsIn(int var) const {
  std::vector<std::vector<Term>> buckets(Degree(var) + 1);
  for (const auto& t : terms_) {
    ParamExp e = t.first;
    int d = e[var];
    e[var] = 0;
    buckets[d].emplace_back(e, t.second);
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(PolyBuilder::Make(std::move(b)));
  return out;
}

Poly Poly::FromCoefficients(int var, const std::vector<Poly>& coeffs) {
  std::vector<Term> out;
  for (std::size_t d = 0; d < coeffs.size(); ++d) {
    for (const auto& t : coeffs[d].terms_) {
      ParamExp e = t.first;
      e[var] = static_cast<uint16_t>(e[var] + d);
      out.emplace_back(e, t.second);
    }
  }
  return PolyBuilder::Make(std::move(out));
}

mpz_class Poly::IntegerContent() const {
  mpz_class g = 0;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

double Poly::Eval(const std::array<double, kNumParams>& s) const {
  double acc = 0.0;
  for (const auto& t : terms_) {
    double v = t.second.get_d();
    for (int k = 0; k < kNumParams; ++k) v *= std::pow(s[k], t.first[k]);
    acc += v;
  }
  return acc;
}

mpq_class Poly::EvalExact(const std::array<mpq_class, kNumParams>& s) const {
  mpq_class acc = 0;
  for (const auto& t : terms_) {
    mpq_class v = t.second;
    for (int k = 0; k < kNumParams; ++k) {
      for (int e = 0; e < t.first[k]; ++e) v *= s[k];
    }
    acc += v;
  }
  return acc;
}

std::string Poly::ToString() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    bool is_const = e == ParamExp{0, 0, 0};
    mpz_class mag = abs(c);
    if (c < 0) {
      os << "-";
    } else if (!first) {
      os << "+";
    }
    first = false;
    bool need_star = false;
    if (mag != 1 || is_const) {
      os << mag.get_str();
      need_star = true;
    }
    for (int k = 0; k < kNumParams; ++k) {
      if (e[k] == 0) continue;
      if (need_star) os << "*";
      os << ParamName(k);
      if (e[k] > 1) os << "^" << e[k];
      need_star = true;
    }
  }
  return os.str();
}

Poly ExactDivide(const Poly& a, const Poly& b) {
  if (b.IsZero()) throw std::domain_error("polynomial division by zero");
  if (b.IsConstant()) {
    const mpz_class c = b.ConstantValue();
    std::vector<Poly::Term> out = a.terms();
    for (auto& t : out) {
      if (!mpz_divisible_p(t.second.get_mpz_t(), c.get_mpz_t())) {
        throw std::domain_error("inexact polynomial division");
      }
      mpz_divexact(t.second.get_mpz_t(), t.second.get_mpz_t(), c.get_mpz_t());
    }
    return PolyBuilder::MakeSorted(std::move(out));
  }
  Poly r = a;
  std::vector<Poly::Term> q;
  const auto& lb = b.Leading();
  while (!r.IsZero()) {
    const auto& lr = r.Leading();
    if (!Divides(lb.first, lr.first) || !mpz_divisible_p(lr.second.get_mpz_t(), lb.second.get_mpz_t())) {
      throw std::domain_error("inexact polynomial division");
    }
    mpz_class c;
    mpz_divexact(c.get_mpz_t(), lr.second.get_mpz_t(), lb.second.get_mpz_t());
    Poly t = Poly::Monomial(SubExp(lr.first, lb.first), c);
    q.emplace_back(SubExp(lr.first, lb.first), c);
    r = r - t * b;
  }
  return PolyBuilder::Make(std::move(q));
}

namespace {

Poly PositiveLeading(Poly p) {
  if (!p.IsZero() && p.Leading().second < 0) return -p;
  return p;
}

// gcd with a single-term polynomial.
Poly GcdWithMonomial(const Poly& mono, const Poly& p) {
  ParamExp e = mono.terms()[0].first;
  mpz_class g = abs(mono.terms()[0].second);
  for (const auto& t : p.terms()) {
    for (int k = 0; k < kNumParams; ++k) e[k] = std::min(e[k], t.first[k]);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_mpz_t());
  }
  return Poly::Monomial(e, g);
}

int MainVar(const Poly& a, const Poly& b) {
  for (int k = kNumParams - 1; k >= 0; --k) {
    if (a.Uses(k) || b.Uses(k)) return k;
  }
  return -1;
}

Poly ContentIn(const Poly& p, int var) {
  Poly g;
  for (const auto& c : p.CoefficientsIn(var)) {
    if (c.IsZero()) continue;
    g = Gcd(g, c);
    if (g.IsConstant() && g.ConstantValue() == 1) break;
  }
  return g;
}

void Trim(std::vector<Poly>& c) {
  while (!c.empty() && c.back().IsZero()) c.pop_back();
}

// Lazy pseudo-remainder of a by b in var (coefficient vectors).
std::vector<Poly> PseudoRemainder(std::vector<Poly> a, const std::vector<Poly>& b) {
  const std::size_t db = b.size() - 1;
  const Poly& lb = b.back();
  Trim(a);
  while (!a.empty() && a.size() - 1 >= db) {
    const std::size_t shift = a.size() - 1 - db;
    Poly la = a.back();
    for (auto& c : a) c = c * lb;
    for (std::size_t i = 0; i <= db; ++i) a[i + shift] = a[i + shift] - la * b[i];
    Trim(a);
  }
  return a;
}

}  // namespace

Poly Gcd(const Poly& a, const Poly& b) {
  if (a.IsZero()) return PositiveLeading(b);
  if (b.IsZero()) return PositiveLeading(a);
  if (a.IsConstant() && b.IsConstant()) {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), a.ConstantValue().get_mpz_t(), b.ConstantValue().get_mpz_t());
    return Poly(g);
  }
  if (a.terms().size() == 1) return GcdWithMonomial(a, b);
  if (b.terms().size() == 1) return GcdWithMonomial(b, a);
  const int v = MainVar(a, b);
  if (!a.Uses(v)) return Gcd(a, ContentIn(b, v));
  if (!b.Uses(v)) return Gcd(ContentIn(a, v), b);
  Poly ca = ContentIn(a, v);
  Poly cb = ContentIn(b, v);
  Poly content = Gcd(ca, cb);
  std::vector<Poly> pa = ExactDivide(a, ca).CoefficientsIn(v);
  std::vector<Poly> pb = ExactDivide(b, cb).CoefficientsIn(v);
  if (pa.size() < pb.size()) std::swap(pa, pb);
  while (true) {
    std::vector<Poly> r = PseudoRemainder(pa, pb);
    if (r.empty()) break;
    if (r.size() == 1) {
      pb = {Poly(1)};
      break;
    }
    Poly rp = Poly::FromCoefficients(v, r);
    rp = ExactDivide(rp, ContentIn(rp, v));
    pa = std::move(pb);
    pb = rp.CoefficientsIn(v);
  }
  Poly g = Poly::FromCoefficients(v, pb);
  g = ExactDivide(g, ContentIn(g, v));
  return PositiveLeading(g * content);
}

ParamField::ParamField(const mpq_class& q) {
  mpq_class c(q);
  c.canonicalize();
  num_ = Poly(c.get_num());
  den_ = Poly(c.get_den());
}

ParamField::ParamField(const Poly& num, const Poly& den) : num_(num), den_(den) { Normalize(); }

ParamField ParamField::Param(int index) { return ParamField(Poly::Param(index), Poly(1)); }

ParamField ParamField::Rational(long p, long q) { return ParamField(mpq_class(p, q)); }

void ParamField::Normalize() {
  if (den_.IsZero()) throw std::domain_error("ParamField with zero denominator");
  if (num_.IsZero()) {
    den_ = Poly(1);
    return;
  }
  if (num_.IsConstant() && den_.IsConstant()) {
    mpq_class q(num_.ConstantValue(), den_.ConstantValue());
    q.canonicalize();
    num_ = Poly(q.get_num());
    den_ = Poly(q.get_den());
    return;
  }
  Poly g = Gcd(num_, den_);
  if (!(g.IsConstant() && g.ConstantValue() == 1)) {
    num_ = ExactDivide(num_, g);
    den_ = ExactDivide(den_, g);
  }
  if (den_.Leading().second < 0) {
    num_ = -num_;
    den_ = -den_;
  }
}

bool ParamField::IsOne() const {
  return num_.IsConstant() && den_.IsConstant() && num_.ConstantValue() == 1 && den_.ConstantValue() == 1;
}

mpq_class ParamField::ConstantValue() const {
  mpq_class q(num_.ConstantValue(), den_.ConstantValue());
  q.canonicalize();
  return q;
}

ParamField ParamField::operator-() const {
  ParamField r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

ParamField operator+(const ParamField& a, const ParamField& b) {
  if (a.IsZero()) return b;
  if (b.IsZero()) return a;
  if (a.IsConstant() && b.IsConstant()) return ParamField(mpq_class(a.ConstantValue() + b.ConstantValue()));
  if (a.den_ == b.den_) return ParamField(a.num_ + b.num_, a.den_);
  return ParamField(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

ParamField operator-(const ParamField& a, const ParamField& b) { return a + (-b); }

ParamField operator*(const ParamField& a, const ParamField& b) {
  if (a.IsZero() || b.IsZero()) return ParamField();
  if (a.IsConstant() && b.IsConstant()) return ParamField(mpq_class(a.ConstantValue() * b.ConstantValue()));
  return ParamField(a.num_ * b.num_, a.den_ * b.den_);
}

ParamField ParamField::Inverse() const {
  if (IsZero()) throw std::domain_error("inverse of zero ParamField");
  return ParamField(den_, num_);
}

ParamField operator/(const ParamField& a, const ParamField& b) { return a * b.Inverse(); }

ParamField ParamField::Pow(int n) const {
  if (n < 0) return Inverse().Pow(-n);
  ParamField r(1);
  for (int i = 0; i < n; ++i) r *= *this;
  return r;
}

double ParamField::Eval(const std::array<double, kNumParams>& s) const {
  const double d = den_.Eval(s);
  if (std::abs(d) <= 1e-12) throw std::domain_error("denominator underflow in ParamField evaluation");
  return num_.Eval(s) / d;
}

ParamField ParamField::Specialize(const std::array<std::optional<mpq_class>, kNumParams>& values) const {
  auto sub = [&](const Poly& p) {
    ParamField acc;
    for (const auto& [e, c] : p.terms()) {
      ParamField term{mpq_class(c)};
      for (int k = 0; k < kNumParams; ++k) {
        if (e[k] == 0) continue;
        ParamField base = values[k] ? ParamField(*values[k]) : ParamField::Param(k);
        term *= base.Pow(e[k]);
      }
      acc += term;
    }
    return acc;
  };
  return sub(num_) / sub(den_);
}

bool ParamField::NeedsParens() const {
  return den_.IsConstant() && den_.ConstantValue() == 1 && num_.terms().size() > 1;
}

std::string ParamField::ToString() const {
  if (den_.IsConstant() && den_.ConstantValue() == 1) return num_.ToString();
  std::string n = num_.terms().size() > 1 ? "(" + num_.ToString() + ")" : num_.ToString();
  bool atom = den_.terms().size() == 1 &&
              (den_.IsConstant() ||
               (den_.terms()[0].second == 1 &&
                std::count_if(den_.terms()[0].first.begin(), den_.terms()[0].first.end(),
                              [](uint16_t e) { return e > 0; }) == 1));
  std::string d = atom ? den_.ToString() : "(" + den_.ToString() + ")";
  return n + "/" + d;
}

}  // namespace snakecr
