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

#ifndef SNAKECR_PARAM_FIELD_HPP_
#define SNAKECR_PARAM_FIELD_HPP_

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace snakecr {

constexpr int kNumParams = 3;

// Exponent vector over (s1, s2, s3).
using ParamExp = std::array<uint16_t, kNumParams>;

// Multivariate polynomial over Z in s1, s2, s3.  Terms are kept sorted by
// lexicographic exponent order (s1 most significant) with no zero
// coefficients.
class Poly {
 public:
  using Term = std::pair<ParamExp, mpz_class>;

  Poly() = default;
  explicit Poly(const mpz_class& c);
  explicit Poly(long c) : Poly(mpz_class(c)) {}
  static Poly Monomial(const ParamExp& e, const mpz_class& c);
  static Poly Param(int index);

  const std::vector<Term>& terms() const { return terms_; }
  bool IsZero() const { return terms_.empty(); }
  bool IsConstant() const;
  mpz_class ConstantValue() const;  // requires IsConstant()
  const Term& Leading() const { return terms_.back(); }

  int Degree(int var) const;
  bool Uses(int var) const { return Degree(var) > 0; }

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly Scaled(const mpz_class& c) const;
  friend bool operator==(const Poly& a, const Poly& b) = default;

  // Coefficients with respect to var, indexed by degree.
  std::vector<Poly> CoefficientsIn(int var) const;
  static Poly FromCoefficients(int var, const std::vector<Poly>& coeffs);

  mpz_class IntegerContent() const;

  double Eval(const std::array<double, kNumParams>& s) const;
  mpq_class EvalExact(const std::array<mpq_class, kNumParams>& s) const;

  std::string ToString() const;

 private:
  friend class PolyBuilder;
  std::vector<Term> terms_;
};

// Exact quotient a / b; throws std::domain_error if b does not divide a.
Poly ExactDivide(const Poly& a, const Poly& b);
// Greatest common divisor, normalized to a positive leading coefficient.
Poly Gcd(const Poly& a, const Poly& b);

// Element of Q(s1, s2, s3) stored as a reduced fraction of polynomials with a
// positive leading denominator coefficient.
class ParamField {
 public:
  ParamField() : num_(), den_(1) {}
  ParamField(long c) : num_(c), den_(1) {}  // NOLINT(runtime/explicit)
  explicit ParamField(const mpq_class& q);
  ParamField(const Poly& num, const Poly& den);
  static ParamField Param(int index);
  static ParamField Rational(long p, long q);

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  bool IsZero() const { return num_.IsZero(); }
  bool IsOne() const;
  bool IsConstant() const { return num_.IsConstant() && den_.IsConstant(); }
  mpq_class ConstantValue() const;  // requires IsConstant()
  bool UsesParam(int index) const { return num_.Uses(index) || den_.Uses(index); }
  // Number of polynomial terms; used as a size measure for pivoting.
  std::size_t Size() const { return num_.terms().size() + den_.terms().size(); }

  ParamField operator-() const;
  friend ParamField operator+(const ParamField& a, const ParamField& b);
  friend ParamField operator-(const ParamField& a, const ParamField& b);
  friend ParamField operator*(const ParamField& a, const ParamField& b);
  friend ParamField operator/(const ParamField& a, const ParamField& b);
  ParamField& operator+=(const ParamField& b) { return *this = *this + b; }
  ParamField& operator-=(const ParamField& b) { return *this = *this - b; }
  ParamField& operator*=(const ParamField& b) { return *this = *this * b; }
  friend bool operator==(const ParamField& a, const ParamField& b) = default;
  ParamField Inverse() const;
  ParamField Pow(int n) const;

  double Eval(const std::array<double, kNumParams>& s) const;
  // Substitutes exact values for the parameters flagged in mask.
  ParamField Specialize(const std::array<std::optional<mpq_class>, kNumParams>& values) const;

  std::string ToString() const;
  // True when ToString() needs parentheses inside a product.
  bool NeedsParens() const;

 private:
  void Normalize();
  Poly num_;
  Poly den_;
};

const char* ParamName(int index);

inline std::ostream& operator<<(std::ostream& os, const ParamField& f) { return os << f.ToString(); }
inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.ToString(); }

}  // namespace snakecr

#endif  // SNAKECR_PARAM_FIELD_HPP_
