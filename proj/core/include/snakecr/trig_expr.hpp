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

#ifndef SNAKECR_TRIG_EXPR_HPP_
#define SNAKECR_TRIG_EXPR_HPP_

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "snakecr/param_field.hpp"

namespace snakecr {

constexpr int kNumCartesian = 10;
constexpr int kNumAngles = 6;
constexpr int kNumVars = kNumCartesian + kNumAngles;

// Cartesian variables come first, angle variables after them.
enum class Var : uint8_t {
  kX, kY, kX1, kX2, kX3, kX4, kY1, kY2, kY3, kY4,
  kTheta, kPhi, kPsi, kBeta1, kBeta2, kBeta3,
};

constexpr bool IsAngle(Var v) { return static_cast<int>(v) >= kNumCartesian; }
constexpr int CartIndex(Var v) { return static_cast<int>(v); }
constexpr int AngleIndex(Var v) { return static_cast<int>(v) - kNumCartesian; }
constexpr Var AngleVar(int i) { return static_cast<Var>(i + kNumCartesian); }
const char* VarName(Var v);
std::optional<Var> VarFromName(std::string_view name);

enum class TrigKind : uint8_t { kCos = 0, kSin = 1 };

struct TermKey {
  std::array<uint8_t, kNumCartesian> cart{};
  std::array<int16_t, kNumAngles> freq{};
  TrigKind kind = TrigKind::kCos;
  auto operator<=>(const TermKey&) const = default;
};

// Assignment of numbers to variables and parameters.
struct NumericPoint {
  std::array<double, kNumVars> vars{};
  std::array<double, kNumParams> params{};
  uint32_t var_mask = 0;
  uint32_t param_mask = 0;

  void Set(Var v, double value) {
    vars[static_cast<int>(v)] = value;
    var_mask |= 1u << static_cast<int>(v);
  }
  void SetParam(int i, double value) {
    params[i] = value;
    param_mask |= 1u << i;
  }
  bool Has(Var v) const { return (var_mask >> static_cast<int>(v)) & 1u; }
  double Get(Var v) const { return vars[static_cast<int>(v)]; }
};

// Angle substitution target: an integer combination of angle variables plus
// an offset counted in quarter turns (pi/2).
struct AngleAffine {
  std::array<int16_t, kNumAngles> coeff{};
  int quarter_turns = 0;
};

class TrigExpr;

struct Substitution {
  std::map<Var, TrigExpr> cartesian;
  std::map<Var, AngleAffine> angles;
};

// Polynomial in the Cartesian variables times a Fourier term in the angle
// variables, summed with ParamField coefficients.  Canonical: sorted keys,
// frequency vectors with positive leading entry, no sin at zero frequency,
// no zero coefficients.
class TrigExpr {
 public:
  using Term = std::pair<TermKey, ParamField>;

  TrigExpr() = default;
  TrigExpr(long c) : TrigExpr(ParamField(c)) {}  // NOLINT(runtime/explicit)
  TrigExpr(const ParamField& c);                  // NOLINT(runtime/explicit)
  static TrigExpr Variable(Var v);
  static TrigExpr Cos(const std::array<int16_t, kNumAngles>& freq);
  static TrigExpr Sin(const std::array<int16_t, kNumAngles>& freq);
  static TrigExpr Cos(Var angle) { return Cos(UnitFreq(angle)); }
  static TrigExpr Sin(Var angle) { return Sin(UnitFreq(angle)); }
  static TrigExpr FromTerms(std::vector<Term> terms);
  static std::array<int16_t, kNumAngles> UnitFreq(Var angle);

  const std::vector<Term>& terms() const { return terms_; }
  bool IsZero() const { return terms_.empty(); }
  std::size_t Size() const { return terms_.size(); }
  // Non-null when the expression is a pure ParamField.
  std::optional<ParamField> AsParam() const;
  bool UsesVar(Var v) const;

  TrigExpr operator-() const;
  friend TrigExpr operator+(const TrigExpr& a, const TrigExpr& b);
  friend TrigExpr operator-(const TrigExpr& a, const TrigExpr& b);
  friend TrigExpr operator*(const TrigExpr& a, const TrigExpr& b);
  TrigExpr& operator+=(const TrigExpr& b) { return *this = *this + b; }
  TrigExpr& operator-=(const TrigExpr& b) { return *this = *this - b; }
  TrigExpr& operator*=(const TrigExpr& b) { return *this = *this * b; }
  TrigExpr Scaled(const ParamField& c) const;
  TrigExpr Pow(int n) const;
  friend bool operator==(const TrigExpr& a, const TrigExpr& b) = default;

  TrigExpr Differentiate(Var v) const;
  TrigExpr Substitute(const Substitution& s) const;
  TrigExpr SpecializeParams(const std::array<std::optional<mpq_class>, kNumParams>& values) const;

  double Eval(const NumericPoint& p) const;

  std::string ToString() const;

 private:
  std::vector<Term> terms_;
};

inline std::ostream& operator<<(std::ostream& os, const TrigExpr& e) { return os << e.ToString(); }

enum class CombineOp { kAdd, kSub, kMul };
TrigExpr Combine(const TrigExpr& a, const TrigExpr& b, CombineOp op);
inline bool IsZero(const TrigExpr& e) { return e.IsZero(); }

// Complex-valued expression held as a (real, imaginary) pair.
struct CExpr {
  TrigExpr re;
  TrigExpr im;

  CExpr() = default;
  CExpr(TrigExpr r) : re(std::move(r)) {}  // NOLINT(runtime/explicit)
  CExpr(TrigExpr r, TrigExpr i) : re(std::move(r)), im(std::move(i)) {}
  static CExpr I() { return {TrigExpr(0), TrigExpr(1)}; }

  bool IsZero() const { return re.IsZero() && im.IsZero(); }
  CExpr Conj() const { return {re, -im}; }
  CExpr operator-() const { return {-re, -im}; }
  friend CExpr operator+(const CExpr& a, const CExpr& b) { return {a.re + b.re, a.im + b.im}; }
  friend CExpr operator-(const CExpr& a, const CExpr& b) { return {a.re - b.re, a.im - b.im}; }
  friend CExpr operator*(const CExpr& a, const CExpr& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  CExpr& operator+=(const CExpr& b) { return *this = *this + b; }
  CExpr& operator-=(const CExpr& b) { return *this = *this - b; }
  friend bool operator==(const CExpr& a, const CExpr& b) = default;
  CExpr Differentiate(Var v) const { return {re.Differentiate(v), im.Differentiate(v)}; }
  std::size_t Size() const { return re.Size() + im.Size(); }
};

inline std::ostream& operator<<(std::ostream& os, const CExpr& e) {
  return os << "(" << e.re.ToString() << ") + i*(" << e.im.ToString() << ")";
}

}  // namespace snakecr

#endif  // SNAKECR_TRIG_EXPR_HPP_
