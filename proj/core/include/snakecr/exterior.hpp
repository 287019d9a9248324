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

#ifndef SNAKECR_EXTERIOR_HPP_
#define SNAKECR_EXTERIOR_HPP_

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "snakecr/trig_expr.hpp"

namespace snakecr {

class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<Var> vars);
  static const Chart& M();   // (x, y, theta, phi, psi)
  static const Chart& R8();  // (x1, x2, x3, x4, y1, y2, y3, y4)

  int dim() const { return static_cast<int>(vars_.size()); }
  Var var(int i) const { return vars_[i]; }
  const std::vector<Var>& vars() const { return vars_; }
  int IndexOf(Var v) const;  // -1 when absent
  friend bool operator==(const Chart&, const Chart&) = default;

 private:
  std::vector<Var> vars_;
};

class ChartMismatch : public std::invalid_argument {
 public:
  ChartMismatch() : std::invalid_argument("chart mismatch") {}
};

namespace detail {
inline TrigExpr Derivative(const TrigExpr& e, Var v) { return e.Differentiate(v); }
inline CExpr Derivative(const CExpr& e, Var v) { return e.Differentiate(v); }
inline bool ScalarIsZero(const TrigExpr& e) { return e.IsZero(); }
inline bool ScalarIsZero(const CExpr& e) { return e.IsZero(); }
}  // namespace detail

// Coordinate vector field with components of type S (TrigExpr or CExpr).
template <class S>
class BasicVectorField {
 public:
  BasicVectorField() = default;
  explicit BasicVectorField(const Chart& chart) : chart_(chart), comp_(chart.dim()) {}
  BasicVectorField(const Chart& chart, std::vector<S> comp) : chart_(chart), comp_(std::move(comp)) {
    if (static_cast<int>(comp_.size()) != chart_.dim()) throw std::invalid_argument("component count != chart dimension");
  }
  static BasicVectorField Coordinate(const Chart& chart, Var v) {
    BasicVectorField f(chart);
    f.comp_[chart.IndexOf(v)] = S(TrigExpr(1));
    return f;
  }

  const Chart& chart() const { return chart_; }
  const S& operator[](int i) const { return comp_[i]; }
  S& operator[](int i) { return comp_[i]; }
  const std::vector<S>& components() const { return comp_; }
  int dim() const { return chart_.dim(); }
  bool IsZero() const {
    for (const auto& c : comp_) {
      if (!detail::ScalarIsZero(c)) return false;
    }
    return true;
  }

  // Directional derivative X(f).
  S Apply(const S& f) const {
    S acc;
    for (int j = 0; j < dim(); ++j) {
      if (detail::ScalarIsZero(comp_[j])) continue;
      S df = detail::Derivative(f, chart_.var(j));
      if (!detail::ScalarIsZero(df)) acc += comp_[j] * df;
    }
    return acc;
  }

  friend BasicVectorField operator+(const BasicVectorField& a, const BasicVectorField& b) {
    Check(a, b);
    BasicVectorField r = a;
    for (int i = 0; i < a.dim(); ++i) r.comp_[i] += b.comp_[i];
    return r;
  }
  friend BasicVectorField operator-(const BasicVectorField& a, const BasicVectorField& b) {
    Check(a, b);
    BasicVectorField r = a;
    for (int i = 0; i < a.dim(); ++i) r.comp_[i] -= b.comp_[i];
    return r;
  }
  BasicVectorField operator-() const {
    BasicVectorField r = *this;
    for (auto& c : r.comp_) c = -c;
    return r;
  }
  friend BasicVectorField operator*(const S& f, const BasicVectorField& x) {
    BasicVectorField r = x;
    for (auto& c : r.comp_) c = f * c;
    return r;
  }
  friend bool operator==(const BasicVectorField&, const BasicVectorField&) = default;

  static void Check(const BasicVectorField& a, const BasicVectorField& b) {
    if (!(a.chart_ == b.chart_)) throw ChartMismatch();
  }

 private:
  Chart chart_;
  std::vector<S> comp_;
};

using VectorField = BasicVectorField<TrigExpr>;
using CVectorField = BasicVectorField<CExpr>;

template <class S>
BasicVectorField<S> LieBracket(const BasicVectorField<S>& x, const BasicVectorField<S>& y) {
  BasicVectorField<S>::Check(x, y);
  BasicVectorField<S> r(x.chart());
  for (int i = 0; i < x.dim(); ++i) r[i] = x.Apply(y[i]) - y.Apply(x[i]);
  return r;
}

CVectorField ToComplex(const VectorField& x);
CVectorField MakeComplex(const VectorField& re, const VectorField& im);
VectorField RealPart(const CVectorField& x);
VectorField ImagPart(const CVectorField& x);
CVectorField Conj(const CVectorField& x);

// Differential form; index sets are bitmasks over chart positions.
template <class S>
class BasicKForm {
 public:
  BasicKForm() = default;
  BasicKForm(const Chart& chart, int degree) : chart_(chart), degree_(degree) {}
  static BasicKForm Coordinate(const Chart& chart, Var v) {
    BasicKForm f(chart, 1);
    f.Set(1u << chart.IndexOf(v), S(TrigExpr(1)));
    return f;
  }

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  const std::map<uint32_t, S>& coefficients() const { return coeff_; }
  bool IsZero() const { return coeff_.empty(); }
  S Coefficient(uint32_t mask) const {
    auto it = coeff_.find(mask);
    return it == coeff_.end() ? S() : it->second;
  }
  // Component on dx_i for a 1-form.
  S operator[](int i) const { return Coefficient(1u << i); }

  void Set(uint32_t mask, S value) {
    if (std::popcount(mask) != degree_) throw std::invalid_argument("index count != degree");
    if (detail::ScalarIsZero(value)) {
      coeff_.erase(mask);
    } else {
      coeff_[mask] = std::move(value);
    }
  }
  void Add(uint32_t mask, const S& value) { Set(mask, Coefficient(mask) + value); }

  friend BasicKForm operator+(const BasicKForm& a, const BasicKForm& b) {
    Check(a, b);
    BasicKForm r = a;
    for (const auto& [m, c] : b.coeff_) r.Add(m, c);
    return r;
  }
  friend BasicKForm operator-(const BasicKForm& a, const BasicKForm& b) { return a + (-b); }
  BasicKForm operator-() const {
    BasicKForm r = *this;
    for (auto& [m, c] : r.coeff_) c = -c;
    return r;
  }
  friend BasicKForm operator*(const S& f, const BasicKForm& w) {
    BasicKForm r(w.chart_, w.degree_);
    for (const auto& [m, c] : w.coeff_) r.Set(m, f * c);
    return r;
  }
  friend bool operator==(const BasicKForm&, const BasicKForm&) = default;

  static void Check(const BasicKForm& a, const BasicKForm& b) {
    if (!(a.chart_ == b.chart_)) throw ChartMismatch();
    if (a.degree_ != b.degree_) throw std::invalid_argument("degree mismatch");
  }

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<uint32_t, S> coeff_;
};

using KForm = BasicKForm<TrigExpr>;
using CKForm = BasicKForm<CExpr>;

namespace detail {
// Sign of dx_I ^ dx_J relative to dx_{I u J}.
inline int WedgeSign(uint32_t a, uint32_t b) {
  int inversions = 0;
  for (uint32_t bb = b; bb; bb &= bb - 1) {
    const int j = std::countr_zero(bb);
    inversions += std::popcount(a >> (j + 1));
  }
  return (inversions & 1) ? -1 : 1;
}
}  // namespace detail

template <class S>
BasicKForm<S> Wedge(const BasicKForm<S>& a, const BasicKForm<S>& b) {
  if (!(a.chart() == b.chart())) throw ChartMismatch();
  if (a.degree() + b.degree() > a.chart().dim()) throw std::invalid_argument("wedge degree overflow");
  BasicKForm<S> r(a.chart(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.coefficients()) {
    for (const auto& [mb, cb] : b.coefficients()) {
      if (ma & mb) continue;
      S v = ca * cb;
      r.Add(ma | mb, detail::WedgeSign(ma, mb) > 0 ? v : -v);
    }
  }
  return r;
}

template <class S>
BasicKForm<S> ExtD(const BasicKForm<S>& w) {
  if (w.degree() >= w.chart().dim()) throw std::invalid_argument("exterior derivative of a top form");
  BasicKForm<S> r(w.chart(), w.degree() + 1);
  for (const auto& [m, c] : w.coefficients()) {
    for (int j = 0; j < w.chart().dim(); ++j) {
      if (m & (1u << j)) continue;
      S dc = detail::Derivative(c, w.chart().var(j));
      if (detail::ScalarIsZero(dc)) continue;
      r.Add(m | (1u << j), detail::WedgeSign(1u << j, m) > 0 ? dc : -dc);
    }
  }
  return r;
}

// d of a function as a 1-form.
template <class S>
BasicKForm<S> ExtD(const Chart& chart, const S& f) {
  BasicKForm<S> r(chart, 1);
  for (int j = 0; j < chart.dim(); ++j) r.Set(1u << j, detail::Derivative(f, chart.var(j)));
  return r;
}

// Evaluates a k-form on k vector fields: sum over I of c_I det[dx_I(X_a)].
template <class S>
S EvalForm(const BasicKForm<S>& w, const std::vector<BasicVectorField<S>>& xs) {
  if (static_cast<int>(xs.size()) != w.degree()) throw std::invalid_argument("argument count != degree");
  for (const auto& x : xs) {
    if (!(x.chart() == w.chart())) throw ChartMismatch();
  }
  const int k = w.degree();
  S acc;
  for (const auto& [m, c] : w.coefficients()) {
    std::vector<int> idx;
    for (uint32_t mm = m; mm; mm &= mm - 1) idx.push_back(std::countr_zero(mm));
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    S det;
    do {
      int inv = 0;
      for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) inv += perm[i] > perm[j];
      }
      S prod = S(TrigExpr(1));
      bool zero = false;
      for (int a = 0; a < k && !zero; ++a) {
        const S& e = xs[a][idx[perm[a]]];
        if (detail::ScalarIsZero(e)) {
          zero = true;
        } else {
          prod = prod * e;
        }
      }
      if (!zero) det += (inv & 1) ? -prod : prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!detail::ScalarIsZero(det)) acc += c * det;
  }
  return acc;
}

template <class S>
S Pair(const BasicKForm<S>& w, const BasicVectorField<S>& x) {
  if (w.degree() != 1) throw std::invalid_argument("pair expects a 1-form");
  return EvalForm(w, {x});
}

CKForm ToComplex(const KForm& w);
CKForm MakeComplex(const KForm& re, const KForm& im);
KForm RealPart(const CKForm& w);
KForm ImagPart(const CKForm& w);
CKForm Conj(const CKForm& w);

// Applies a substitution to every component.
VectorField SubstituteField(const VectorField& x, const Substitution& s);
KForm SubstituteForm(const KForm& w, const Substitution& s);

// Pulls a 1-form on `source` back along map (source coordinate -> expression
// on `target`).
KForm Pullback(const KForm& w, const Chart& target, const std::map<Var, TrigExpr>& map);

Eigen::VectorXd EvalField(const VectorField& x, const NumericPoint& p);
Eigen::VectorXcd EvalField(const CVectorField& x, const NumericPoint& p);
std::complex<double> EvalScalar(const CExpr& e, const NumericPoint& p);

class Distribution {
 public:
  Distribution(const Chart& chart, std::vector<VectorField> generators);
  const Chart& chart() const { return chart_; }
  const std::vector<VectorField>& generators() const { return gens_; }

 private:
  Chart chart_;
  std::vector<VectorField> gens_;
};

// Rank of a matrix of TrigExpr over the fraction field, by fraction-free
// elimination pivoting on the shortest entry.
int SymbolicRank(std::vector<std::vector<TrigExpr>> rows);

// Determinant by cofactor expansion, skipping zero entries.
template <class S>
S Determinant(const std::vector<std::vector<S>>& m);
extern template TrigExpr Determinant(const std::vector<std::vector<TrigExpr>>&);
extern template CExpr Determinant(const std::vector<std::vector<CExpr>>&);

// Uniform sample on a chart: Cartesian coordinates in [-1, 1], angles in
// [0, 2 pi); parameters copied from `params`.
NumericPoint SampleChartPoint(const Chart& chart, std::mt19937_64& rng, const std::array<double, kNumParams>& params);

int NumericRank(const Eigen::MatrixXd& m, double threshold);

struct GrowthOptions {
  int max_depth = 3;
  int points = 20;
  double threshold = 1e-8;
  uint64_t seed = 1;
  std::array<double, kNumParams> params{1.0, 0.5, 1.0};
};

struct GrowthResult {
  std::vector<int> symbolic;                     // cumulative ranks per level
  std::vector<int> generic_numeric;              // maximal numeric ranks per level
  std::vector<std::vector<int>> numeric_ranks;   // per point, per level
  std::vector<int> dropped_points;               // indices with a lower rank
  std::vector<std::vector<VectorField>> levels;  // new bracket fields per level
};

class GrowthInconsistency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

GrowthResult GrowthVector(const Distribution& d, const GrowthOptions& options);

}  // namespace snakecr

#endif  // SNAKECR_EXTERIOR_HPP_
