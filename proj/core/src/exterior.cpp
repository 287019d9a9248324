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

#include "snakecr/exterior.hpp"

#include <algorithm>
#include <set>

namespace snakecr {

Chart::Chart(std::vector<Var> vars) : vars_(std::move(vars)) {
  std::set<Var> seen(vars_.begin(), vars_.end());
  if (seen.size() != vars_.size()) throw std::invalid_argument("chart variable names must be distinct");
  if (vars_.size() > 16) throw std::invalid_argument("chart dimension too large");
}

const Chart& Chart::M() {
  static const Chart c({Var::kX, Var::kY, Var::kTheta, Var::kPhi, Var::kPsi});
  return c;
}

const Chart& Chart::R8() {
  static const Chart c({Var::kX1, Var::kX2, Var::kX3, Var::kX4, Var::kY1, Var::kY2, Var::kY3, Var::kY4});
  return c;
}

int Chart::IndexOf(Var v) const {
  for (int i = 0; i < dim(); ++i) {
    if (vars_[i] == v) return i;
  }
  return -1;
}

CVectorField ToComplex(const VectorField& x) {
  CVectorField r(x.chart());
  for (int i = 0; i < x.dim(); ++i) r[i] = CExpr(x[i]);
  return r;
}

CVectorField MakeComplex(const VectorField& re, const VectorField& im) {
  VectorField::Check(re, im);
  CVectorField r(re.chart());
  for (int i = 0; i < re.dim(); ++i) r[i] = CExpr(re[i], im[i]);
  return r;
}

VectorField RealPart(const CVectorField& x) {
  VectorField r(x.chart());
  for (int i = 0; i < x.dim(); ++i) r[i] = x[i].re;
  return r;
}

VectorField ImagPart(const CVectorField& x) {
  VectorField r(x.chart());
  for (int i = 0; i < x.dim(); ++i) r[i] = x[i].im;
  return r;
}

CVectorField Conj(const CVectorField& x) {
  CVectorField r = x;
  for (int i = 0; i < x.dim(); ++i) r[i] = x[i].Conj();
  return r;
}

CKForm ToComplex(const KForm& w) {
  CKForm r(w.chart(), w.degree());
  for (const auto& [m, c] : w.coefficients()) r.Set(m, CExpr(c));
  return r;
}

CKForm MakeComplex(const KForm& re, const KForm& im) {
  KForm::Check(re, im);
  CKForm r = ToComplex(re);
  for (const auto& [m, c] : im.coefficients()) r.Add(m, CExpr(TrigExpr(), c));
  return r;
}

KForm RealPart(const CKForm& w) {
  KForm r(w.chart(), w.degree());
  for (const auto& [m, c] : w.coefficients()) r.Set(m, c.re);
  return r;
}

KForm ImagPart(const CKForm& w) {
  KForm r(w.chart(), w.degree());
  for (const auto& [m, c] : w.coefficients()) r.Set(m, c.im);
  return r;
}

CKForm Conj(const CKForm& w) {
  CKForm r(w.chart(), w.degree());
  for (const auto& [m, c] : w.coefficients()) r.Set(m, c.Conj());
  return r;
}

VectorField SubstituteField(const VectorField& x, const Substitution& s) {
  VectorField r(x.chart());
  for (int i = 0; i < x.dim(); ++i) r[i] = x[i].Substitute(s);
  return r;
}

KForm SubstituteForm(const KForm& w, const Substitution& s) {
  KForm r(w.chart(), w.degree());
  for (const auto& [m, c] : w.coefficients()) r.Set(m, c.Substitute(s));
  return r;
}

KForm Pullback(const KForm& w, const Chart& target, const std::map<Var, TrigExpr>& map) {
  if (w.degree() != 1) throw std::invalid_argument("pullback implemented for 1-forms");
  Substitution s;
  for (const auto& [v, e] : map) {
    if (IsAngle(v)) throw std::invalid_argument("pullback map must assign Cartesian source coordinates");
    s.cartesian[v] = e;
  }
  KForm r(target, 1);
  for (const auto& [m, c] : w.coefficients()) {
    const Var v = w.chart().var(std::countr_zero(m));
    auto it = map.find(v);
    if (it == map.end()) throw std::invalid_argument(std::string("pullback map misses ") + VarName(v));
    TrigExpr coeff = c.Substitute(s);
    r = r + coeff * ExtD(target, it->second);
  }
  return r;
}

Eigen::VectorXd EvalField(const VectorField& x, const NumericPoint& p) {
  Eigen::VectorXd v(x.dim());
  for (int i = 0; i < x.dim(); ++i) v[i] = x[i].Eval(p);
  return v;
}

std::complex<double> EvalScalar(const CExpr& e, const NumericPoint& p) { return {e.re.Eval(p), e.im.Eval(p)}; }

Eigen::VectorXcd EvalField(const CVectorField& x, const NumericPoint& p) {
  Eigen::VectorXcd v(x.dim());
  for (int i = 0; i < x.dim(); ++i) v[i] = EvalScalar(x[i], p);
  return v;
}

Distribution::Distribution(const Chart& chart, std::vector<VectorField> generators)
    : chart_(chart), gens_(std::move(generators)) {
  for (const auto& g : gens_) {
    if (!(g.chart() == chart_)) throw ChartMismatch();
    if (g.IsZero()) throw std::invalid_argument("distribution generator is zero");
  }
}

int SymbolicRank(std::vector<std::vector<TrigExpr>> a) {
  const int rows = static_cast<int>(a.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(a[0].size());
  std::vector<bool> used(cols, false);
  int rank = 0;
  while (rank < rows) {
    int pr = -1, pc = -1;
    std::size_t best = 0;
    for (int r = rank; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (used[c] || a[r][c].IsZero()) continue;
        const std::size_t s = a[r][c].Size();
        if (pr < 0 || s < best) {
          pr = r;
          pc = c;
          best = s;
        }
      }
    }
    if (pr < 0) break;
    std::swap(a[rank], a[pr]);
    const TrigExpr p = a[rank][pc];
    for (int r = rank + 1; r < rows; ++r) {
      if (a[r][pc].IsZero()) continue;
      const TrigExpr f = a[r][pc];
      for (int c = 0; c < cols; ++c) {
        if (used[c]) continue;
        a[r][c] = p * a[r][c] - f * a[rank][c];
      }
    }
    used[pc] = true;
    ++rank;
  }
  return rank;
}

namespace {

template <class S>
S DetRec(const std::vector<std::vector<S>>& m, int row, uint32_t used_cols) {
  const int n = static_cast<int>(m.size());
  if (row == n) return S(TrigExpr(1));
  S acc;
  int sign_pos = 0;
  for (int c = 0; c < n; ++c) {
    if (used_cols & (1u << c)) continue;
    const int pos = sign_pos++;
    if (detail::ScalarIsZero(m[row][c])) continue;
    S minor = DetRec(m, row + 1, used_cols | (1u << c));
    if (detail::ScalarIsZero(minor)) continue;
    S term = m[row][c] * minor;
    acc += (pos & 1) ? -term : term;
  }
  return acc;
}

}  // namespace

template <class S>
S Determinant(const std::vector<std::vector<S>>& m) {
  for (const auto& r : m) {
    if (r.size() != m.size()) throw std::invalid_argument("determinant of a non-square matrix");
  }
  return DetRec(m, 0, 0);
}
template TrigExpr Determinant(const std::vector<std::vector<TrigExpr>>&);
template CExpr Determinant(const std::vector<std::vector<CExpr>>&);

NumericPoint SampleChartPoint(const Chart& chart, std::mt19937_64& rng, const std::array<double, kNumParams>& params) {
  std::uniform_real_distribution<double> cart(-1.0, 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979323846);
  NumericPoint p;
  for (Var v : chart.vars()) p.Set(v, IsAngle(v) ? ang(rng) : cart(rng));
  for (int i = 0; i < kNumParams; ++i) p.SetParam(i, params[i]);
  return p;
}

int NumericRank(const Eigen::MatrixXd& m, double threshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s[i] > threshold;
  return r;
}

namespace {

Eigen::MatrixXd Stack(const std::vector<VectorField>& fields, const NumericPoint& p) {
  if (fields.empty()) return {};
  Eigen::MatrixXd m(fields.size(), fields[0].dim());
  for (std::size_t i = 0; i < fields.size(); ++i) m.row(i) = EvalField(fields[i], p).transpose();
  return m;
}

}  // namespace

GrowthResult GrowthVector(const Distribution& d, const GrowthOptions& options) {
  if (options.max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
  const Chart& chart = d.chart();
  std::mt19937_64 rng(options.seed);
  std::vector<NumericPoint> probes;
  for (int i = 0; i < 3; ++i) probes.push_back(SampleChartPoint(chart, rng, options.params));
  auto probe_rank = [&](const std::vector<VectorField>& fs) {
    int r = 0;
    for (const auto& p : probes) r = std::max(r, NumericRank(Stack(fs, p), options.threshold));
    return r;
  };

  GrowthResult result;
  std::vector<VectorField> kept;
  std::vector<VectorField> frontier;
  for (const auto& g : d.generators()) {
    if (probe_rank([&] { auto t = kept; t.push_back(g); return t; }()) > probe_rank(kept)) {
      kept.push_back(g);
      frontier.push_back(g);
    }
  }
  result.levels.push_back(frontier);
  for (int level = 1; level < options.max_depth; ++level) {
    std::vector<VectorField> next;
    for (const auto& g : d.generators()) {
      for (const auto& f : frontier) {
        VectorField b = LieBracket(g, f);
        if (b.IsZero()) continue;
        auto trial = kept;
        trial.push_back(b);
        if (probe_rank(trial) > probe_rank(kept)) {
          kept.push_back(b);
          next.push_back(b);
        }
      }
    }
    result.levels.push_back(next);
    frontier = next;
  }

  std::vector<VectorField> cumulative;
  for (const auto& lv : result.levels) {
    cumulative.insert(cumulative.end(), lv.begin(), lv.end());
    std::vector<std::vector<TrigExpr>> rows;
    for (const auto& f : cumulative) rows.push_back(f.components());
    result.symbolic.push_back(SymbolicRank(rows));
  }

  result.generic_numeric.assign(result.levels.size(), 0);
  for (int i = 0; i < options.points; ++i) {
    NumericPoint p = SampleChartPoint(chart, rng, options.params);
    std::vector<int> ranks;
    std::vector<VectorField> acc;
    bool dropped = false;
    for (std::size_t lv = 0; lv < result.levels.size(); ++lv) {
      acc.insert(acc.end(), result.levels[lv].begin(), result.levels[lv].end());
      const int r = NumericRank(Stack(acc, p), options.threshold);
      ranks.push_back(r);
      result.generic_numeric[lv] = std::max(result.generic_numeric[lv], r);
      dropped |= r < result.symbolic[lv];
    }
    result.numeric_ranks.push_back(ranks);
    if (dropped) result.dropped_points.push_back(i);
  }
  if (options.points > 0 && result.generic_numeric != result.symbolic) {
    throw GrowthInconsistency("symbolic and generic numeric ranks disagree");
  }
  return result;
}

}  // namespace snakecr
