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

#include "snakecr/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <random>
#include <thread>

namespace snakecr {

namespace {

using Cd = std::complex<double>;
using JMat = std::array<std::array<Jet, 5>, 5>;
using CMat = Eigen::Matrix<Cd, 5, 5>;
constexpr Cd kI(0.0, 1.0);

// Index of omega-bar^j for each j: w1 <-> w2, w3, w4 <-> w5.
constexpr std::array<int, 5> kConjIndex = {1, 0, 2, 4, 3};

}  // namespace

// ---------------------------------------------------------------------------
// Group algebra

GaussianRational GaussianRational::Inverse() const {
  const mpq_class n = re * re + im * im;
  if (n == 0) throw SingularElementError("division by zero Gaussian rational");
  return {re / n, -im / n};
}

namespace {
GaussianRational Recip(const GaussianRational& z) { return z.Inverse(); }
std::complex<double> Recip(const std::complex<double>& z) {
  if (z == 0.0) throw SingularElementError("g1 = 0");
  return 1.0 / z;
}
}  // namespace

template <class T>
HElement<T> Inverse(const HElement<T>& h) {
  if (h.g[0] == T(0)) throw SingularElementError("g1 = 0");
  // Forward substitution on the lower triangular matrix.
  const Matrix5<T> m = h.Matrix();
  Matrix5<T> inv{};
  for (auto& row : inv) row.fill(T(0));
  for (int c = 0; c < 5; ++c) {
    for (int r = 0; r < 5; ++r) {
      T s = r == c ? T(1) : T(0);
      for (int k = 0; k < r; ++k) s = s - m[r][k] * inv[k][c];
      inv[r][c] = s * Recip(m[r][r]);
    }
  }
  return HElement<T>::Read(inv);
}

template HElement<GaussianRational> Inverse(const HElement<GaussianRational>&);
template HElement<std::complex<double>> Inverse(const HElement<std::complex<double>>&);

AdaptedCoframe HAction(const HElement<GaussianRational>& h, const AdaptedCoframe& c) {
  if (h.g[0].IsZero()) throw SingularElementError("g1 = 0");
  const Matrix5<GaussianRational> m = h.Matrix();
  AdaptedCoframe out;
  for (int i = 0; i < 5; ++i) {
    CKForm w(Chart::M(), 1);
    for (int j = 0; j < 5; ++j) {
      if (m[i][j].IsZero()) continue;
      const CExpr s(TrigExpr(ParamField(m[i][j].re)), TrigExpr(ParamField(m[i][j].im)));
      w = w + s * c.omega[j];
    }
    out.omega[i] = w;
  }
  CKForm w = out.omega[0];
  for (int i = 1; i < 5; ++i) w = Wedge(w, out.omega[i]);
  out.wedge = w.Coefficient(0b11111);
  // |det h| = |g1|^10 rescales the sampled wedge.
  const double scale = std::pow(std::abs(h.g[0].ToComplex()), 10);
  for (double v : c.wedge_samples) out.wedge_samples.push_back(v * scale);
  return out;
}

// ---------------------------------------------------------------------------
// Jet evaluation of chart expressions

namespace {
int JetVarOfCart(int cart) {
  if (cart == CartIndex(Var::kX)) return 0;
  if (cart == CartIndex(Var::kY)) return 1;
  return -1;
}
}  // namespace

JetEvaluator::JetEvaluator(std::shared_ptr<const JetSpace> space, const NumericPoint& base)
    : space_(std::move(space)), base_(base) {
  if (space_->vars() != 5) throw std::invalid_argument("jet evaluator needs the 5 chart variables");
}

const Jet& JetEvaluator::Power(int var, int exponent) {
  auto& v = powers_[var];
  if (v.empty()) {
    v.emplace_back(space_, 1.0);
    const Var cv = var == 0 ? Var::kX : Var::kY;
    v.push_back(Jet::Variable(space_, var, base_.Get(cv)));
  }
  while (static_cast<int>(v.size()) <= exponent) v.push_back(v.back() * v[1]);
  return v[exponent];
}

const Jet& JetEvaluator::Trig(const std::array<int16_t, kNumAngles>& freq, TrigKind kind) {
  const auto key = std::make_pair(freq, static_cast<int>(kind));
  auto it = trig_.find(key);
  if (it != trig_.end()) return it->second;
  Jet angle(space_, 0.0);
  for (int k = 0; k < kNumAngles; ++k) {
    if (freq[k] == 0) continue;
    if (k > 2) throw std::invalid_argument("expression uses an angle outside the M chart");
    angle += static_cast<double>(freq[k]) * Jet::Variable(space_, 2 + k, base_.Get(AngleVar(k)));
  }
  Jet value = kind == TrigKind::kCos ? angle.Cos() : angle.Sin();
  return trig_.emplace(key, std::move(value)).first->second;
}

Jet JetEvaluator::Eval(const TrigExpr& e) {
  Jet acc(space_, 0.0);
  for (const auto& [key, coeff] : e.terms()) {
    Jet t = Trig(key.freq, key.kind);
    for (int c = 0; c < kNumCartesian; ++c) {
      if (key.cart[c] == 0) continue;
      const int v = JetVarOfCart(c);
      if (v < 0) throw std::invalid_argument("expression uses a coordinate outside the M chart");
      t = t * Power(v, key.cart[c]);
    }
    acc += coeff.Eval(base_.params) * t;
  }
  return acc;
}

Jet JetEvaluator::Eval(const CExpr& e) { return Eval(e.re) + kI * Eval(e.im); }

// ---------------------------------------------------------------------------
// Nilpotent symbol

NilpotentSymbol ComputeNilpotentSymbol(const VectorField& x1, const VectorField& x2, const NumericPoint& p) {
  const VectorField e3 = LieBracket(x1, x2);
  const VectorField e4 = LieBracket(x1, e3);
  const VectorField e5 = LieBracket(x2, e3);
  const std::array<const VectorField*, 5> fields = {&x1, &x2, &e3, &e4, &e5};
  const int n = x1.dim();
  if (n != 5) throw std::invalid_argument("nilpotent symbol expects a 5-dimensional chart");
  NilpotentSymbol out;
  for (int j = 0; j < 5; ++j) out.basis.col(j) = EvalField(*fields[j], p);
  Eigen::JacobiSVD<Eigen::Matrix<double, 5, 5>> svd(out.basis);
  const auto sv = svd.singularValues();
  if (sv(4) <= 1e-9 * std::max(1.0, sv(0))) {
    throw WrongGrowthError("frame (X1, X2, [X1,X2], [X1,[X1,X2]], [X2,[X1,X2]]) is degenerate: growth is not (2,3,5)");
  }
  const Eigen::PartialPivLU<Eigen::Matrix<double, 5, 5>> lu(out.basis);
  constexpr std::array<int, 5> kWeight = {1, 1, 2, 3, 3};
  for (auto& c : out.constants) {
    for (auto& row : c) row.fill(0.0);
  }
  for (int a = 0; a < 5; ++a) {
    for (int b = a + 1; b < 5; ++b) {
      const int w = kWeight[a] + kWeight[b];
      if (w > 3) continue;  // graded bracket lands above the top degree
      const Eigen::Matrix<double, 5, 1> v = EvalField(LieBracket(*fields[a], *fields[b]), p);
      const Eigen::Matrix<double, 5, 1> coef = lu.solve(v);
      for (int k = 0; k < 5; ++k) {
        if (kWeight[k] != w) continue;
        out.constants[k][a][b] = coef(k);
        out.constants[k][b][a] = -coef(k);
      }
    }
  }
  // Relations of n: [e1,e2] = e3, [e1,e3] = e4, [e2,e3] = e5.
  std::array<Matrix5<double>, 5> target{};
  for (auto& c : target) {
    for (auto& row : c) row.fill(0.0);
  }
  auto set = [&](int k, int a, int b) {
    target[k][a][b] = 1;
    target[k][b][a] = -1;
  };
  set(2, 0, 1);
  set(3, 0, 2);
  set(4, 1, 2);
  for (int k = 0; k < 5; ++k) {
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) {
        out.max_deviation = std::max(out.max_deviation, std::abs(out.constants[k][a][b] - target[k][a][b]));
      }
    }
  }
  out.matches_n = out.max_deviation < 1e-12;
  return out;
}

NilpotentSymbol ComputeNilpotentSymbol(const SnakeModel& m, const NumericPoint& p) {
  return ComputeNilpotentSymbol(m.Xi(5), m.Xi(4), p);
}

// ---------------------------------------------------------------------------
// Canonical frame

CanonicalFrame BuildCanonicalFrame(const SnakeModel& m, const AdaptedCoframe& c) {
  const CVectorField x4 = ToComplex(m.Xi(4)), x5 = ToComplex(m.Xi(5));
  for (int i = 0; i < 3; ++i) {
    if (!Pair(c.omega[i], x4).IsZero() || !Pair(c.omega[i], x5).IsZero()) {
      throw PreconditionError("coframe is not adapted: omega" + std::to_string(i + 1) + " does not annihilate D");
    }
  }
  const CExpr a = Pair(c.omega[4], x5), b = Pair(c.omega[4], x4);
  CanonicalFrame f;
  const CVectorField l = a * x4 - b * x5;
  if (l.IsZero()) throw PreconditionError("omega5 vanishes on D");
  const CVectorField lb = Conj(l);
  const CVectorField t = CExpr::I() * LieBracket(l, lb);
  f.fields = {LieBracket(lb, t), LieBracket(l, t), t, l, lb};
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) f.brackets[{i, j}] = LieBracket(f.fields[i], f.fields[j]);
  }
  return f;
}

SymbolicJCheck CheckJSymbolic(const CanonicalFrame& f) {
  const CVectorField& e2 = f.fields[1];
  const CVectorField& l = f.fields[3];
  const CVectorField b = LieBracket(e2, l);
  const std::array<const CVectorField*, 5> cols = {&b, &e2, &f.fields[2], &l, &f.fields[4]};
  std::vector<std::vector<CExpr>> mat(5, std::vector<CExpr>(5));
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) mat[r][c] = (*cols[c])[r];
  }
  SymbolicJCheck out;
  out.determinant = Determinant(mat);
  out.vanishes = out.determinant.IsZero();
  return out;
}

const char* PatternName(Pattern p) {
  switch (p) {
    case Pattern::kVanishing:
      return "vanishing";
    case Pattern::kNonVanishing:
      return "non-vanishing";
    case Pattern::kIndeterminate:
      return "indeterminate";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Pointwise normalization

namespace {

Jet Zero(const std::shared_ptr<const JetSpace>& s) { return Jet(s, 0.0); }

JMat ZeroMat(const std::shared_ptr<const JetSpace>& s) {
  JMat m;
  for (auto& row : m) row.fill(Zero(s));
  return m;
}

JMat Mul(const JMat& a, const JMat& b) {
  JMat r = ZeroMat(a[0][0].space());
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 5; ++k) {
      if (a[i][k].MaxAbs() == 0) continue;
      for (int j = 0; j < 5; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  }
  return r;
}

JMat Transpose(const JMat& a) {
  JMat r = a;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) r[i][j] = a[j][i];
  }
  return r;
}

// Gauss-Jordan with pivots chosen on the base values.
JMat InverseMat(JMat a) {
  const auto s = a[0][0].space();
  JMat inv = ZeroMat(s);
  for (int i = 0; i < 5; ++i) inv[i][i] = Jet(s, 1.0);
  for (int c = 0; c < 5; ++c) {
    int piv = c;
    for (int r = c + 1; r < 5; ++r) {
      if (std::abs(a[r][c].value()) > std::abs(a[piv][c].value())) piv = r;
    }
    if (std::abs(a[piv][c].value()) < 1e-300) throw SingularElementError("singular frame matrix");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    const Jet p = a[c][c].Inverse();
    for (int j = 0; j < 5; ++j) {
      a[c][j] = a[c][j] * p;
      inv[c][j] = inv[c][j] * p;
    }
    for (int r = 0; r < 5; ++r) {
      if (r == c || a[r][c].MaxAbs() == 0) continue;
      const Jet f = a[r][c];
      for (int j = 0; j < 5; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

// Theorem-2 pattern with jet entries.
JMat HMat(const std::array<Jet, 5>& g) {
  const auto s = g[0].space();
  JMat m = ZeroMat(s);
  const Jet c1 = g[0].Conj();
  m[0][0] = g[0] * c1 * c1;
  m[1][1] = g[0] * g[0] * c1;
  m[2][0] = g[2].Conj();
  m[2][1] = g[2];
  m[2][2] = g[0] * c1;
  m[3][0] = g[4].Conj();
  m[3][1] = g[3];
  m[3][2] = g[1].Conj();
  m[3][3] = g[0];
  m[4][0] = g[3].Conj();
  m[4][1] = g[4];
  m[4][2] = g[1];
  m[4][4] = c1;
  return m;
}

// H_J pattern with g1 = 1.
JMat HJMat(const Jet& g2) {
  const auto s = g2.space();
  JMat m = ZeroMat(s);
  for (int i = 0; i < 5; ++i) m[i][i] = Jet(s, 1.0);
  m[3][2] = g2;
  m[4][2] = g2.Conj();
  return m;
}

using Structure = std::array<JMat, 5>;  // S[i][m][n]: d theta^i = sum_{m<n} S[i][m][n] theta^m ^ theta^n

struct FrameJets {
  std::shared_ptr<const JetSpace> space;
  JMat F;        // F[k][m]: component k of frame field m
  Structure tt;  // structure functions of the canonical frame
};

FrameJets FrameAt(const CanonicalFrame& f, const NumericPoint& p, int order) {
  FrameJets out;
  out.space = JetSpace::Get(5, order);
  JetEvaluator ev(out.space, p);
  out.F = ZeroMat(out.space);
  for (int m = 0; m < 5; ++m) {
    for (int k = 0; k < 5; ++k) out.F[k][m] = ev.Eval(f.fields[m][k]);
  }
  const JMat finv = InverseMat(out.F);
  for (auto& t : out.tt) t = ZeroMat(out.space);
  for (const auto& [mn, br] : f.brackets) {
    std::array<Jet, 5> b;
    for (int k = 0; k < 5; ++k) b[k] = ev.Eval(br[k]);
    for (int i = 0; i < 5; ++i) {
      Jet c = Zero(out.space);
      for (int k = 0; k < 5; ++k) c -= finv[i][k] * b[k];
      out.tt[i][mn.first][mn.second] = c;
      out.tt[i][mn.second][mn.first] = -c;
    }
  }
  return out;
}

// Structure functions lifted to constants in another jet space.
Structure LiftBase(const Structure& s, const std::shared_ptr<const JetSpace>& space) {
  Structure out;
  for (int i = 0; i < 5; ++i) {
    out[i] = ZeroMat(space);
    for (int m = 0; m < 5; ++m) {
      for (int n = 0; n < 5; ++n) out[i][m][n] = Jet(space, s[i][m][n].value());
    }
  }
  return out;
}

// Two-form coefficients after omega = h theta, ignoring dh.
Structure Transform(const JMat& h, const Structure& tt) {
  const JMat hi = InverseMat(h);
  const JMat hit = Transpose(hi);
  Structure out;
  const auto s = h[0][0].space();
  for (int i = 0; i < 5; ++i) {
    JMat a = ZeroMat(s);
    for (int l = 0; l < 5; ++l) {
      if (h[i][l].MaxAbs() == 0) continue;
      for (int m = 0; m < 5; ++m) {
        for (int n = 0; n < 5; ++n) a[m][n] += h[i][l] * tt[l][m][n];
      }
    }
    out[i] = Mul(Mul(hit, a), hi);
  }
  return out;
}

// Full d omega including the derivative of h along the frame.
Structure DOmega(const JMat& h, const FrameJets& fj) {
  const JMat hi = InverseMat(h);
  const JMat hit = Transpose(hi);
  const auto s = h[0][0].space();
  Structure out;
  for (int i = 0; i < 5; ++i) {
    JMat a = ZeroMat(s);
    for (int l = 0; l < 5; ++l) {
      if (h[i][l].MaxAbs() == 0) continue;
      for (int m = 0; m < 5; ++m) {
        for (int n = 0; n < 5; ++n) a[m][n] += h[i][l] * fj.tt[l][m][n];
      }
      for (int k = 0; k < 5; ++k) {
        const Jet c = h[i][l].Differentiate(k);
        if (c.MaxAbs() == 0) continue;
        for (int j = 0; j < 5; ++j) {
          const Jet v = c * fj.F[k][j];
          a[j][l] += v;
          a[l][j] -= v;
        }
      }
    }
    out[i] = Mul(Mul(hit, a), hi);
  }
  return out;
}

// f ^ omega^i as an antisymmetric matrix.
template <class M, class V>
void AddOneFormWedge(M& out, const V& f, int i, double sign) {
  for (int m = 0; m < 5; ++m) {
    out[m][i] += sign * f[m];
    out[i][m] -= sign * f[m];
  }
}

std::array<Jet, 5> ConjForm(const std::array<Jet, 5>& a) {
  std::array<Jet, 5> r;
  for (int j = 0; j < 5; ++j) r[kConjIndex[j]] = a[j].Conj();
  return r;
}

// Level-0 conditions: the coefficients of the normal form that do not
// involve unknown invariants or connection coefficients.
std::vector<Jet> Essential(const JMat& h, const Structure& tt) {
  const Structure tn = Transform(h, tt);
  const auto s = h[0][0].space();
  std::array<Jet, 5> a;
  a[0] = Zero(s);
  for (int j = 1; j < 5; ++j) a[j] = -tn[0][0][j];
  const std::array<Jet, 5> ab = ConjForm(a);
  std::vector<Jet> out = {tn[0][1][2], tn[0][1][4], tn[0][2][3], tn[0][3][4], tn[0][2][4] - Jet(s, 1.0)};
  std::array<Jet, 5> f3, f4;
  for (int m = 0; m < 5; ++m) {
    f3[m] = (1.0 / 3.0) * (a[m] + ab[m]);
    f4[m] = (1.0 / 3.0) * (2.0 * ab[m] - a[m]);
  }
  JMat r3 = tn[2], r4 = tn[3];
  AddOneFormWedge(r3, f3, 2, -1.0);
  AddOneFormWedge(r4, f4, 3, -1.0);
  out.push_back(r3[2][3]);
  out.push_back(r3[3][4] - Jet(s, kI));
  out.push_back(r4[3][4]);
  return out;
}

// Real unknowns of the level-0 problem mapped to a matrix h.
using HBuilder = std::function<JMat(const std::vector<Jet>&)>;

struct Level0Solution {
  std::vector<double> u;
  double cost = 0;
  Eigen::MatrixXd jacobian;
};

void ResidualAndJacobian(const HBuilder& build, const Structure& tt_base, const std::vector<double>& u,
                         Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
  const int n = static_cast<int>(u.size());
  const auto s = JetSpace::Get(n, 1);
  std::vector<Jet> uj;
  for (int k = 0; k < n; ++k) uj.push_back(Jet::Variable(s, k, u[k]));
  const std::vector<Jet> e = Essential(build(uj), LiftBase(tt_base, s));
  const int m = static_cast<int>(e.size());
  r.resize(2 * m);
  jac.resize(2 * m, n);
  for (int i = 0; i < m; ++i) {
    r(i) = e[i].value().real();
    r(m + i) = e[i].value().imag();
    for (int k = 0; k < n; ++k) {
      jac(i, k) = e[i].Partial(k).real();
      jac(m + i, k) = e[i].Partial(k).imag();
    }
  }
}

Level0Solution LevenbergMarquardt(const HBuilder& build, const Structure& tt, std::vector<double> u, int max_iterations) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  ResidualAndJacobian(build, tt, u, r, jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < max_iterations && cost > 1e-30; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (int k = 0; k < n; ++k) a(k, k) += lambda * (1.0 + jtj(k, k));
      const Eigen::VectorXd step = a.ldlt().solve(-jtr);
      std::vector<double> trial = u;
      for (int k = 0; k < n; ++k) trial[k] += step(k);
      Eigen::VectorXd rt;
      Eigen::MatrixXd jt;
      ResidualAndJacobian(build, tt, trial, rt, jt);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct < cost) {
        const double gain = cost - ct;
        u = trial;
        r = rt;
        jac = jt;
        cost = ct;
        lambda = std::max(lambda / 5, 1e-12);
        improved = true;
        if (gain < 1e-32 && step.norm() < 1e-15) it = max_iterations;
      } else {
        lambda *= 8;
      }
    }
    if (!improved) break;
  }
  return {u, cost, jac};
}

double Distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(d);
}

struct MultiStart {
  Level0Solution best;
  int distinct_roots = 0;
};

// Multi-start solve; among converged roots the one closest to `prefer` wins.
MultiStart SolveLevel0(const HBuilder& build, const Structure& tt, int n, int starts, uint64_t seed,
                       const std::optional<std::vector<double>>& prefer) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> inits;
  if (prefer) inits.push_back(*prefer);
  inits.emplace_back(n, 0.0);
  while (static_cast<int>(inits.size()) < std::max(starts, 2)) {
    const double scale = std::pow(10.0, static_cast<int>(inits.size()) % 3);
    std::vector<double> u(n);
    for (auto& v : u) v = scale * normal(rng);
    inits.push_back(u);
  }
  std::vector<Level0Solution> sols;
  for (const auto& init : inits) sols.push_back(LevenbergMarquardt(build, tt, init, 200));
  double min_cost = sols[0].cost;
  for (const auto& s : sols) min_cost = std::min(min_cost, s.cost);
  const double accept = std::max(min_cost * 100, 1e-24);
  const std::vector<double> anchor = prefer ? *prefer : std::vector<double>(n, 0.0);
  MultiStart out;
  std::vector<std::vector<double>> roots;
  const Level0Solution* choice = nullptr;
  for (const auto& s : sols) {
    if (s.cost > accept) continue;
    bool seen = false;
    for (const auto& r : roots) seen = seen || Distance(r, s.u) < 1e-6 * (1 + Distance(r, std::vector<double>(n, 0.0)));
    if (!seen) roots.push_back(s.u);
    if (!choice || Distance(s.u, anchor) < Distance(choice->u, anchor) - 1e-9) choice = &s;
  }
  out.best = *choice;
  out.distinct_roots = static_cast<int>(roots.size());
  return out;
}

// Pseudo-inverse of the base Jacobian.
Eigen::MatrixXd PseudoInverse(const Eigen::MatrixXd& a, int* rank) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd inv = sv;
  int rk = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * sv(0)) {
      inv(i) = 1.0 / sv(i);
      ++rk;
    } else {
      inv(i) = 0;
    }
  }
  if (rank) *rank = rk;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

// Lifts the base solution to jets of the chart variables.
std::vector<Jet> JetNewton(const HBuilder& build, const Structure& tt, const std::vector<double>& u0,
                           const Eigen::MatrixXd& pinv, const std::shared_ptr<const JetSpace>& space, double* residual) {
  const int n = static_cast<int>(u0.size());
  std::vector<Jet> u;
  for (int k = 0; k < n; ++k) u.emplace_back(space, u0[k]);
  std::vector<Jet> e;
  for (int it = 0; it <= space->order() + 1; ++it) {
    e = Essential(build(u), tt);
    const int m = static_cast<int>(e.size());
    for (int c = 0; c < space->size(); ++c) {
      Eigen::VectorXd b(2 * m);
      for (int i = 0; i < m; ++i) {
        b(i) = e[i].coeff(c).real();
        b(m + i) = e[i].coeff(c).imag();
      }
      const Eigen::VectorXd d = -pinv * b;
      for (int k = 0; k < n; ++k) u[k].coeff(c) += d(k);
    }
  }
  e = Essential(build(u), tt);
  double r = 0;
  for (const auto& j : e) r = std::max(r, j.MaxAbs());
  if (residual) *residual = r;
  return u;
}

// Complex jet from a pair of real jets.
Jet Complexify(const Jet& re, const Jet& im) { return re + kI * im; }

// Everything the fit needs at one point.
struct PointData {
  Structure d;                  // order-1 jets of d omega
  JMat h;                       // final h
  FrameJets frame;              // order-3 frame data
  std::array<Jet, 5> g;         // jets of g1..g5
  double level0_residual = 0;
  int distinct_roots = 0;
  std::vector<double> base_u;   // level-0 base solution
};

constexpr int kFitOrder = 1;  // order of the final d omega jets

std::vector<Jet> Level1Condition(const std::array<Jet, 5>& g0, const std::vector<Jet>& v, const FrameJets& fj) {
  std::array<Jet, 5> g = g0;
  g[3] = Complexify(v[0], v[1]);
  const Structure d = DOmega(HMat(g), fj);
  return {d[2][0][3]};
}

// Solves the affine level-1 condition for g4 as a jet.
Jet SolveG4(const std::array<Jet, 5>& g0, const FrameJets& fj) {
  const auto s = fj.space;
  auto eval = [&](double a, double b) {
    return Level1Condition(g0, {Jet(s, a), Jet(s, b)}, fj)[0].value();
  };
  const Cd r0 = eval(0, 0), ra = eval(1, 0), rb = eval(0, 1);
  Eigen::Matrix2d m;
  m << (ra - r0).real(), (rb - r0).real(), (ra - r0).imag(), (rb - r0).imag();
  const Eigen::Matrix2d minv = m.inverse();
  std::vector<Jet> v = {Jet(s, 0.0), Jet(s, 0.0)};
  for (int it = 0; it <= s->order(); ++it) {
    const Jet r = Level1Condition(g0, v, fj)[0];
    for (int c = 0; c < s->size(); ++c) {
      const Eigen::Vector2d d = -minv * Eigen::Vector2d(r.coeff(c).real(), r.coeff(c).imag());
      v[0].coeff(c) += d(0);
      v[1].coeff(c) += d(1);
    }
  }
  return Complexify(v[0], v[1]).Truncate(s->order() - 1);
}

HBuilder FullLevel0Builder(const std::shared_ptr<const JetSpace>& s_hint) {
  (void)s_hint;
  return [](const std::vector<Jet>& u) {
    const auto s = u[0].space();
    return HMat({Jet(s, 1.0), Complexify(u[0], u[1]), Complexify(u[2], u[3]), Jet(s, 0.0), Complexify(u[4], u[5])});
  };
}

// hc lifted into the space of u (constants when the spaces differ).
HBuilder ReducedLevel0Builder(const JMat& hc) {
  return [hc](const std::vector<Jet>& u) {
    const auto s = u[0].space();
    JMat c = hc;
    if (hc[0][0].space() != s) {
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) c[i][j] = Jet(s, hc[i][j].value());
      }
    }
    return Mul(HJMat(Complexify(u[0], u[1])), c);
  };
}

NumericPoint PointOf(const SnakeModel& m, const std::array<double, 5>& x) {
  NumericPoint p;
  const auto pv = m.params.NumericValues();
  for (int i = 0; i < kNumParams; ++i) p.SetParam(i, pv[i]);
  const Chart& c = Chart::M();
  for (int i = 0; i < 5; ++i) p.Set(c.var(i), x[i]);
  return p;
}

std::vector<double> BaseValues(const std::vector<Jet>& u) {
  std::vector<double> v;
  for (const auto& j : u) v.push_back(j.value().real());
  return v;
}

// Full-H normalization data at one point.
PointData SolveFull(const CanonicalFrame& cf, const NumericPoint& p, const NormalizeOptions& opt, uint64_t seed,
                    const std::optional<std::vector<double>>& prefer) {
  PointData out;
  out.frame = FrameAt(cf, p, kFitOrder + 2);
  const HBuilder build = FullLevel0Builder(out.frame.space);
  const MultiStart ms = SolveLevel0(build, out.frame.tt, 6, opt.starts, seed, prefer);
  out.distinct_roots = ms.distinct_roots;
  out.base_u = ms.best.u;
  int rank = 0;
  const Eigen::MatrixXd pinv = PseudoInverse(ms.best.jacobian, &rank);
  const std::vector<Jet> u = JetNewton(build, out.frame.tt, ms.best.u, pinv, out.frame.space, &out.level0_residual);
  out.base_u = BaseValues(u);
  const auto s = out.frame.space;
  std::array<Jet, 5> g0 = {Jet(s, 1.0), Complexify(u[0], u[1]), Complexify(u[2], u[3]), Jet(s, 0.0),
                           Complexify(u[4], u[5])};
  g0[3] = SolveG4(g0, out.frame);
  out.g = g0;
  out.h = HMat(g0);
  out.d = DOmega(out.h, out.frame);
  if (rank < 6) out.level0_residual = std::max(out.level0_residual, 1.0);  // lift is not unique
  return out;
}

// ---- linear fit of the remaining coefficients

struct FitOutput {
  std::array<Cd, 5> a{};
  std::map<std::string, Cd> invariants;
  double residual = 0;
  int rank = 0;
  int unknowns = 0;
};

using Mat5c = std::array<std::array<Cd, 5>, 5>;

Mat5c ZeroC() {
  Mat5c m{};
  for (auto& r : m) r.fill(0.0);
  return m;
}

void AddWedge(Mat5c& m, int i, int j, Cd c) {
  m[i][j] += c;
  m[j][i] -= c;
}

// Residual of the normal form as a real vector; unknowns
// u = (Re a[5], Im a[5], T, Re z[10], Im z[10]) with z = (S, L, Q, G, V, N, K, F, B, A).
Eigen::VectorXd FitResidual(const std::array<Mat5c, 5>& d, Cd j, const Eigen::VectorXd& u, bool with_constant) {
  std::array<Cd, 5> a, ab;
  for (int k = 0; k < 5; ++k) a[k] = Cd(u(k), u(5 + k));
  for (int k = 0; k < 5; ++k) ab[kConjIndex[k]] = std::conj(a[k]);
  const double t = u(10);
  std::array<Cd, 10> z;
  for (int k = 0; k < 10; ++k) z[k] = Cd(u(11 + k), u(21 + k));
  const Cd S = z[0], L = z[1], Q = z[2], G = z[3], V = z[4], N = z[5], K = z[6], F = z[7], B = z[8], A = z[9];
  Mat5c r1 = ZeroC(), r3 = ZeroC(), r4 = ZeroC();
  for (int k = 0; k < 5; ++k) AddWedge(r1, k, 0, -a[k]);
  std::array<Cd, 5> f3, f4;
  for (int m = 0; m < 5; ++m) {
    f3[m] = (a[m] + ab[m]) / 3.0;
    f4[m] = (2.0 * ab[m] - a[m]) / 3.0;
  }
  AddOneFormWedge(r3, f3, 2, -1.0);
  AddOneFormWedge(r4, f4, 3, -1.0);
  AddWedge(r3, 0, 1, -kI * t);
  AddWedge(r3, 0, 2, -S);
  AddWedge(r3, 0, 4, -L);
  AddWedge(r3, 1, 2, -std::conj(S));
  AddWedge(r3, 1, 3, -std::conj(L));
  AddWedge(r4, 0, 1, -Q);
  AddWedge(r4, 0, 2, -G);
  AddWedge(r4, 0, 3, S - std::conj(j) * std::conj(V));
  AddWedge(r4, 0, 4, N);
  AddWedge(r4, 1, 2, -K);
  AddWedge(r4, 1, 3, F);
  AddWedge(r4, 1, 4, -B);
  AddWedge(r4, 2, 4, V);
  AddWedge(r4, 2, 3, kI * A);
  if (with_constant) {
    for (int m = 0; m < 5; ++m) {
      for (int n = 0; n < 5; ++n) {
        r1[m][n] += d[0][m][n];
        r3[m][n] += d[2][m][n];
        r4[m][n] += d[3][m][n];
      }
    }
    AddWedge(r1, 1, 3, -j);
    AddWedge(r1, 2, 4, -1.0);
    AddWedge(r3, 3, 4, -kI);
  }
  Eigen::VectorXd out(60);
  int k = 0;
  for (const Mat5c* r : {&r1, &r3, &r4}) {
    for (int m = 0; m < 5; ++m) {
      for (int n = m + 1; n < 5; ++n) {
        out(k) = (*r)[m][n].real();
        out(30 + k) = (*r)[m][n].imag();
        ++k;
      }
    }
  }
  return out;
}

FitOutput Fit(const std::array<Mat5c, 5>& d, Gauge gauge) {
  const Cd j = d[0][1][3];
  constexpr int kN = 31;
  // Gauge columns removed: F (index 7 of z) or a1.
  std::vector<int> cols;
  for (int c = 0; c < kN; ++c) {
    const bool drop = gauge == Gauge::kFZero ? (c == 11 + 7 || c == 21 + 7) : (c == 0 || c == 5);
    if (!drop) cols.push_back(c);
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(kN);
  const Eigen::VectorXd b = -FitResidual(d, j, zero, true);
  const Eigen::VectorXd base = FitResidual(d, j, zero, false);
  Eigen::MatrixXd a(60, static_cast<int>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Eigen::VectorXd e = zero;
    e(cols[c]) = 1;
    a.col(static_cast<int>(c)) = FitResidual(d, j, e, false) - base;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::VectorXd x = qr.solve(b);
  FitOutput out;
  out.rank = static_cast<int>(qr.rank());
  out.unknowns = static_cast<int>(cols.size());
  out.residual = (a * x - b).cwiseAbs().maxCoeff();
  Eigen::VectorXd u = zero;
  for (std::size_t c = 0; c < cols.size(); ++c) u(cols[c]) = x(static_cast<int>(c));
  for (int k = 0; k < 5; ++k) out.a[k] = Cd(u(k), u(5 + k));
  const auto& names = InvariantNames();
  out.invariants["J"] = j;
  out.invariants["T"] = u(10);
  for (int k = 0; k < 10; ++k) out.invariants[names[2 + k]] = Cd(u(11 + k), u(21 + k));
  return out;
}

std::array<Mat5c, 5> BaseValues(const Structure& d) {
  std::array<Mat5c, 5> out;
  for (int i = 0; i < 5; ++i) {
    for (int m = 0; m < 5; ++m) {
      for (int n = 0; n < 5; ++n) out[i][m][n] = d[i][m][n].value();
    }
  }
  return out;
}

// E[k][b]: chart components of the frame dual to omega.
Mat5c DualFrame(const PointData& pd) {
  Mat5c e = ZeroC();
  CMat h;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) h(i, j) = pd.h[i][j].value();
  }
  const CMat hi = h.inverse();
  for (int k = 0; k < 5; ++k) {
    for (int b = 0; b < 5; ++b) {
      for (int m = 0; m < 5; ++m) e[k][b] += pd.frame.F[k][m].value() * hi(m, b);
    }
  }
  return e;
}

Cd Along(const Mat5c& e, int b, const Jet& f) {
  Cd s = 0;
  for (int k = 0; k < 5; ++k) s += e[k][b] * f.Partial(k);
  return s;
}

// Uses the remaining freedom in |g1|, taken locally constant, to set |T| = 1:
// omega -> diag(l^3, l^3, l^2, l, l) omega.
void FixScale(PointData& pd, Gauge gauge) {
  const FitOutput first = Fit(BaseValues(pd.d), gauge);
  const double t = std::abs(first.invariants.at("T"));
  if (!(t > 0) || !std::isfinite(t)) return;
  const double l = std::pow(t, 0.25);
  const std::array<double, 5> w = {l * l * l, l * l * l, l * l, l, l};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) pd.h[i][j] *= w[i];
    for (int m = 0; m < 5; ++m) {
      for (int n = 0; n < 5; ++n) pd.d[i][m][n] *= w[i] / (w[m] * w[n]);
    }
  }
  const HElement<Cd> he = HElement<Cd>::Read([&] {
    Matrix5<Cd> mm;
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) mm[a][b] = pd.h[a][b].value();
    }
    return mm;
  }());
  for (int k = 0; k < 5; ++k) pd.g[k] = Jet(pd.frame.space, he.g[k]);
}

PointNormalization Finish(PointData pd, const std::array<double, 5>& x, Gauge gauge) {
  FixScale(pd, gauge);
  PointNormalization out;
  out.point = x;
  for (int k = 0; k < 5; ++k) out.g[k] = pd.g[k].value();
  out.D = BaseValues(pd.d);
  const FitOutput fit = Fit(out.D, gauge);
  out.a = fit.a;
  out.invariants = fit.invariants;
  out.residual = fit.residual;
  if (fit.rank < fit.unknowns) out.residual = std::max(out.residual, 1.0);
  out.level0_residual = 0;
  for (const Jet& e : Essential(pd.h, pd.frame.tt)) out.level0_residual = std::max(out.level0_residual, std::abs(e.value()));
  if (pd.level0_residual >= 1.0) out.level0_residual = pd.level0_residual;  // flagged during the lift
  const Mat5c e = DualFrame(pd);
  for (int b = 0; b < 5; ++b) out.dJ[b] = Along(e, b, pd.d[0][1][3]);
  // Jacobi identity of the structure functions.
  double d2 = 0;
  for (int l = 0; l < 5; ++l) {
    for (int a = 0; a < 5; ++a) {
      for (int b = a + 1; b < 5; ++b) {
        for (int c = b + 1; c < 5; ++c) {
          Cd s = 0;
          const std::array<std::array<int, 3>, 3> cyc = {{{a, b, c}, {b, c, a}, {c, a, b}}};
          for (const auto& t : cyc) {
            s += Along(e, t[2], pd.d[l][t[0]][t[1]]);
            for (int i = 0; i < 5; ++i) s += out.D[i][t[0]][t[1]] * out.D[l][i][t[2]];
          }
          d2 = std::max(d2, std::abs(s));
        }
      }
    }
  }
  out.d2_residual = d2;
  return out;
}

std::vector<std::array<double, 5>> SamplePoints(const SnakeModel& m, int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::array<double, 5>> pts;
  const Chart& c = Chart::M();
  for (int i = 0; i < count; ++i) {
    const NumericPoint p = m.SamplePoint(rng);
    std::array<double, 5> x;
    for (int k = 0; k < 5; ++k) x[k] = p.Get(c.var(k));
    pts.push_back(x);
  }
  // Nearest-neighbour path so that consecutive points seed each other.
  for (std::size_t i = 1; i < pts.size(); ++i) {
    std::size_t best = i;
    double bd = 1e300;
    for (std::size_t j = i; j < pts.size(); ++j) {
      double d = 0;
      for (int k = 0; k < 5; ++k) d += (pts[j][k] - pts[i - 1][k]) * (pts[j][k] - pts[i - 1][k]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    std::swap(pts[i], pts[best]);
  }
  return pts;
}

template <class F>
void ParallelFor(int n, int threads, F&& f) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (int t = 0; t < threads; ++t) {
    jobs.push_back(std::async(std::launch::async, [&, t] {
      for (int i = t; i < n; i += threads) f(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

void Summarize(NormalizationResult& r, double tolerance) {
  r.max_residual = 0;
  r.max_d2_residual = 0;
  for (const char* name : InvariantNames()) r.max_abs[name] = 0;
  for (const auto& p : r.points) {
    r.max_residual = std::max({r.max_residual, p.residual, p.level0_residual});
    r.max_d2_residual = std::max(r.max_d2_residual, p.d2_residual);
    for (const auto& [k, v] : p.invariants) r.max_abs[k] = std::max(r.max_abs[k], std::abs(v));
  }
  r.ok = !r.points.empty() && r.max_residual < tolerance;
  for (const auto& [k, v] : r.max_abs) {
    if (v < 1e-6 && r.ok) {
      r.pattern[k] = Pattern::kVanishing;
    } else if (v > 1e-3) {
      r.pattern[k] = Pattern::kNonVanishing;
    } else {
      r.pattern[k] = Pattern::kIndeterminate;
    }
  }
}

}  // namespace

std::array<Matrix5<std::complex<double>>, 5> StructureFunctions(const CanonicalFrame& f, const NumericPoint& p) {
  return BaseValues(FrameAt(f, p, 0).tt);
}

namespace {

uint64_t PointSeed(uint64_t seed, int i) { return seed * 1000003ULL + static_cast<uint64_t>(i) * 7919ULL + 1; }

}  // namespace

NormalizationResult NormalizeCoframe(const SnakeModel& m, const AdaptedCoframe& c, const NormalizeOptions& options) {
  if (!m.params.IsNumeric()) throw std::invalid_argument("normalization needs numeric lengths");
  NormalizationResult r;
  r.mode = options.mode;
  r.gauge = options.gauge;
  r.seed = options.seed;
  const CanonicalFrame cf = BuildCanonicalFrame(m, c);
  if (options.mode == Mode::kSymbolic) {
    const auto ev = m.params.ExactValues();
    if (*ev[0] == *ev[2] && *ev[1] == mpq_class(1, 2)) {
      r.symbolic_j = CheckJSymbolic(cf);
    } else {
      r.warnings.push_back("symbolic mode needs s1 = s3 and s2 = 1/2");
    }
    r.warnings.push_back("symbolic closure of the normalization is unavailable; invariants computed pointwise");
  }
  const auto pts = SamplePoints(m, options.points, options.seed);
  // Sequential seeding sweep for the level-0 roots.
  std::vector<std::vector<double>> seeds(pts.size());
  std::optional<std::vector<double>> prev;
  int max_roots = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const FrameJets fj = FrameAt(cf, PointOf(m, pts[i]), 0);
    const MultiStart ms = SolveLevel0(FullLevel0Builder(fj.space), fj.tt, 6, options.starts,
                                      PointSeed(options.seed, static_cast<int>(i)), prev);
    seeds[i] = ms.best.u;
    prev = ms.best.u;
    max_roots = std::max(max_roots, ms.distinct_roots);
  }
  if (max_roots > 1) {
    r.warnings.push_back("level-0 system has " + std::to_string(max_roots) +
                         " distinct roots at some point; continuity branch selected");
  }
  r.points.resize(pts.size());
  ParallelFor(static_cast<int>(pts.size()), options.threads, [&](int i) {
    NormalizeOptions one = options;
    one.starts = 1;
    const PointData pd = SolveFull(cf, PointOf(m, pts[i]), one, PointSeed(options.seed, i), seeds[i]);
    r.points[i] = Finish(pd, pts[i], options.gauge);
  });
  Summarize(r, options.residual_tolerance);
  return r;
}

DJCheck CheckDJRelation(const PointNormalization& p, double tolerance) {
  const Cd j = p.invariants.at("J");
  const Cd a = p.invariants.at("A");
  const auto& ac = p.a;
  DJCheck out;
  out.n_predicted = std::conj(-p.dJ[2] + kI * a * j + (4.0 / 3.0) * j * ac[2] - (5.0 / 3.0) * j * std::conj(ac[2]));
  out.l_predicted = std::conj(-p.dJ[4] + (4.0 / 3.0) * j * ac[4] - (5.0 / 3.0) * j * std::conj(ac[3]));
  out.n_mismatch = std::abs(out.n_predicted - p.invariants.at("N"));
  out.l_mismatch = std::abs(out.l_predicted - p.invariants.at("L"));
  out.ok = out.n_mismatch < tolerance && out.l_mismatch < tolerance;
  return out;
}

ReductionResult ReduceToHJ(const SnakeModel& m, const AdaptedCoframe& c, const NormalizationResult& full,
                           const NormalizeOptions& options) {
  ReductionResult out;
  for (const auto& p : full.points) {
    if (std::abs(p.invariants.at("J")) >= 1e-6) {
      out.error = "J does not vanish on the sample set";
      return out;
    }
  }
  const CanonicalFrame cf = BuildCanonicalFrame(m, c);
  out.reduced.mode = Mode::kPointwise;
  out.reduced.gauge = full.gauge;
  out.reduced.seed = full.seed;
  out.reduced.points.resize(full.points.size());
  std::vector<std::string> errors(full.points.size());
  ParallelFor(static_cast<int>(full.points.size()), options.threads, [&](int i) {
    const auto& fp = full.points[i];
    const NumericPoint p = PointOf(m, fp.point);
    std::vector<double> start = {fp.g[1].real(), fp.g[1].imag(), fp.g[2].real(), fp.g[2].imag(),
                                 fp.g[4].real(), fp.g[4].imag()};
    NormalizeOptions one = options;
    one.starts = 1;
    const PointData pf = SolveFull(cf, p, one, PointSeed(full.seed, i), start);
    // h = h_J(g2) h_c with h_c = H(1, 0, g3, g4 - conj(g2) g3, g5 - g2 g3).
    const auto s = pf.frame.space;
    const Jet& g2 = pf.g[1];
    const Jet& g3 = pf.g[2];
    const JMat hc = HMat({Jet(s, 1.0), Jet(s, 0.0), g3, pf.g[3] - g2.Conj() * g3, pf.g[4] - g2 * g3});
    const HBuilder build = ReducedLevel0Builder(hc);
    // The re-run does not start from the full-run value of g2.
    const MultiStart ms = SolveLevel0(build, pf.frame.tt, 2, options.starts, PointSeed(full.seed, i) ^ 0x5a5a,
                                      std::nullopt);
    PointData pr = pf;
    int rank = 0;
    const Eigen::MatrixXd pinv = PseudoInverse(ms.best.jacobian, &rank);
    const std::vector<Jet> u = JetNewton(build, pf.frame.tt, ms.best.u, pinv, s, &pr.level0_residual);
    pr.h = build(u);
    pr.d = DOmega(pr.h, pr.frame);
    const HElement<Cd> he = HElement<Cd>::Read([&] {
      Matrix5<Cd> mm;
      for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) mm[a][b] = pr.h[a][b].value();
      }
      return mm;
    }());
    for (int k = 0; k < 5; ++k) pr.g[k] = Jet(s, he.g[k]);
    PointNormalization pn = Finish(pr, fp.point, full.gauge);
    // The level-1 condition is no longer solved for; it must hold.
    pn.level0_residual = std::max(pn.level0_residual, std::abs(pn.D[2][0][3]));
    if (rank < 2) errors[i] = "reduced level-0 Jacobian is rank deficient";
    out.reduced.points[i] = std::move(pn);
  });
  Summarize(out.reduced, options.residual_tolerance);
  for (std::size_t i = 0; i < full.points.size(); ++i) {
    if (!errors[i].empty()) out.error = errors[i];
    for (const auto& [k, v] : full.points[i].invariants) {
      out.max_invariant_difference =
          std::max(out.max_invariant_difference, std::abs(v - out.reduced.points[i].invariants.at(k)));
    }
  }
  out.ok = out.error.empty() && out.reduced.ok && out.max_invariant_difference < 1e-8;
  if (!out.ok && out.error.empty()) {
    out.error = out.reduced.ok ? "reduced invariants differ from the full run" : "reduced fit residual above tolerance";
  }
  return out;
}

}  // namespace snakecr
