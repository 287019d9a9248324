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

#include "snakecr/cr_structure.hpp"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace snakecr {

namespace {

constexpr int kX1 = 0, kX2 = 1, kX3 = 2, kX4 = 3, kY1 = 4, kY2 = 5, kY3 = 6, kY4 = 7;

using Covector = std::array<TrigExpr, 8>;

bool IsHalf(const ParamField& s2) { return s2 == ParamField::Rational(1, 2); }

void RequireHalf(const SnakeModel& m) {
  if (!IsHalf(m.params.s2)) throw PreconditionError("requires s2 = 1/2, got s2 = " + m.params.s2.ToString());
}

TrigExpr Emb(const SnakeModel& m, int r8) { return m.embedding.at(Chart::R8().var(r8)); }

// Weights of q2 and q3 in the constrained middle wheel.
std::pair<TrigExpr, TrigExpr> WheelWeights(const SnakeModel& m) {
  const TrigExpr s2(m.params.s2);
  if (m.conventions.wheel == WheelConvention::kDifferentiated) return {TrigExpr(1) - s2, s2};
  return {s2, TrigExpr(1) - s2};
}

// Lateral-velocity covectors of the three wheels on R8, evaluated along M.
std::array<Covector, 3> NonSkidCovectors(const SnakeModel& m) {
  std::array<Covector, 3> out;
  auto e = [&](int i) { return Emb(m, i); };
  // wheel 1 at q1, heading q2 - q1
  out[0][kX1] = e(kY2) - e(kY1);
  out[0][kY1] = -(e(kX2) - e(kX1));
  const auto [w2, w3] = WheelWeights(m);
  const TrigExpr dx = e(kX3) - e(kX2), dy = e(kY3) - e(kY2);
  out[1][kX2] = w2 * dy;
  out[1][kX3] = w3 * dy;
  out[1][kY2] = -(w2 * dx);
  out[1][kY3] = -(w3 * dx);
  out[2][kX4] = e(kY4) - e(kY3);
  out[2][kY4] = -(e(kX4) - e(kX3));
  return out;
}

std::array<Covector, 3> ConstraintCovectors(const SnakeModel& m) {
  Substitution sub;
  sub.cartesian = m.embedding;
  std::array<Covector, 3> out;
  for (int i = 0; i < 3; ++i) {
    for (int r = 0; r < 8; ++r) out[i][r] = m.h[i].Differentiate(Chart::R8().var(r)).Substitute(sub);
  }
  return out;
}

Covector Apply(const ParamMatrix& j, const std::array<TrigExpr, 8>& v) {
  Covector out;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      if (!j(r, c).IsZero() && !v[c].IsZero()) out[r] += v[c].Scaled(j(r, c));
    }
  }
  return out;
}

TrigExpr Contract(const Covector& a, const std::array<TrigExpr, 8>& v) {
  TrigExpr s;
  for (int r = 0; r < 8; ++r) {
    if (!a[r].IsZero() && !v[r].IsZero()) s += a[r] * v[r];
  }
  return s;
}

NumericPoint R8Point(const Eigen::VectorXd& q8, const std::array<double, kNumParams>& s) {
  NumericPoint p;
  for (int i = 0; i < 8; ++i) p.Set(Chart::R8().var(i), q8[i]);
  for (int i = 0; i < kNumParams; ++i) p.SetParam(i, s[i]);
  return p;
}

Eigen::MatrixXd OrthonormalColumns(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()[i] > 1e-8;
  return svd.matrixU().leftCols(rank);
}

bool PerfectSquare(const mpq_class& q, mpq_class* root) {
  if (q < 0) return false;
  mpz_class n = q.get_num(), d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return false;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  *root = mpq_class(rn, rd);
  root->canonicalize();
  return true;
}

mpq_class Rationalize(double x, long max_den) {
  // Continued fraction convergents.
  long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 40; ++it) {
    const double fl = std::floor(r);
    if (std::abs(fl) > 1e12) break;
    const long a = static_cast<long>(fl);
    const long h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - static_cast<double>(h1) / k1) < 1e-12) break;
    const double frac = r - fl;
    if (frac < 1e-14) break;
    r = 1.0 / frac;
  }
  mpq_class q(h1, k1 == 0 ? 1 : k1);
  q.canonicalize();
  return q;
}

ComplexStructureMatrix Combine(const std::vector<ComplexStructureMatrix>& basis, const std::vector<ParamField>& c) {
  ParamMatrix j(8, 8);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (!c[k].IsZero()) j = j + c[k] * basis[k].matrix();
  }
  return ComplexStructureMatrix(j);
}

double MaxResidual(const ComplexStructureMatrix& j, const std::array<double, kNumParams>& s) {
  Eigen::Matrix<double, 8, 8> n = j.Numeric(s);
  return (n * n + Eigen::Matrix<double, 8, 8>::Identity()).cwiseAbs().maxCoeff();
}

// Polynomial in t with ParamField coefficients, low degree first.
using TPoly = std::vector<ParamField>;

TPoly Trim(TPoly p) {
  while (!p.empty() && p.back().IsZero()) p.pop_back();
  return p;
}

TPoly Mul(const TPoly& a, const TPoly& b) {
  if (a.empty() || b.empty()) return {};
  TPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return Trim(r);
}

TPoly Sub(TPoly a, const TPoly& b) {
  a.resize(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return Trim(a);
}

struct Stage2Outcome {
  bool decided = false;  // false: fall back to Newton
  bool inconclusive = false;
  std::vector<std::vector<ParamField>> coefficients;
  std::string note;
};

// Exact treatment: linearize J^2 = -I over the products c_k c_l and impose
// the rank-one condition on the result.
Stage2Outcome ExactStage2(const std::vector<ComplexStructureMatrix>& basis) {
  Stage2Outcome out;
  const int d = static_cast<int>(basis.size());
  std::vector<std::pair<int, int>> mono;
  std::vector<ParamMatrix> prods;
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      mono.push_back({k, l});
      ParamMatrix p = basis[k].matrix() * basis[l].matrix();
      if (k != l) p = p + basis[l].matrix() * basis[k].matrix();
      prods.push_back(std::move(p));
    }
  }
  const int n = static_cast<int>(mono.size());
  ParamMatrix a(64, n);
  std::vector<ParamField> b(64);
  for (int e = 0; e < 64; ++e) {
    for (int u = 0; u < n; ++u) a(e, u) = prods[u](e / 8, e % 8);
    b[e] = e / 8 == e % 8 ? ParamField(-1) : ParamField(0);
  }
  auto sol = SolveAffine(a, b);
  if (!sol) {
    out.decided = true;
    out.note = "linearized J^2 = -I is inconsistent";
    return out;
  }
  if (sol->directions.size() > 1) {
    out.note = "linearized system leaves " + std::to_string(sol->directions.size()) + " free products";
    return out;
  }
  auto index = [&](int k, int l) {
    if (k > l) std::swap(k, l);
    for (int u = 0; u < n; ++u) {
      if (mono[u] == std::make_pair(k, l)) return u;
    }
    return -1;
  };
  std::vector<TPoly> entry(n);
  for (int u = 0; u < n; ++u) {
    entry[u] = {sol->particular[u]};
    if (!sol->directions.empty()) entry[u].push_back(sol->directions[0][u]);
    entry[u] = Trim(entry[u]);
  }
  std::vector<std::vector<ParamField>> product_values;
  if (sol->directions.empty()) {
    product_values.push_back(sol->particular);
  } else {
    std::vector<TPoly> minors;
    for (int a1 = 0; a1 < d; ++a1) {
      for (int a2 = a1 + 1; a2 < d; ++a2) {
        for (int b1 = 0; b1 < d; ++b1) {
          for (int b2 = b1 + 1; b2 < d; ++b2) {
            TPoly p = Sub(Mul(entry[index(a1, b1)], entry[index(a2, b2)]),
                          Mul(entry[index(a1, b2)], entry[index(a2, b1)]));
            if (!p.empty()) minors.push_back(std::move(p));
          }
        }
      }
    }
    if (minors.empty()) {
      out.note = "rank-one conditions leave a free parameter";
      return out;
    }
    std::sort(minors.begin(), minors.end(), [](const TPoly& x, const TPoly& y) { return x.size() < y.size(); });
    const TPoly& lead = minors.front();
    std::vector<ParamField> roots;
    if (lead.size() == 1) {
      out.decided = true;
      out.note = "rank-one conditions have no solution";
      return out;
    }
    if (lead.size() == 2) {
      roots.push_back(-lead[0] / lead[1]);
    } else if (lead.size() == 3 && lead[0].IsConstant() && lead[1].IsConstant() && lead[2].IsConstant()) {
      const mpq_class A = lead[2].ConstantValue(), B = lead[1].ConstantValue(), C = lead[0].ConstantValue();
      const mpq_class disc = B * B - 4 * A * C;
      mpq_class r;
      if (disc < 0) {
        out.decided = true;
        out.note = "rank-one conditions have no real root";
        return out;
      }
      if (!PerfectSquare(disc, &r)) {
        bool proportional = true;
        for (const auto& p : minors) {
          if (p.size() != 3 || !(p[0] * lead[2] == lead[0] * p[2] && p[1] * lead[2] == lead[1] * p[2])) {
            proportional = false;
          }
        }
        out.decided = !proportional;
        out.inconclusive = proportional;
        out.note = proportional ? "irrational rank-one roots" : "rank-one conditions have no common root";
        return out;
      }
      roots.push_back(ParamField(mpq_class((-B + r) / (2 * A))));
      if (r != 0) roots.push_back(ParamField(mpq_class((-B - r) / (2 * A))));
    } else {
      out.note = "rank-one conditions need a non-rational root finder";
      return out;
    }
    for (const auto& t : roots) {
      bool common = true;
      for (const auto& p : minors) {
        ParamField v;
        ParamField pw(1);
        for (const auto& c : p) {
          v += c * pw;
          pw *= t;
        }
        common = common && v.IsZero();
      }
      if (!common) continue;
      std::vector<ParamField> vals(n);
      for (int u = 0; u < n; ++u) vals[u] = sol->particular[u] + t * sol->directions[0][u];
      product_values.push_back(std::move(vals));
    }
  }
  out.decided = true;
  for (const auto& vals : product_values) {
    int k = -1;
    for (int i = 0; i < d && k < 0; ++i) {
      if (!vals[index(i, i)].IsZero()) k = i;
    }
    if (k < 0) continue;
    const ParamField& mkk = vals[index(k, k)];
    if (!mkk.IsConstant()) {
      out.inconclusive = true;
      out.note = "square root of a parameter-dependent product";
      continue;
    }
    mpq_class root;
    if (mkk.ConstantValue() < 0) continue;
    if (!PerfectSquare(mkk.ConstantValue(), &root)) {
      out.inconclusive = true;
      out.note = "irrational coefficient";
      continue;
    }
    std::vector<ParamField> c(d);
    c[k] = ParamField(root);
    for (int l = 0; l < d; ++l) {
      if (l != k) c[l] = vals[index(k, l)] / c[k];
    }
    bool consistent = true;
    for (int a1 = 0; a1 < d; ++a1) {
      for (int a2 = a1; a2 < d; ++a2) consistent = consistent && (c[a1] * c[a2] == vals[index(a1, a2)]);
    }
    if (!consistent) continue;
    out.coefficients.push_back(c);
    for (auto& x : c) x = -x;
    out.coefficients.push_back(c);
  }
  return out;
}

}  // namespace

ComplexStructureMatrix::ComplexStructureMatrix(ParamMatrix m) : m_(std::move(m)) {
  if (m_.rows() != 8 || m_.cols() != 8) throw std::invalid_argument("complex structure must be 8x8");
}

ComplexStructureMatrix ComplexStructureMatrix::Identity() { return ComplexStructureMatrix(ParamMatrix::Identity(8)); }

ComplexStructureMatrix ComplexStructureMatrix::StandardBlock() {
  ParamMatrix m(8, 8);
  for (int i = 0; i < 4; ++i) {
    m(i, i + 4) = ParamField(-1);
    m(i + 4, i) = ParamField(1);
  }
  return ComplexStructureMatrix(m);
}

ComplexStructureMatrix ComplexStructureMatrix::Paper() {
  static constexpr int kRows[8][8] = {
      {0, 0, 0, 0, -1, 1, 0, 0}, {0, 0, 0, 0, 0, 1, 0, 0},  {0, 0, 0, 0, 0, 0, -1, 0}, {0, 0, 0, 0, 0, 0, -1, 1},
      {1, -1, 0, 0, 0, 0, 0, 0}, {0, -1, 0, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0, 0, 0},  {0, 0, 1, -1, 0, 0, 0, 0},
  };
  ParamMatrix m(8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) m(r, c) = ParamField(kRows[r][c]);
  }
  return ComplexStructureMatrix(m);
}

Eigen::Matrix<double, 8, 8> ComplexStructureMatrix::Numeric(const std::array<double, kNumParams>& s) const {
  Eigen::Matrix<double, 8, 8> n;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) n(r, c) = m_(r, c).Eval(s);
  }
  return n;
}

std::string ComplexStructureMatrix::ToString() const {
  std::ostringstream os;
  for (int r = 0; r < 8; ++r) {
    os << (r == 0 ? "[[" : " [");
    for (int c = 0; c < 8; ++c) os << (c ? ", " : "") << m_(r, c).ToString();
    os << (r == 7 ? "]]" : "],\n");
  }
  return os.str();
}

bool VerifyComplexStructure(const ComplexStructureMatrix& j) {
  return (j.matrix() * j.matrix() + ParamMatrix::Identity(8)).IsZero();
}

std::array<TrigExpr, 8> Pushforward(const SnakeModel& m, const VectorField& x) {
  std::array<TrigExpr, 8> v;
  for (int r = 0; r < 8; ++r) v[r] = x.Apply(Emb(m, r));
  return v;
}

TangentData TangentAt(const SnakeModel& m, const NumericPoint& p) {
  TangentData t;
  t.q8 = m.Embed(p);
  const auto s = m.params.NumericValues();
  const NumericPoint q = R8Point(t.q8, s);
  for (int i = 0; i < 3; ++i) {
    for (int r = 0; r < 8; ++r) t.dh(i, r) = m.h[i].Differentiate(Chart::R8().var(r)).Eval(q);
  }
  for (int a = 0; a < 2; ++a) {
    const auto v = Pushforward(m, m.Xi(4 + a));
    for (int r = 0; r < 8; ++r) t.distribution(r, a) = v[r].Eval(p);
  }
  return t;
}

IntersectionResult CrIntersection(const ComplexStructureMatrix& j, const SnakeModel& m, const TangentData& t) {
  const auto s = m.params.NumericValues();
  const NumericPoint q = R8Point(t.q8, s);
  for (int i = 0; i < 3; ++i) {
    const double h = m.h[i].Eval(q);
    if (std::abs(h) > 1e-10) {
      throw OffLocusError("point is off the constraint locus: |h" + std::to_string(i + 1) + "| = " + std::to_string(h));
    }
  }
  Eigen::Matrix<double, 6, 8> a;
  a.topRows<3>() = t.dh;
  a.bottomRows<3>() = t.dh * j.Numeric(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()[i] > 1e-8;
  IntersectionResult r;
  r.dimension = 8 - rank;
  const Eigen::MatrixXd k = svd.matrixV().rightCols(r.dimension);
  const Eigen::MatrixXd d = OrthonormalColumns(t.distribution);
  const Eigen::MatrixXd diff = k * k.transpose() - d * d.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> dn(diff);
  r.projector_distance = dn.singularValues()[0];
  r.equals_distribution = r.dimension == d.cols() && r.projector_distance < 1e-8;
  return r;
}

IntersectionResult CrIntersection(const ComplexStructureMatrix& j, const SnakeModel& m, const NumericPoint& p) {
  return CrIntersection(j, m, TangentAt(m, p));
}

const char* SolveStatusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::kFound:
      return "found";
    case SolveStatus::kEmpty:
      return "empty";
    case SolveStatus::kInconclusive:
      return "inconclusive";
  }
  return "";
}

SolveResult SolveComplexStructure(const SnakeModel& m, const SolveOptions& options) {
  if (!m.params.s2.IsConstant()) throw PreconditionError("s2 must be a fixed rational number");
  SolveResult res;
  res.seed = options.seed;
  const auto s = m.params.NumericValues();

  // Stage 1: linear conditions on the 64 entries.
  std::vector<Covector> covectors;
  for (const auto& c : ConstraintCovectors(m)) covectors.push_back(c);
  for (const auto& c : NonSkidCovectors(m)) covectors.push_back(c);
  const std::array<std::array<TrigExpr, 8>, 2> v = {Pushforward(m, m.Xi(4)), Pushforward(m, m.Xi(5))};
  std::vector<std::vector<ParamField>> rows;
  for (const auto& a : covectors) {
    for (const auto& vb : v) {
      std::map<TermKey, std::vector<ParamField>> by_key;
      for (int r = 0; r < 8; ++r) {
        if (a[r].IsZero()) continue;
        for (int c = 0; c < 8; ++c) {
          if (vb[c].IsZero()) continue;
          const TrigExpr product = a[r] * vb[c];
          for (const auto& [key, coeff] : product.terms()) {
            auto& row = by_key[key];
            if (row.empty()) row.assign(64, ParamField());
            row[r * 8 + c] += coeff;
          }
        }
      }
      for (auto& [key, row] : by_key) rows.push_back(std::move(row));
    }
  }
  res.stage1_equations = static_cast<int>(rows.size());
  ParamMatrix lin(static_cast<int>(rows.size()), 64);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < 64; ++j) lin(static_cast<int>(i), j) = rows[i][j];
  }
  for (const auto& n : Nullspace(lin)) {
    ParamMatrix b(8, 8);
    for (int e = 0; e < 64; ++e) b(e / 8, e % 8) = n[e];
    res.stage1_basis.emplace_back(b);
  }
  res.stage1_dimension = static_cast<int>(res.stage1_basis.size());

  // Stage 2: J^2 = -I on the solution space.
  std::vector<std::vector<ParamField>> coeffs;
  bool inconclusive = false;
  bool use_newton = res.stage1_dimension > options.exact_max_dimension;
  if (!use_newton) {
    Stage2Outcome ex = ExactStage2(res.stage1_basis);
    if (!ex.note.empty()) res.notes.push_back(ex.note);
    use_newton = !ex.decided;
    inconclusive = ex.inconclusive;
    coeffs = std::move(ex.coefficients);
    res.stage2_method = "exact";
  }
  if (use_newton) {
    res.stage2_method = "newton";
    const int d = res.stage1_dimension;
    std::vector<Eigen::MatrixXd> b;
    for (const auto& bm : res.stage1_basis) b.push_back(bm.Numeric(s));
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::set<std::vector<mpq_class>> seen;
    bool any_unrationalized = false;
    for (int start = 0; start < options.newton_starts; ++start) {
      Eigen::VectorXd c(d);
      for (int k = 0; k < d; ++k) c[k] = normal(rng);
      double lambda = 1e-3;
      double err = 0;
      for (int it = 0; it < options.newton_max_iterations; ++it) {
        Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(8, 8);
        for (int k = 0; k < d; ++k) jm += c[k] * b[k];
        const Eigen::MatrixXd f = jm * jm + Eigen::MatrixXd::Identity(8, 8);
        err = f.cwiseAbs().maxCoeff();
        if (err < options.newton_tolerance) break;
        Eigen::MatrixXd jac(64, d);
        for (int k = 0; k < d; ++k) {
          const Eigen::MatrixXd g = b[k] * jm + jm * b[k];
          jac.col(k) = Eigen::Map<const Eigen::VectorXd>(g.data(), 64);
        }
        const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), 64);
        Eigen::MatrixXd h = jac.transpose() * jac;
        h.diagonal().array() += lambda;
        const Eigen::VectorXd step = h.ldlt().solve(-jac.transpose() * fv);
        Eigen::VectorXd trial = c + step;
        Eigen::MatrixXd jt = Eigen::MatrixXd::Zero(8, 8);
        for (int k = 0; k < d; ++k) jt += trial[k] * b[k];
        if ((jt * jt + Eigen::MatrixXd::Identity(8, 8)).norm() < f.norm()) {
          c = trial;
          lambda = std::max(lambda / 10, 1e-15);
        } else {
          lambda *= 10;
          if (lambda > 1e12) break;
        }
      }
      if (err >= options.newton_tolerance) continue;
      ++res.newton_converged;
      std::vector<mpq_class> key;
      std::vector<ParamField> exact;
      for (int k = 0; k < d; ++k) {
        key.push_back(Rationalize(c[k], 1000));
        exact.emplace_back(key.back());
      }
      if (!seen.insert(key).second) continue;
      if (VerifyComplexStructure(Combine(res.stage1_basis, exact))) {
        coeffs.push_back(exact);
      } else {
        any_unrationalized = true;
      }
    }
    if (coeffs.empty()) {
      inconclusive = true;
      res.notes.push_back(res.newton_converged == 0 ? "newton stagnated at every start"
                                                    : "newton roots could not be rationalized");
    } else if (any_unrationalized) {
      res.notes.push_back("some newton roots could not be rationalized");
    }
  }
  res.stage2_candidates = static_cast<int>(coeffs.size());

  // Stage 3: the intersection must be D.
  std::mt19937_64 rng(options.seed ^ 0x5bd1e995ULL);
  std::vector<NumericPoint> points;
  for (int i = 0; i < options.filter_points; ++i) points.push_back(m.SamplePoint(rng));
  std::vector<TangentData> tangents;
  for (const auto& p : points) tangents.push_back(TangentAt(m, p));
  for (const auto& c : coeffs) {
    ComplexStructureMatrix j = Combine(res.stage1_basis, c);
    if (!VerifyComplexStructure(j)) continue;
    bool ok = true;
    for (const auto& t : tangents) ok = ok && CrIntersection(j, m, t).equals_distribution;
    if (!ok) {
      ++res.stage3_rejected;
      continue;
    }
    if (std::find(res.solutions.begin(), res.solutions.end(), j) != res.solutions.end()) continue;
    res.residuals.push_back(MaxResidual(j, s));
    res.solutions.push_back(std::move(j));
  }
  res.status = !res.solutions.empty() ? SolveStatus::kFound
               : inconclusive         ? SolveStatus::kInconclusive
                                      : SolveStatus::kEmpty;
  return res;
}

std::array<LinearCoordinate, 4> PaperCoordinates() {
  std::array<LinearCoordinate, 4> z;
  z[0].name = "z1";
  z[0].re[kX1] = 1;
  z[0].im[kY2] = 1;
  z[0].im[kY1] = -1;
  z[1].name = "z2";
  z[1].re[kX2] = 1;
  z[1].im[kY2] = 1;
  z[2].name = "z3";
  z[2].re[kX3] = 1;
  z[2].im[kY3] = 1;
  z[3].name = "z4";
  z[3].re[kX4] = 1;
  z[3].im[kY4] = 1;
  z[3].im[kY3] = -1;
  return z;
}

LinearCoordinate Conjugate(const LinearCoordinate& z) {
  LinearCoordinate c = z;
  c.name = "conj(" + z.name + ")";
  for (auto& x : c.im) x = -x;
  return c;
}

HolomorphicCheck CheckHolomorphic(const ComplexStructureMatrix& j, const std::vector<LinearCoordinate>& coords) {
  HolomorphicCheck out;
  auto row_times = [&](const std::array<mpq_class, 8>& a) {
    std::array<ParamField, 8> r;
    for (int c = 0; c < 8; ++c) {
      for (int k = 0; k < 8; ++k) {
        if (a[k] != 0) r[c] += ParamField(a[k]) * j(k, c);
      }
    }
    return r;
  };
  auto equal = [](const std::array<ParamField, 8>& x, const std::array<mpq_class, 8>& y, int sign) {
    for (int c = 0; c < 8; ++c) {
      if (!(x[c] == ParamField(mpq_class(sign * y[c])))) return false;
    }
    return true;
  };
  for (const auto& z : coords) {
    // dz o J = aJ + i bJ against eps i (a + i b) = -eps b + i eps a.
    const auto aj = row_times(z.re), bj = row_times(z.im);
    std::optional<int> eps;
    for (int e : {1, -1}) {
      if (equal(aj, z.im, -e) && equal(bj, z.re, e)) eps = e;
    }
    out.eps.push_back(eps);
  }
  out.consistent = !out.eps.empty() && out.eps[0].has_value();
  for (const auto& e : out.eps) out.consistent = out.consistent && e == out.eps[0];
  out.sign = out.consistent ? *out.eps[0] : 0;
  return out;
}

HolomorphicCheck CheckHolomorphic(const ComplexStructureMatrix& j) {
  const auto z = PaperCoordinates();
  return CheckHolomorphic(j, std::vector<LinearCoordinate>(z.begin(), z.end()));
}

AdaptedCoframe BuildAdaptedCoframe(const SnakeModel& m, int samples, uint64_t seed) {
  RequireHalf(m);
  const Chart& c = Chart::M();
  AdaptedCoframe f;
  const CKForm u1 = ToComplex(m.pfaffian[0]), u2 = ToComplex(m.pfaffian[1]);
  f.omega[0] = u1 + CExpr::I() * u2;
  f.omega[1] = u1 - CExpr::I() * u2;
  f.omega[2] = ToComplex(m.pfaffian[2]);
  const KForm dx2 = ExtD(c, Emb(m, kX2)), dy2 = ExtD(c, Emb(m, kY2));
  f.omega[3] = ToComplex(dx2) + CExpr::I() * ToComplex(dy2);
  f.omega[4] = ToComplex(dx2) - CExpr::I() * ToComplex(dy2);
  CKForm w = f.omega[0];
  for (int i = 1; i < 5; ++i) w = Wedge(w, f.omega[i]);
  f.wedge = w.Coefficient(0b11111);
  if (f.wedge.IsZero()) throw std::runtime_error("adapted coframe is degenerate: 5-fold wedge vanishes");
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) f.wedge_samples.push_back(std::abs(EvalScalar(f.wedge, m.SamplePoint(rng))));
  return f;
}

std::array<double, 5> BetaChart::FromR8(const Eigen::VectorXd& q) const {
  return {std::atan2(q[kY2] - q[kY1], q[kX1] - q[kX2]), std::atan2(q[kY2] - q[kY3], q[kX2] - q[kX3]),
          std::atan2(q[kY4] - q[kY3], q[kX4] - q[kX3]), q[kX2], q[kY2]};
}

Eigen::VectorXd BetaChart::ToR8(const std::array<double, 5>& b, const std::array<double, kNumParams>& s) const {
  NumericPoint p;
  for (int i = 0; i < 5; ++i) p.Set(chart.var(i), b[i]);
  for (int i = 0; i < kNumParams; ++i) p.SetParam(i, s[i]);
  Eigen::VectorXd q(8);
  for (int r = 0; r < 8; ++r) q[r] = to_r8.at(Chart::R8().var(r)).Eval(p);
  return q;
}

BetaChart BuildBetaChart(const SnakeModel& m) {
  RequireHalf(m);
  BetaChart bc;
  bc.chart = Chart({Var::kBeta1, Var::kBeta2, Var::kBeta3, Var::kX2, Var::kY2});
  const TrigExpr x2 = TrigExpr::Variable(Var::kX2), y2 = TrigExpr::Variable(Var::kY2);
  const TrigExpr s1(m.params.s1), s3(m.params.s3);
  const TrigExpr c1 = TrigExpr::Cos(Var::kBeta1), n1 = TrigExpr::Sin(Var::kBeta1);
  const TrigExpr c2 = TrigExpr::Cos(Var::kBeta2), n2 = TrigExpr::Sin(Var::kBeta2);
  const TrigExpr c3 = TrigExpr::Cos(Var::kBeta3), n3 = TrigExpr::Sin(Var::kBeta3);
  const TrigExpr x3 = x2 - c2, y3 = y2 - n2;
  bc.to_r8 = {{Var::kX1, x2 + s1 * c1}, {Var::kY1, y2 - s1 * n1}, {Var::kX2, x2},           {Var::kY2, y2},
              {Var::kX3, x3},           {Var::kY3, y3},           {Var::kX4, x3 + s3 * c3}, {Var::kY4, y3 + s3 * n3}};
  Substitution into_r8;
  into_r8.cartesian = bc.to_r8;
  for (int i = 0; i < 3; ++i) {
    if (!m.h[i].Substitute(into_r8).IsZero()) {
      throw std::runtime_error("beta substitution does not annihilate h" + std::to_string(i + 1));
    }
  }
  // Angle map: search integer combinations of (theta, phi, psi).
  const std::array<std::pair<Var, Var>, 3> targets = {
      std::pair{Var::kX1, Var::kY1}, std::pair{Var::kX3, Var::kY3}, std::pair{Var::kX4, Var::kY4}};
  Substitution sub;
  sub.cartesian = {{Var::kX2, Emb(m, kX2)}, {Var::kY2, Emb(m, kY2)}};
  for (int k = 0; k < 3; ++k) {
    const Var beta = AngleVar(AngleIndex(Var::kBeta1) + k);
    bool found = false;
    for (int qt = 0; qt < 4 && !found; ++qt) {
      for (int code = 0; code < 27 && !found; ++code) {
        AngleAffine a;
        a.quarter_turns = qt;
        a.coeff[AngleIndex(Var::kTheta)] = static_cast<int16_t>(code % 3 - 1);
        a.coeff[AngleIndex(Var::kPhi)] = static_cast<int16_t>(code / 3 % 3 - 1);
        a.coeff[AngleIndex(Var::kPsi)] = static_cast<int16_t>(code / 9 - 1);
        Substitution trial = sub;
        trial.angles[beta] = a;
        const auto& [vx, vy] = targets[k];
        if (bc.to_r8.at(vx).Substitute(trial) == m.embedding.at(vx) &&
            bc.to_r8.at(vy).Substitute(trial) == m.embedding.at(vy)) {
          bc.beta_of_angles[k] = a;
          sub.angles[beta] = a;
          found = true;
        }
      }
    }
    if (!found) throw std::runtime_error("no affine angle map for beta" + std::to_string(k + 1));
  }
  // Invert the 3x3 integer map.
  int a[3][3];
  int off[3];
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < 3; ++l) a[k][l] = bc.beta_of_angles[k].coeff[l];
    off[k] = bc.beta_of_angles[k].quarter_turns;
  }
  const int det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                  a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                  a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (det != 1 && det != -1) throw std::runtime_error("angle map is not unimodular");
  int inv[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) * det;
    }
  }
  for (int i = 0; i < 3; ++i) {
    AngleAffine g;
    int q = 0;
    for (int j = 0; j < 3; ++j) {
      g.coeff[AngleIndex(Var::kBeta1) + j] = static_cast<int16_t>(inv[i][j]);
      q -= inv[i][j] * off[j];
    }
    g.quarter_turns = ((q % 4) + 4) % 4;
    bc.angles_of_beta[i] = g;
  }
  return bc;
}

Eigenfields BuildEigenfields(const SnakeModel& m, const ComplexStructureMatrix& j) {
  RequireHalf(m);
  if (!VerifyComplexStructure(j)) throw PreconditionError("J is not a complex structure");
  const std::array<TrigExpr, 8> v4 = Pushforward(m, m.Xi(4)), v5 = Pushforward(m, m.Xi(5));
  const TrigExpr c = TrigExpr::Cos(Var::kTheta), s = TrigExpr::Sin(Var::kTheta);
  const TrigExpr s2(m.params.s2), s2c = TrigExpr(1) - s2;
  // d theta and cos(theta) dx + sin(theta) dy as covectors on R8.
  Covector dtheta, dforward;
  dtheta[kY2] = c;
  dtheta[kY3] = -c;
  dtheta[kX2] = -s;
  dtheta[kX3] = s;
  dforward[kX2] = c * s2c;
  dforward[kX3] = c * s2;
  dforward[kY2] = s * s2c;
  dforward[kY3] = s * s2;
  Eigenfields e;
  for (int col = 0; col < 2; ++col) {
    const auto jv = Apply(j.matrix(), col == 0 ? v4 : v5);
    const TrigExpr a = Contract(dtheta, jv), b = Contract(dforward, jv);
    for (int r = 0; r < 8; ++r) {
      if (!(jv[r] - a * v4[r] - b * v5[r]).IsZero()) throw std::runtime_error("J does not preserve D");
    }
    e.jd[0][col] = a;
    e.jd[1][col] = b;
  }
  const VectorField jxi5 = e.jd[0][1] * m.Xi(4) + e.jd[1][1] * m.Xi(5);
  const CVectorField xi = ToComplex(m.Xi(5)), jxi = ToComplex(jxi5);
  e.zeta_plus = xi - CExpr::I() * jxi;
  e.zeta_minus = xi + CExpr::I() * jxi;
  return e;
}

}  // namespace snakecr
