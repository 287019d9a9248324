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

#include "snakecr/snake_model.hpp"

#include <sstream>

#include "snakecr/parser.hpp"

namespace snakecr {

namespace {

using Vec2 = std::array<TrigExpr, 2>;

Vec2 Add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
Vec2 Sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
Vec2 Scale(const TrigExpr& c, const Vec2& a) { return {c * a[0], c * a[1]}; }

Vec2 Direction(Var extra, int orientation) {
  std::array<int16_t, kNumAngles> f = TrigExpr::UnitFreq(Var::kTheta);
  if (extra != Var::kTheta) f[AngleIndex(extra)] = static_cast<int16_t>(orientation);
  return {TrigExpr::Cos(f), TrigExpr::Sin(f)};
}

KForm CrossForm(const Vec2& point, const Vec2& dir) {
  const Chart& m = Chart::M();
  return dir[1] * ExtD(m, point[0]) - dir[0] * ExtD(m, point[1]);
}

VectorField FieldFromStrings(const std::array<const char*, 5>& comps, const SnakeParams& p) {
  std::vector<TrigExpr> c;
  for (const char* s : comps) c.push_back(Parse(s).SpecializeParams(p.ExactValues()));
  return VectorField(Chart::M(), c);
}

KForm FormFromStrings(const std::array<const char*, 5>& comps, const SnakeParams& p) {
  KForm w(Chart::M(), 1);
  for (int i = 0; i < 5; ++i) w.Set(1u << i, Parse(comps[i]).SpecializeParams(p.ExactValues()));
  return w;
}

std::array<VectorField, 3> Symmetries() {
  const Chart& m = Chart::M();
  VectorField s3(m, {TrigExpr::Variable(Var::kY), -TrigExpr::Variable(Var::kX), TrigExpr(-1), TrigExpr(), TrigExpr()});
  return {VectorField::Coordinate(m, Var::kX), VectorField::Coordinate(m, Var::kY), s3};
}

std::array<TrigExpr, 3> Constraints(const SnakeParams& p) {
  auto v = [](Var x) { return TrigExpr::Variable(x); };
  auto sq = [](const TrigExpr& e) { return e * e; };
  return {
      sq(v(Var::kX2) - v(Var::kX1)) + sq(v(Var::kY2) - v(Var::kY1)) - TrigExpr(p.s1 * p.s1),
      sq(v(Var::kX3) - v(Var::kX2)) + sq(v(Var::kY3) - v(Var::kY2)) - TrigExpr(1),
      sq(v(Var::kX4) - v(Var::kX3)) + sq(v(Var::kY4) - v(Var::kY3)) - TrigExpr(p.s3 * p.s3),
  };
}

// Solves Upsilon(xi) = 0 for the unknown components, using only constant
// pivots.
VectorField SolveKernel(const std::array<KForm, 3>& forms, const std::map<int, TrigExpr>& fixed,
                        const std::vector<int>& unknown) {
  const int n = static_cast<int>(unknown.size());
  struct Row {
    std::vector<TrigExpr> a;
    TrigExpr rhs;
  };
  std::vector<Row> rows;
  for (const auto& w : forms) {
    Row r;
    for (int j : unknown) r.a.push_back(w[j]);
    for (const auto& [i, f] : fixed) r.rhs -= w[i] * f;
    rows.push_back(std::move(r));
  }
  std::vector<int> pivot_row(n, -1);
  std::vector<bool> taken(rows.size(), false);
  for (int c = 0; c < n; ++c) {
    int pr = -1;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (taken[r]) continue;
      auto p = rows[r].a[c].AsParam();
      if (p && !p->IsZero()) {
        pr = static_cast<int>(r);
        break;
      }
    }
    if (pr < 0) throw ModelError("kernel of the Pfaffian system does not have rank 2 with constant pivots");
    taken[pr] = true;
    pivot_row[c] = pr;
    const ParamField inv = rows[pr].a[c].AsParam()->Inverse();
    for (auto& e : rows[pr].a) e = e.Scaled(inv);
    rows[pr].rhs = rows[pr].rhs.Scaled(inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (static_cast<int>(r) == pr || rows[r].a[c].IsZero()) continue;
      const TrigExpr f = rows[r].a[c];
      for (int k = 0; k < n; ++k) rows[r].a[k] -= f * rows[pr].a[k];
      rows[r].rhs -= f * rows[pr].rhs;
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (taken[r]) continue;
    bool zero = rows[r].rhs.IsZero();
    for (const auto& e : rows[r].a) zero = zero && e.IsZero();
    if (!zero) throw ModelError("Pfaffian system is inconsistent with the kernel normalization");
  }
  VectorField x(Chart::M());
  for (const auto& [i, f] : fixed) x[i] = f;
  for (int c = 0; c < n; ++c) x[unknown[c]] = rows[pivot_row[c]].rhs;
  return x;
}

DiscrepancyEntry Classify(const std::string& id, const std::vector<TrigExpr>& literal,
                          const std::vector<TrigExpr>& derived) {
  DiscrepancyEntry e;
  e.id = id;
  e.literal = literal;
  e.derived = derived;
  bool mismatch = false;
  for (std::size_t i = 0; i < literal.size(); ++i) {
    e.difference.push_back(derived[i] - literal[i]);
    if (e.difference.back().IsZero()) continue;
    if ((derived[i] + literal[i]).IsZero()) {
      e.flipped_components.push_back(static_cast<int>(i));
    } else {
      mismatch = true;
    }
  }
  e.verdict = mismatch ? Verdict::kMismatch : e.flipped_components.empty() ? Verdict::kMatch : Verdict::kSignFlip;
  return e;
}

std::vector<TrigExpr> Components(const KForm& w) {
  std::vector<TrigExpr> c;
  for (int i = 0; i < w.chart().dim(); ++i) c.push_back(w[i]);
  return c;
}

struct Candidate {
  EmbeddingConvention conv;
  std::map<Var, TrigExpr> embedding;
  std::array<KForm, 3> pfaffian;
  VectorField xi4, xi5;
};

Candidate Derive(const SnakeParams& p, const LiteralModel& lit, int q1_sign, int q4_sign, int orientation,
                 WheelConvention wheel) {
  Candidate c;
  c.conv.q1_sign = q1_sign;
  c.conv.q4_sign = q4_sign;
  c.conv.orientation = orientation;
  c.conv.wheel = wheel;
  const TrigExpr s1(p.s1), s2(p.s2), s3(p.s3);
  const Vec2 w = {TrigExpr::Variable(Var::kX), TrigExpr::Variable(Var::kY)};
  const Vec2 u = Direction(Var::kTheta, orientation);
  const Vec2 q2 = Add(w, Scale(s2, u));
  const Vec2 q3 = Sub(w, Scale(TrigExpr(1) - s2, u));
  const Vec2 q1 = Add(q2, Scale(TrigExpr(q1_sign) * s1, Direction(Var::kPhi, orientation)));
  const Vec2 q4 = Add(q3, Scale(TrigExpr(q4_sign) * s3, Direction(Var::kPsi, orientation)));
  c.embedding = {{Var::kX1, q1[0]}, {Var::kY1, q1[1]}, {Var::kX2, q2[0]}, {Var::kY2, q2[1]},
                 {Var::kX3, q3[0]}, {Var::kY3, q3[1]}, {Var::kX4, q4[0]}, {Var::kY4, q4[1]}};
  const Vec2 wheel_point = wheel == WheelConvention::kDifferentiated
                               ? w
                               : Add(Scale(s2, q2), Scale(TrigExpr(1) - s2, q3));
  std::array<KForm, 3> raw = {CrossForm(q1, Sub(q2, q1)), CrossForm(wheel_point, Sub(q3, q2)),
                              CrossForm(q4, Sub(q4, q3))};
  for (int a = 0; a < 3; ++a) {
    ParamField scale(1);
    const TrigExpr& r = raw[a][0];
    const TrigExpr& l = lit.pfaffian[a][0];
    if (!r.IsZero()) {
      const auto& [key, coeff] = r.terms()[0];
      for (const auto& [lk, lc] : l.terms()) {
        if (lk == key) scale = lc / coeff;
      }
      if (!(r.Scaled(scale) == l)) {
        const ParamField len = a == 0 ? p.s1 : a == 1 ? ParamField(1) : p.s3;
        scale = (r.Scaled(len.Inverse()) == l || !(r.Scaled(-len.Inverse()) == l)) ? len.Inverse() : -len.Inverse();
      }
    }
    c.conv.form_scale[a] = scale;
    c.pfaffian[a] = TrigExpr(scale) * raw[a];
  }
  // Lateral drift of (x,y) needed when the constrained wheel is not at (x,y).
  const TrigExpr lateral = wheel == WheelConvention::kDifferentiated ? TrigExpr() : TrigExpr(2) * s2 - TrigExpr(1);
  c.xi4 = SolveKernel(c.pfaffian,
                      {{0, lateral * TrigExpr::Sin(Var::kTheta)},
                       {1, -lateral * TrigExpr::Cos(Var::kTheta)},
                       {2, TrigExpr(1)}},
                      {3, 4});
  c.xi5 = SolveKernel(c.pfaffian, {{0, TrigExpr::Cos(Var::kTheta)}, {1, TrigExpr::Sin(Var::kTheta)}, {2, TrigExpr()}},
                      {3, 4});
  int score = 0;
  for (int a = 0; a < 3; ++a) {
    Verdict v = Classify("", Components(lit.pfaffian[a]), Components(c.pfaffian[a])).verdict;
    score += v == Verdict::kMatch ? 2 : v == Verdict::kSignFlip ? 1 : 0;
  }
  for (int b : {4, 5}) {
    const VectorField& d = b == 4 ? c.xi4 : c.xi5;
    Verdict v = Classify("", lit.Xi(b).components(), d.components()).verdict;
    score += v == Verdict::kMatch ? 2 : v == Verdict::kSignFlip ? 1 : 0;
  }
  c.conv.score = score;
  return c;
}

}  // namespace

SnakeParams SnakeParams::FromStrings(const std::string& s1, const std::string& s2, const std::string& s3) {
  SnakeParams p;
  p.s1 = ParseParam(s1);
  p.s2 = ParseParam(s2);
  p.s3 = ParseParam(s3);
  p.Validate();
  return p;
}

SnakeParams SnakeParams::Rational(const mpq_class& s1, const mpq_class& s2, const mpq_class& s3) {
  SnakeParams p;
  p.s1 = ParamField(s1);
  p.s2 = ParamField(s2);
  p.s3 = ParamField(s3);
  p.Validate();
  return p;
}

void SnakeParams::Validate() const {
  if (s1.IsConstant() && s1.ConstantValue() <= 0) throw std::invalid_argument("s1 must be positive");
  if (s3.IsConstant() && s3.ConstantValue() <= 0) throw std::invalid_argument("s3 must be positive");
  if (s2.IsConstant() && (s2.ConstantValue() <= 0 || s2.ConstantValue() >= 1)) {
    throw std::invalid_argument("s2 must lie strictly between 0 and 1");
  }
}

std::array<std::optional<mpq_class>, kNumParams> SnakeParams::ExactValues() const {
  std::array<std::optional<mpq_class>, kNumParams> v;
  const ParamField* f[] = {&s1, &s2, &s3};
  for (int i = 0; i < kNumParams; ++i) {
    if (f[i]->IsConstant()) v[i] = f[i]->ConstantValue();
  }
  return v;
}

std::array<double, kNumParams> SnakeParams::NumericValues() const {
  static constexpr std::array<double, kNumParams> kStandIn = {1.3, 0.4, 0.8};
  std::array<double, kNumParams> out{};
  const ParamField* f[] = {&s1, &s2, &s3};
  for (int i = 0; i < kNumParams; ++i) out[i] = f[i]->Eval(kStandIn);
  return out;
}

std::string SnakeParams::ToString() const {
  return "s1=" + s1.ToString() + ", s2=" + s2.ToString() + ", s3=" + s3.ToString();
}

std::string EmbeddingConvention::Describe() const {
  std::ostringstream os;
  const char* o = orientation > 0 ? "+" : "-";
  os << "q2=(x,y)+s2*u, q3=(x,y)-(1-s2)*u, u=(cos(theta),sin(theta)); "
     << "q1=q2" << (q1_sign > 0 ? "+" : "-") << "s1*(cos(theta" << o << "phi),sin(theta" << o << "phi)); "
     << "q4=q3" << (q4_sign > 0 ? "+" : "-") << "s3*(cos(theta" << o << "psi),sin(theta" << o << "psi)); "
     << "middle wheel " << (wheel == WheelConvention::kDifferentiated ? "(1-s2)q2+s2q3" : "s2q2+(1-s2)q3")
     << "; form scales " << form_scale[0].ToString() << ", " << form_scale[1].ToString() << ", "
     << form_scale[2].ToString();
  return os.str();
}

NumericPoint SnakeModel::SamplePoint(std::mt19937_64& rng) const {
  return SampleChartPoint(Chart::M(), rng, params.NumericValues());
}

Eigen::VectorXd SnakeModel::Embed(const NumericPoint& p) const {
  Eigen::VectorXd q(8);
  const Chart& r8 = Chart::R8();
  for (int i = 0; i < 8; ++i) q[i] = embedding.at(r8.var(i)).Eval(p);
  return q;
}

SnakeModel BuildModel(const SnakeParams& p, const BuildOptions& options) {
  p.Validate();
  const LiteralModel lit = LiteralPaperModel(p);
  std::vector<std::array<int, 3>> choices;
  if (options.signs) {
    choices.push_back(*options.signs);
  } else {
    for (int o : {1, -1}) {
      for (int a : {-1, 1}) {
        for (int b : {1, -1}) choices.push_back({a, b, o});
      }
    }
  }
  std::optional<Candidate> best;
  std::string last_error = "no embedding convention tried";
  for (const auto& ch : choices) {
    try {
      Candidate c = Derive(p, lit, ch[0], ch[1], ch[2], options.wheel);
      if (!best || c.conv.score > best->conv.score) best = std::move(c);
    } catch (const ModelError& e) {
      last_error = e.what();
    }
  }
  if (!best) throw ModelError(last_error);

  SnakeModel m;
  m.params = p;
  m.conventions = best->conv;
  m.h = Constraints(p);
  m.embedding = best->embedding;
  m.pfaffian = best->pfaffian;
  m.xi[3] = best->xi4;
  m.xi[4] = best->xi5;
  m.xi[2] = LieBracket(m.xi[4], m.xi[3]);
  m.xi[1] = LieBracket(m.xi[4], m.xi[2]);
  m.xi[0] = LieBracket(m.xi[3], m.xi[2]);
  m.symmetries = Symmetries();
  return m;
}

LiteralModel LiteralPaperModel(const SnakeParams& p) {
  LiteralModel l;
  const auto values = p.ExactValues();
  l.h = {Parse("(x2-x1)^2+(y2-y1)^2-s1^2").SpecializeParams(values),
         Parse("(x3-x2)^2+(y3-y2)^2-1").SpecializeParams(values),
         Parse("(x4-x3)^2+(y4-y3)^2-s3^2").SpecializeParams(values)};
  l.pfaffian = {
      FormFromStrings({"sin(phi+theta)", "-cos(phi+theta)", "-(s2*cos(phi)-s1)", "s1", "0"}, p),
      FormFromStrings({"sin(theta)", "-cos(theta)", "0", "0", "0"}, p),
      FormFromStrings({"sin(psi+theta)", "-cos(psi+theta)", "-((1-s2)*cos(psi)-s3)", "0", "-s3"}, p),
  };
  l.xi[3] = FieldFromStrings({"0", "0", "1", "-(1-s2/s1*cos(phi))", "-(1-(1-s2)/s3*cos(psi))"}, p);
  l.xi[4] = FieldFromStrings({"cos(theta)", "sin(theta)", "0", "1/s1*sin(phi)", "-1/s3*sin(psi)"}, p);
  l.xi[2] = FieldFromStrings(
      {"sin(theta)", "-cos(theta)", "0", "-1/s1*(s2/s1-cos(phi))", "1/s3*((1-s2)/s3-cos(psi))"}, p);
  l.xi[1] = FieldFromStrings(
      {"0", "0", "0", "-1/s1^2*(1-s2/s1*cos(phi))", "-1/s3^2*(1-(1-s2)/s3*cos(psi))"}, p);
  l.xi[0] = FieldFromStrings(
      {"cos(theta)", "sin(theta)", "0", "(s1^2-s2^2)/s1^3*sin(phi)", "((1-s2)^2-s3^2)/s3^3*sin(psi)"}, p);
  l.symmetries = Symmetries();
  return l;
}

const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kMatch:
      return "match";
    case Verdict::kSignFlip:
      return "sign-flip";
    case Verdict::kMismatch:
      return "mismatch";
  }
  return "";
}

const DiscrepancyEntry& DiscrepancyReport::Find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw std::out_of_range("no discrepancy entry " + id);
}

DiscrepancyReport MakeDiscrepancyReport(const SnakeModel& m, const LiteralModel& lit) {
  DiscrepancyReport r;
  for (int i = 0; i < 3; ++i) r.entries.push_back(Classify("h" + std::to_string(i + 1), {lit.h[i]}, {m.h[i]}));
  for (int a = 0; a < 3; ++a) {
    r.entries.push_back(
        Classify("Upsilon" + std::to_string(a + 1), Components(lit.pfaffian[a]), Components(m.pfaffian[a])));
  }
  for (int b : {4, 5, 3, 2, 1}) {
    r.entries.push_back(Classify("xi" + std::to_string(b), lit.Xi(b).components(), m.Xi(b).components()));
  }
  for (int a = 0; a < 3; ++a) {
    for (int b : {4, 5}) {
      r.literal_pairings.push_back({a + 1, b, Pair(lit.pfaffian[a], lit.Xi(b))});
      r.derived_pairings.push_back({a + 1, b, Pair(m.pfaffian[a], m.Xi(b))});
    }
  }
  return r;
}

GrowthCheck CheckGrowth(const SnakeModel& m, int points, uint64_t seed) {
  GrowthCheck g;
  GrowthOptions opt;
  opt.max_depth = 3;
  opt.points = points;
  opt.seed = seed;
  opt.params = m.params.NumericValues();
  g.growth = GrowthVector(m.distribution(), opt);
  if (g.growth.symbolic != std::vector<int>{2, 3, 5}) throw ModelError("generic growth vector is not (2,3,5)");
  g.brackets = {m.Xi(3), m.Xi(2), m.Xi(1)};
  std::vector<std::vector<TrigExpr>> rows;
  for (int k = 1; k <= 5; ++k) rows.push_back(m.Xi(k).components());
  g.frame_determinant = Determinant(rows);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int samples = std::max(1, points) * 50;
  for (int i = 0; i < samples; ++i) {
    if (std::abs(g.frame_determinant.Eval(m.SamplePoint(rng))) < 1e-8) ++g.degenerate_samples;
  }
  g.degenerate_fraction = static_cast<double>(g.degenerate_samples) / samples;
  return g;
}

std::vector<SymmetryCheck> CheckSymmetries(const SnakeModel& m) {
  std::vector<SymmetryCheck> out;
  const TrigExpr c = TrigExpr::Cos(Var::kTheta);
  const TrigExpr s = TrigExpr::Sin(Var::kTheta);
  for (int i = 0; i < 3; ++i) {
    for (int a : {4, 5}) {
      SymmetryCheck sc;
      sc.symmetry = i + 1;
      sc.field = a;
      sc.bracket = LieBracket(m.symmetries[i], m.Xi(a));
      sc.c4 = sc.bracket[2];
      sc.c5 = c * sc.bracket[0] + s * sc.bracket[1];
      sc.in_span = (sc.bracket - (sc.c4 * m.Xi(4) + sc.c5 * m.Xi(5))).IsZero();
      if (!sc.in_span) throw ModelError("symmetry bracket leaves the distribution");
      out.push_back(std::move(sc));
    }
  }
  return out;
}

}  // namespace snakecr
