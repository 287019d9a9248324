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

#include <gtest/gtest.h>

#include <random>

#include "snakecr/exterior.hpp"
#include "snakecr/parser.hpp"
#include "support/random_expr.hpp"

namespace snakecr {
namespace {

const Chart& M() { return Chart::M(); }
KForm D(Var v) { return KForm::Coordinate(M(), v); }
VectorField Del(Var v) { return VectorField::Coordinate(M(), v); }

VectorField Field(const std::vector<std::string>& comps) {
  std::vector<TrigExpr> c;
  for (const auto& s : comps) c.push_back(Parse(s));
  return VectorField(M(), c);
}

KForm OneForm(const std::vector<std::string>& comps) {
  KForm w(M(), 1);
  for (int i = 0; i < 5; ++i) w.Set(1u << i, Parse(comps[i]));
  return w;
}

VectorField RandomField(std::mt19937_64& rng) {
  std::vector<TrigExpr> c;
  for (int i = 0; i < 5; ++i) c.push_back(Parse(testing::RandomExprText(rng, 1)));
  return VectorField(M(), c);
}

KForm RandomForm(std::mt19937_64& rng, int degree) {
  KForm w(M(), degree);
  for (uint32_t m = 0; m < 32; ++m) {
    if (std::popcount(m) == degree && rng() % 2) w.Set(m, Parse(testing::RandomExprText(rng, 1)));
  }
  return w;
}

TEST(LieBracket, Examples) {
  Chart r3({Var::kX, Var::kY, Var::kX1});
  VectorField dx = VectorField::Coordinate(r3, Var::kX);
  VectorField xdy(r3, {TrigExpr(), Parse("x"), TrigExpr()});
  EXPECT_EQ(LieBracket(dx, xdy), VectorField::Coordinate(r3, Var::kY));
  EXPECT_THROW(LieBracket(dx, Del(Var::kX)), ChartMismatch);
}

TEST(ExtD, Examples) {
  EXPECT_EQ(ExtD(Parse("sin(theta)") * D(Var::kX)), Parse("cos(theta)") * Wedge(D(Var::kTheta), D(Var::kX)));
  EXPECT_TRUE(ExtD(D(Var::kX)).IsZero());
  KForm u2 = Parse("sin(theta)") * D(Var::kX) - Parse("cos(theta)") * D(Var::kY);
  EXPECT_EQ(ExtD(u2), Parse("cos(theta)") * Wedge(D(Var::kTheta), D(Var::kX)) +
                          Parse("sin(theta)") * Wedge(D(Var::kTheta), D(Var::kY)));
}

TEST(Wedge, Examples) {
  EXPECT_TRUE(Wedge(D(Var::kX), D(Var::kX)).IsZero());
  EXPECT_EQ(Wedge(D(Var::kX), D(Var::kY)), -Wedge(D(Var::kY), D(Var::kX)));
  KForm u1 = OneForm({"sin(phi+theta)", "-cos(phi+theta)", "s1-s2*cos(phi)", "s1", "0"});
  KForm u2 = OneForm({"sin(theta)", "-cos(theta)", "0", "0", "0"});
  CKForm a = MakeComplex(u1, u2);
  CKForm b = MakeComplex(u1, -u2);
  CKForm expected = CExpr(TrigExpr(), TrigExpr(-2)) * ToComplex(Wedge(u1, u2));
  EXPECT_EQ(Wedge(a, b), expected);
  KForm top = Wedge(Wedge(D(Var::kX), D(Var::kY)), Wedge(D(Var::kTheta), D(Var::kPhi)));
  EXPECT_THROW(Wedge(top, Wedge(D(Var::kPsi), D(Var::kX))), std::invalid_argument);
}

TEST(Pair, Examples) {
  EXPECT_TRUE(Pair(D(Var::kX), Del(Var::kY)).IsZero());
  KForm u2 = OneForm({"sin(theta)", "-cos(theta)", "0", "0", "0"});
  VectorField xi4 = Field({"0", "0", "1", "-(1-s2/s1*cos(phi))", "-(1-(1-s2)/s3*cos(psi))"});
  VectorField xi5 = Field({"cos(theta)", "sin(theta)", "0", "-1/s1*sin(phi)", "1/s3*sin(psi)"});
  EXPECT_TRUE(Pair(u2, xi4).IsZero());
  EXPECT_TRUE(Pair(u2, xi5).IsZero());
}

TEST(Growth, Examples) {
  Chart r3({Var::kX, Var::kY, Var::kX1});
  GrowthOptions opt;
  opt.max_depth = 2;
  Distribution flat(r3, {VectorField::Coordinate(r3, Var::kX), VectorField::Coordinate(r3, Var::kY)});
  EXPECT_EQ(GrowthVector(flat, opt).symbolic, (std::vector<int>{2, 2}));
  Distribution heis(r3, {VectorField::Coordinate(r3, Var::kX), VectorField(r3, {TrigExpr(), TrigExpr(1), Parse("x")})});
  GrowthResult g = GrowthVector(heis, opt);
  EXPECT_EQ(g.symbolic, (std::vector<int>{2, 3}));
  EXPECT_EQ(g.generic_numeric, (std::vector<int>{2, 3}));
  EXPECT_TRUE(g.dropped_points.empty());
}

TEST(SymbolicRank, DetectsFunctionDependence) {
  std::vector<std::vector<TrigExpr>> rows = {
      {Parse("cos(theta)"), Parse("sin(theta)")},
      {Parse("sin(theta)*cos(theta)"), Parse("sin(theta)^2")},
  };
  EXPECT_EQ(SymbolicRank(rows), 1);
  rows[1][1] = Parse("cos(theta)^2");
  EXPECT_EQ(SymbolicRank(rows), 2);
}

TEST(Property, DSquaredVanishes) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    KForm w = RandomForm(rng, 1 + i % 2);
    EXPECT_TRUE(ExtD(ExtD(w)).IsZero());
  }
}

TEST(Property, DIsAntiderivation) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 20; ++i) {
    KForm a = RandomForm(rng, 1), b = RandomForm(rng, 1);
    EXPECT_EQ(ExtD(Wedge(a, b)), Wedge(ExtD(a), b) - Wedge(a, ExtD(b)));
    KForm c = RandomForm(rng, 2);
    EXPECT_EQ(Wedge(a, c), Wedge(c, a));
    EXPECT_EQ(Wedge(Wedge(a, b), c), Wedge(a, Wedge(b, c)));
  }
}

TEST(Property, JacobiIdentity) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    VectorField x = RandomField(rng), y = RandomField(rng), z = RandomField(rng);
    VectorField s = LieBracket(x, LieBracket(y, z)) + LieBracket(y, LieBracket(z, x)) + LieBracket(z, LieBracket(x, y));
    EXPECT_TRUE(s.IsZero());
  }
}

TEST(Property, DifferentialPairsToDirectionalDerivative) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 50; ++i) {
    TrigExpr f = Parse(testing::RandomExprText(rng, 2));
    VectorField x = RandomField(rng);
    EXPECT_EQ(Pair(ExtD(M(), f), x), x.Apply(f));
  }
}

TEST(Property, CartanFormula) {
  std::mt19937_64 rng(25);
  for (int i = 0; i < 30; ++i) {
    KForm w = RandomForm(rng, 1);
    VectorField x = RandomField(rng), y = RandomField(rng);
    TrigExpr lhs = EvalForm(ExtD(w), {x, y});
    TrigExpr rhs = x.Apply(Pair(w, y)) - y.Apply(Pair(w, x)) - Pair(w, LieBracket(x, y));
    EXPECT_EQ(lhs, rhs);
  }
}

}  // namespace
}  // namespace snakecr
