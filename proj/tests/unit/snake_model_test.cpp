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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "snakecr/parser.hpp"

namespace snakecr {
namespace {

// Plain-double embedding, written independently of the library.
struct Joints {
  double p[4][2];
};

Joints EmbedDirect(const double c[5], double s1, double s2, double s3) {
  const double x = c[0], y = c[1], th = c[2], ph = c[3], ps = c[4];
  Joints j;
  j.p[1][0] = x + s2 * std::cos(th);
  j.p[1][1] = y + s2 * std::sin(th);
  j.p[2][0] = x - (1 - s2) * std::cos(th);
  j.p[2][1] = y - (1 - s2) * std::sin(th);
  j.p[0][0] = j.p[1][0] - s1 * std::cos(th + ph);
  j.p[0][1] = j.p[1][1] - s1 * std::sin(th + ph);
  j.p[3][0] = j.p[2][0] + s3 * std::cos(th + ps);
  j.p[3][1] = j.p[2][1] + s3 * std::sin(th + ps);
  return j;
}

// Lateral velocity of the three wheels along a tangent vector.
std::array<double, 3> Skid(const double c[5], const double v[5], double s1, double s2, double s3) {
  const double h = 1e-6;
  double a[5], b[5];
  for (int i = 0; i < 5; ++i) {
    a[i] = c[i] + h * v[i];
    b[i] = c[i] - h * v[i];
  }
  Joints ja = EmbedDirect(a, s1, s2, s3), jb = EmbedDirect(b, s1, s2, s3), j0 = EmbedDirect(c, s1, s2, s3);
  auto vel = [&](double xa, double xb) { return (xa - xb) / (2 * h); };
  auto cross = [](double ux, double uy, double wx, double wy) { return ux * wy - uy * wx; };
  std::array<double, 3> out;
  out[0] = cross(vel(ja.p[0][0], jb.p[0][0]), vel(ja.p[0][1], jb.p[0][1]), j0.p[1][0] - j0.p[0][0],
                 j0.p[1][1] - j0.p[0][1]);
  out[1] = cross(v[0], v[1], j0.p[2][0] - j0.p[1][0], j0.p[2][1] - j0.p[1][1]);
  out[2] = cross(vel(ja.p[3][0], jb.p[3][0]), vel(ja.p[3][1], jb.p[3][1]), j0.p[3][0] - j0.p[2][0],
                 j0.p[3][1] - j0.p[2][1]);
  return out;
}

NumericPoint ToPoint(const double c[5], double s1, double s2, double s3) {
  NumericPoint p;
  const Var vars[] = {Var::kX, Var::kY, Var::kTheta, Var::kPhi, Var::kPsi};
  for (int i = 0; i < 5; ++i) p.Set(vars[i], c[i]);
  p.SetParam(0, s1);
  p.SetParam(1, s2);
  p.SetParam(2, s3);
  return p;
}

TEST(SnakeModel, ConstraintsVanishOnEmbedding) {
  SnakeModel m = BuildModel(SnakeParams::Symbolic());
  Substitution sub;
  sub.cartesian = m.embedding;
  for (const auto& h : m.h) EXPECT_TRUE(h.Substitute(sub).IsZero()) << h;
}

TEST(SnakeModel, KernelFieldsAnnihilateForms) {
  SnakeModel m = BuildModel(SnakeParams::Symbolic());
  for (int a = 0; a < 3; ++a) {
    for (int b : {4, 5}) EXPECT_TRUE(Pair(m.pfaffian[a], m.Xi(b)).IsZero()) << a << " " << b;
  }
}

TEST(SnakeModel, KernelFieldsDoNotSkidNumerically) {
  SnakeModel m = BuildModel(SnakeParams::Symbolic());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5), pos(0.4, 2.0), mid(0.1, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    const double s1 = pos(rng), s2 = mid(rng), s3 = pos(rng);
    double c[5];
    for (double& x : c) x = u(rng);
    NumericPoint p = ToPoint(c, s1, s2, s3);
    for (int b : {4, 5}) {
      double v[5];
      for (int i = 0; i < 5; ++i) v[i] = m.Xi(b)[i].Eval(p);
      for (double s : Skid(c, v, s1, s2, s3)) EXPECT_NEAR(s, 0.0, 1e-6);
    }
  }
}

TEST(SnakeModel, LiteralPairingsLeaveResidues) {
  SnakeParams p = SnakeParams::Symbolic();
  DiscrepancyReport r = MakeDiscrepancyReport(BuildModel(p), LiteralPaperModel(p));
  auto find = [&](int form, int field) {
    for (const auto& e : r.literal_pairings) {
      if (e.form == form && e.field == field) return e.value;
    }
    return TrigExpr(99);
  };
  EXPECT_TRUE(find(1, 4).IsZero());
  EXPECT_TRUE(find(2, 4).IsZero());
  EXPECT_TRUE(find(2, 5).IsZero());
  EXPECT_TRUE(IsZero(find(1, 5) - Parse("2*sin(phi)")));
  EXPECT_TRUE(IsZero(find(3, 5) - Parse("2*sin(psi)")));
  EXPECT_TRUE(IsZero(find(3, 4) - Parse("2*s3-2*(1-s2)*cos(psi)")));
  for (const auto& e : r.derived_pairings) EXPECT_TRUE(e.value.IsZero());
}

TEST(SnakeModel, DiscrepancyVerdicts) {
  SnakeParams p = SnakeParams::Symbolic();
  DiscrepancyReport r = MakeDiscrepancyReport(BuildModel(p), LiteralPaperModel(p));
  EXPECT_EQ(r.Find("h1").verdict, Verdict::kMatch);
  EXPECT_EQ(r.Find("Upsilon1").verdict, Verdict::kMatch);
  EXPECT_EQ(r.Find("Upsilon2").verdict, Verdict::kMatch);
  EXPECT_EQ(r.Find("Upsilon3").verdict, Verdict::kSignFlip);
  EXPECT_EQ(r.Find("Upsilon3").flipped_components, std::vector<int>{2});
  EXPECT_EQ(r.Find("xi4").verdict, Verdict::kMatch);
  EXPECT_EQ(r.Find("xi5").verdict, Verdict::kSignFlip);
  EXPECT_EQ(r.Find("xi5").flipped_components, (std::vector<int>{3, 4}));
}

TEST(SnakeModel, PlacementWheelAddsThetaTerm) {
  BuildOptions opt;
  opt.wheel = WheelConvention::kPlacement;
  SnakeModel m = BuildModel(SnakeParams::Symbolic(), opt);
  EXPECT_FALSE(m.pfaffian[1][2].IsZero());
  SnakeModel half = BuildModel(SnakeParams::Rational(1, mpq_class(1, 2), 1), opt);
  EXPECT_TRUE(half.pfaffian[1][2].IsZero());
}

TEST(SnakeModel, GrowthIsGeneric235) {
  SnakeModel m = BuildModel(SnakeParams::Rational(1, mpq_class(1, 2), 1));
  GrowthCheck g = CheckGrowth(m, 20, 3);
  EXPECT_EQ(g.growth.symbolic, (std::vector<int>{2, 3, 5}));
  EXPECT_EQ(g.growth.generic_numeric, (std::vector<int>{2, 3, 5}));
  EXPECT_FALSE(g.frame_determinant.IsZero());
  EXPECT_LT(g.degenerate_fraction, 0.01);
}

TEST(SnakeModel, SymmetriesPreserveDistribution) {
  SnakeModel m = BuildModel(SnakeParams::Symbolic());
  auto checks = CheckSymmetries(m);
  ASSERT_EQ(checks.size(), 6u);
  for (const auto& c : checks) EXPECT_TRUE(c.in_span);
}

TEST(SnakeModel, RejectsBadParameters) {
  EXPECT_THROW(SnakeParams::FromStrings("1", "3/2", "1"), std::invalid_argument);
  EXPECT_THROW(SnakeParams::FromStrings("-1", "1/2", "1"), std::invalid_argument);
  EXPECT_NO_THROW(SnakeParams::FromStrings("s1", "1/3", "2"));
}

}  // namespace
}  // namespace snakecr
