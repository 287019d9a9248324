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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

namespace snakecr {
namespace {

SnakeModel Model(long n1, long d1, long n2, long d2, long n3, long d3) {
  return BuildModel(SnakeParams::Rational(mpq_class(n1, d1), mpq_class(n2, d2), mpq_class(n3, d3)));
}

Eigen::Matrix<double, 8, 8> PaperDouble() {
  Eigen::Matrix<double, 8, 8> j;
  j << 0, 0, 0, 0, -1, 1, 0, 0,  //
      0, 0, 0, 0, 0, 1, 0, 0,    //
      0, 0, 0, 0, 0, 0, -1, 0,   //
      0, 0, 0, 0, 0, 0, -1, 1,   //
      1, -1, 0, 0, 0, 0, 0, 0,   //
      0, -1, 0, 0, 0, 0, 0, 0,   //
      0, 0, 1, 0, 0, 0, 0, 0,    //
      0, 0, 1, -1, 0, 0, 0, 0;
  return j;
}

// Independent tangent data: finite differences of a hand-written embedding.
struct Brute {
  Eigen::Matrix<double, 8, 5> jac;
  Eigen::Matrix<double, 8, 2> d;
};

Eigen::Matrix<double, 8, 1> EmbedR8(const double c[5], double s1, double s2, double s3) {
  const double x = c[0], y = c[1], th = c[2], ph = c[3], ps = c[4];
  const double x2 = x + s2 * std::cos(th), y2 = y + s2 * std::sin(th);
  const double x3 = x - (1 - s2) * std::cos(th), y3 = y - (1 - s2) * std::sin(th);
  Eigen::Matrix<double, 8, 1> q;
  q << x2 - s1 * std::cos(th + ph), x2, x3, x3 + s3 * std::cos(th + ps), y2 - s1 * std::sin(th + ph), y2, y3,
      y3 + s3 * std::sin(th + ps);
  return q;
}

TEST(ComplexStructure, Verify) {
  EXPECT_FALSE(VerifyComplexStructure(ComplexStructureMatrix::Identity()));
  EXPECT_TRUE(VerifyComplexStructure(ComplexStructureMatrix::StandardBlock()));
  EXPECT_TRUE(VerifyComplexStructure(ComplexStructureMatrix::Paper()));
  const Eigen::Matrix<double, 8, 8> j = PaperDouble();
  EXPECT_TRUE((j * j + Eigen::Matrix<double, 8, 8>::Identity()).isZero(0));
}

TEST(ComplexStructure, IntersectionAtHalf) {
  SnakeModel m = Model(1, 1, 1, 2, 1, 1);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    auto r = CrIntersection(ComplexStructureMatrix::Paper(), m, m.SamplePoint(rng));
    EXPECT_EQ(r.dimension, 2);
    EXPECT_TRUE(r.equals_distribution) << r.projector_distance;
  }
}

TEST(ComplexStructure, IntersectionAwayFromHalf) {
  SnakeModel m = Model(1, 1, 1, 3, 1, 1);
  std::mt19937_64 rng(12);
  int mismatches = 0;
  for (int i = 0; i < 20; ++i) mismatches += !CrIntersection(ComplexStructureMatrix::Paper(), m, m.SamplePoint(rng)).equals_distribution;
  EXPECT_EQ(mismatches, 20);
}

TEST(ComplexStructure, StandardBlockAgreesWithBruteForce) {
  const double s1 = 1, s2 = 0.5, s3 = 1;
  SnakeModel m = Model(1, 1, 1, 2, 1, 1);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Eigen::Matrix<double, 8, 8> j = Eigen::Matrix<double, 8, 8>::Zero();
  j.topRightCorner<4, 4>() = -Eigen::Matrix4d::Identity();
  j.bottomLeftCorner<4, 4>() = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 10; ++i) {
    double c[5];
    for (double& x : c) x = u(rng);
    // T_qM from finite differences; intersection = {w in TM : Jw in TM}.
    Eigen::Matrix<double, 8, 5> tm;
    for (int k = 0; k < 5; ++k) {
      double a[5], b[5];
      std::copy(c, c + 5, a);
      std::copy(c, c + 5, b);
      a[k] += 1e-6;
      b[k] -= 1e-6;
      tm.col(k) = (EmbedR8(a, s1, s2, s3) - EmbedR8(b, s1, s2, s3)) / 2e-6;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(tm, Eigen::ComputeFullU);
    const Eigen::MatrixXd normal = svd.matrixU().rightCols(3).transpose();
    Eigen::MatrixXd stack(6, 5);
    stack << normal * tm, normal * j * tm;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(stack);
    lu.setThreshold(1e-7);
    NumericPoint p;
    const Var vars[] = {Var::kX, Var::kY, Var::kTheta, Var::kPhi, Var::kPsi};
    for (int k = 0; k < 5; ++k) p.Set(vars[k], c[k]);
    p.SetParam(0, s1);
    p.SetParam(1, s2);
    p.SetParam(2, s3);
    auto r = CrIntersection(ComplexStructureMatrix::StandardBlock(), m, p);
    EXPECT_EQ(r.dimension, 5 - lu.rank());
    EXPECT_EQ(r.dimension, 2);
  }
}

TEST(ComplexStructure, OffLocusRejected) {
  SnakeModel m = Model(1, 1, 1, 2, 1, 1);
  std::mt19937_64 rng(14);
  TangentData t = TangentAt(m, m.SamplePoint(rng));
  t.q8[0] += 0.1;
  EXPECT_THROW(CrIntersection(ComplexStructureMatrix::Paper(), m, t), OffLocusError);
}

TEST(ComplexStructure, SolverFindsPaperPairAtHalf) {
  SolveResult r = SolveComplexStructure(Model(1, 1, 1, 2, 1, 1));
  EXPECT_EQ(r.status, SolveStatus::kFound);
  EXPECT_EQ(r.stage1_dimension, 2);
  EXPECT_EQ(r.stage2_method, "exact");
  ASSERT_EQ(r.solutions.size(), 2u);
  const auto p = ComplexStructureMatrix::Paper();
  EXPECT_TRUE((r.solutions[0] == p && r.solutions[1] == -p) || (r.solutions[0] == -p && r.solutions[1] == p));
  for (const auto& j : r.solutions) EXPECT_TRUE(VerifyComplexStructure(j));
}

TEST(ComplexStructure, SolverSymbolicLengthsAtHalf) {
  SnakeParams params = SnakeParams::Symbolic();
  params.s2 = ParamField::Rational(1, 2);
  SolveResult r = SolveComplexStructure(BuildModel(params));
  EXPECT_EQ(r.status, SolveStatus::kFound);
  EXPECT_EQ(r.solutions.size(), 2u);
}

class SolverAwayFromHalf : public ::testing::TestWithParam<std::tuple<int, int, int, int>> {};

TEST_P(SolverAwayFromHalf, IsEmpty) {
  const auto [n2, d2, n1, d1] = GetParam();
  SolveResult r = SolveComplexStructure(Model(n1, d1, n2, d2, n1, d1));
  EXPECT_EQ(r.status, SolveStatus::kEmpty) << r.stage1_dimension;
  EXPECT_TRUE(r.solutions.empty());
}

INSTANTIATE_TEST_SUITE_P(Values, SolverAwayFromHalf,
                         ::testing::Values(std::tuple{1, 4, 1, 1}, std::tuple{1, 3, 1, 1}, std::tuple{2, 3, 1, 1},
                                           std::tuple{1, 3, 1, 2}, std::tuple{2, 3, 2, 1}));

TEST(ComplexStructure, HolomorphicSigns) {
  // z3 = x3 + i y3 is anti-holomorphic for the matrix; the other three agree.
  auto h = CheckHolomorphic(ComplexStructureMatrix::Paper());
  EXPECT_FALSE(h.consistent);
  ASSERT_EQ(h.eps.size(), 4u);
  EXPECT_EQ(h.eps[0], -1);
  EXPECT_EQ(h.eps[1], -1);
  EXPECT_EQ(h.eps[2], 1);
  EXPECT_EQ(h.eps[3], -1);
  auto neg = CheckHolomorphic(-ComplexStructureMatrix::Paper());
  for (int k = 0; k < 4; ++k) EXPECT_EQ(*neg.eps[k], -*h.eps[k]);
  std::vector<LinearCoordinate> conj;
  for (const auto& z : PaperCoordinates()) conj.push_back(Conjugate(z));
  auto c = CheckHolomorphic(ComplexStructureMatrix::Paper(), conj);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(*c.eps[k], -*h.eps[k]);
  auto z = PaperCoordinates();
  std::vector<LinearCoordinate> fixed = {z[0], z[1], Conjugate(z[2]), z[3]};
  auto f = CheckHolomorphic(ComplexStructureMatrix::Paper(), fixed);
  ASSERT_TRUE(f.consistent);
  EXPECT_EQ(f.sign, -1);
  auto sb = CheckHolomorphic(ComplexStructureMatrix::StandardBlock());
  EXPECT_FALSE(sb.eps[0].has_value());
}

TEST(ComplexStructure, HolomorphicSignMatchesComplexArithmetic) {
  // dz o J as complex row vectors, independent of the library.
  const Eigen::Matrix<double, 8, 8> j = PaperDouble();
  Eigen::Matrix<std::complex<double>, 1, 8> dz = Eigen::Matrix<std::complex<double>, 1, 8>::Zero();
  const std::complex<double> i(0, 1);
  dz(0) = 1;
  dz(5) = i;
  dz(4) = -i;
  const Eigen::Matrix<std::complex<double>, 1, 8> lhs = dz * j.cast<std::complex<double>>();
  EXPECT_LT((lhs + i * dz).norm(), 1e-15);
}

TEST(AdaptedCoframe, RealityAndNondegeneracy) {
  SnakeModel m = Model(1, 1, 1, 2, 1, 1);
  AdaptedCoframe f = BuildAdaptedCoframe(m);
  EXPECT_EQ(f.omega[1], Conj(f.omega[0]));
  EXPECT_EQ(f.omega[4], Conj(f.omega[3]));
  EXPECT_TRUE(f.Im(2).IsZero());
  EXPECT_FALSE(f.wedge.IsZero());
  ASSERT_EQ(f.wedge_samples.size(), 20u);
  for (double w : f.wedge_samples) EXPECT_GT(w, 1e-8);
  for (int a = 0; a < 3; ++a) {
    for (int b : {4, 5}) EXPECT_TRUE(Pair(f.omega[a], ToComplex(m.Xi(b))).IsZero());
  }
  EXPECT_THROW(BuildAdaptedCoframe(Model(1, 1, 1, 3, 1, 1)), PreconditionError);
}

TEST(BetaChart, SubstitutionAndAngleMap) {
  SnakeModel m = Model(1, 1, 1, 2, 1, 1);
  BetaChart b = BuildBetaChart(m);
  EXPECT_EQ(b.beta_of_angles[1].coeff[AngleIndex(Var::kTheta)], 1);
  std::mt19937_64 rng(15);
  const auto s = m.params.NumericValues();
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd q = m.Embed(m.SamplePoint(rng));
    EXPECT_LT((b.ToR8(b.FromR8(q), s) - q).norm(), 1e-12);
  }
  EXPECT_THROW(BuildBetaChart(Model(1, 1, 1, 3, 1, 1)), PreconditionError);
}

TEST(BetaChart, InverseAngleMap) {
  SnakeModel m = Model(2, 1, 1, 2, 2, 1);
  BetaChart b = BuildBetaChart(m);
  Substitution fwd;
  for (int k = 0; k < 3; ++k) fwd.angles[AngleVar(AngleIndex(Var::kBeta1) + k)] = b.beta_of_angles[k];
  Substitution back;
  const Var ang[] = {Var::kTheta, Var::kPhi, Var::kPsi};
  for (int k = 0; k < 3; ++k) back.angles[ang[k]] = b.angles_of_beta[k];
  for (Var v : ang) {
    const TrigExpr e = TrigExpr::Sin(v);
    EXPECT_EQ(e.Substitute(back).Substitute(fwd), e);
    const TrigExpr c = TrigExpr::Cos(v);
    EXPECT_EQ(c.Substitute(back).Substitute(fwd), c);
  }
}

TEST(Eigenfields, EigenRelations) {
  SnakeModel m = Model(1, 1, 1, 2, 1, 1);
  Eigenfields e = BuildEigenfields(m, ComplexStructureMatrix::Paper());
  EXPECT_EQ(e.zeta_minus, Conj(e.zeta_plus));
  // J on D squares to -1.
  const auto& jd = e.jd;
  EXPECT_TRUE((jd[0][0] * jd[0][0] + jd[0][1] * jd[1][0] + TrigExpr(1)).IsZero());
  EXPECT_TRUE((jd[0][0] * jd[0][1] + jd[0][1] * jd[1][1]).IsZero());
  // J zeta+ = i zeta+ in the (xi4, xi5) basis: zeta+ = xi5 - i J xi5.
  const CExpr a4 = CExpr(TrigExpr()) - CExpr::I() * CExpr(jd[0][1]);
  const CExpr a5 = CExpr(TrigExpr(1)) - CExpr::I() * CExpr(jd[1][1]);
  const CExpr j4 = CExpr(jd[0][0]) * a4 + CExpr(jd[0][1]) * a5;
  const CExpr j5 = CExpr(jd[1][0]) * a4 + CExpr(jd[1][1]) * a5;
  EXPECT_TRUE((j4 - CExpr::I() * a4).IsZero());
  EXPECT_TRUE((j5 - CExpr::I() * a5).IsZero());
  std::mt19937_64 rng(16);
  for (int i = 0; i < 10; ++i) {
    NumericPoint p = m.SamplePoint(rng);
    Eigen::MatrixXd rows(4, 5);
    for (int k = 0; k < 5; ++k) {
      const auto z = EvalScalar(e.zeta_plus[k], p);
      rows(0, k) = z.real();
      rows(1, k) = z.imag();
      rows(2, k) = m.Xi(4)[k].Eval(p);
      rows(3, k) = m.Xi(5)[k].Eval(p);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(rows);
    lu.setThreshold(1e-9);
    EXPECT_EQ(lu.rank(), 2);
  }
  EXPECT_THROW(BuildEigenfields(m, ComplexStructureMatrix::Identity()), PreconditionError);
}

}  // namespace
}  // namespace snakecr
