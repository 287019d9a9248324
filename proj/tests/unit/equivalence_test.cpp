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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace snakecr {
namespace {

using Cd = std::complex<double>;

GaussianRational RandomGaussian(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  return {mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng))};
}

HElement<GaussianRational> RandomH(std::mt19937_64& rng) {
  HElement<GaussianRational> h;
  for (auto& g : h.g) g = RandomGaussian(rng);
  if (h.g[0].IsZero()) h.g[0] = GaussianRational(1, 1);
  return h;
}

SnakeModel Half(long n, long d) { return BuildModel(SnakeParams::Rational(mpq_class(n, d), mpq_class(1, 2), mpq_class(n, d))); }

TEST(HGroupTest, ProductKeepsThePattern) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    const auto a = RandomH(rng), b = RandomH(rng);
    const auto m = Multiply(a.Matrix(), b.Matrix());
    const auto back = HElement<GaussianRational>::FromMatrix(m);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(back->g[0], a.g[0] * b.g[0]);
    EXPECT_EQ((a * b).Matrix(), m);
  }
}

TEST(HGroupTest, DiagonalHasTheStatedWeights) {
  HElement<GaussianRational> h;
  h.g[0] = GaussianRational(2, 3);
  const auto m = h.Matrix();
  const auto g = h.g[0], c = h.g[0].Conj();
  EXPECT_EQ(m[0][0], g * c * c);
  EXPECT_EQ(m[1][1], g * g * c);
  EXPECT_EQ(m[2][2], g * c);
  EXPECT_EQ(m[3][3], g);
  EXPECT_EQ(m[4][4], c);
}

TEST(HGroupTest, InverseIsExact) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const auto h = RandomH(rng);
    const auto e = h * Inverse(h);
    EXPECT_EQ(e.Matrix(), HElement<GaussianRational>().Matrix());
  }
  HElement<GaussianRational> bad;
  bad.g[0] = GaussianRational(0);
  EXPECT_THROW(Inverse(bad), SingularElementError);
}

TEST(HGroupTest, ReducedGroupIsClosed) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 20; ++t) {
    HJElement<GaussianRational> a, b;
    a.g = {RandomGaussian(rng), RandomGaussian(rng)};
    b.g = {RandomGaussian(rng), RandomGaussian(rng)};
    if (a.g[0].IsZero()) a.g[0] = GaussianRational(1);
    if (b.g[0].IsZero()) b.g[0] = GaussianRational(1);
    const auto p = HJElement<GaussianRational>::FromMatrix(Multiply(a.Matrix(), b.Matrix()));
    ASSERT_TRUE(p.has_value());
    const auto inv = Inverse(a.AsH());
    const auto back = HJElement<GaussianRational>::FromMatrix(inv.Matrix());
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(Multiply(back->Matrix(), a.Matrix()), HElement<GaussianRational>().Matrix());
    EXPECT_EQ(a.AsH().Matrix(), a.Matrix());
  }
}

class CoframeTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new SnakeModel(Half(1, 1));
    coframe_ = new AdaptedCoframe(BuildAdaptedCoframe(*model_));
  }
  static void TearDownTestSuite() {
    delete coframe_;
    delete model_;
  }
  static SnakeModel* model_;
  static AdaptedCoframe* coframe_;
};
SnakeModel* CoframeTest::model_ = nullptr;
AdaptedCoframe* CoframeTest::coframe_ = nullptr;

TEST_F(CoframeTest, IdentityActsTrivially) {
  const AdaptedCoframe c = HAction(HElement<GaussianRational>(), *coframe_);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(c.omega[i], coframe_->omega[i]);
  EXPECT_EQ(c.wedge, coframe_->wedge);
}

TEST_F(CoframeTest, ActionIsALeftActionAndKeepsReality) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 3; ++t) {
    const auto a = RandomH(rng), b = RandomH(rng);
    const AdaptedCoframe lhs = HAction(a * b, *coframe_);
    const AdaptedCoframe rhs = HAction(a, HAction(b, *coframe_));
    for (int i = 0; i < 5; ++i) EXPECT_EQ(lhs.omega[i], rhs.omega[i]);
    EXPECT_EQ(lhs.omega[1], Conj(lhs.omega[0]));
    EXPECT_EQ(lhs.omega[4], Conj(lhs.omega[3]));
    EXPECT_EQ(lhs.omega[2], Conj(lhs.omega[2]));
    EXPECT_FALSE(lhs.wedge.IsZero());
  }
}

TEST(JetEvaluatorTest, MatchesClosedFormDerivatives) {
  const auto space = JetSpace::Get(5, 3);
  NumericPoint p;
  p.Set(Var::kX, 0.4);
  p.Set(Var::kY, -0.3);
  p.Set(Var::kTheta, 0.9);
  p.Set(Var::kPhi, -1.2);
  p.Set(Var::kPsi, 0.5);
  JetEvaluator ev(space, p);
  // x^2 sin(theta + phi)
  const TrigExpr e = TrigExpr::Variable(Var::kX).Pow(2) * TrigExpr::Sin(std::array<int16_t, kNumAngles>{1, 1, 0, 0, 0, 0});
  const Jet j = ev.Eval(e);
  const double x = 0.4, a = 0.9 - 1.2;
  EXPECT_NEAR(j.value().real(), x * x * std::sin(a), 1e-14);
  EXPECT_NEAR(j.Partial(0).real(), 2 * x * std::sin(a), 1e-14);
  EXPECT_NEAR(j.Partial(2).real(), x * x * std::cos(a), 1e-14);
  // d^3 / dtheta dphi dx of the same: 2 x * (-sin a)
  const int idx = space->Index({1, 0, 1, 1, 0});
  EXPECT_NEAR(j.coeff(idx).real(), 2 * x * -std::sin(a), 1e-13);
  const Jet c = ev.Eval(CExpr(TrigExpr(1), e));
  EXPECT_NEAR(c.value().imag(), x * x * std::sin(a), 1e-14);
}

TEST(NilpotentSymbolTest, SnakeMatchesN) {
  const SnakeModel m = Half(1, 1);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    const NilpotentSymbol s = ComputeNilpotentSymbol(m, m.SamplePoint(rng));
    EXPECT_TRUE(s.matches_n) << s.max_deviation;
  }
}

// Numerical bracket [X, Y](p) = DY X - DX Y by central differences.
Eigen::VectorXd FdBracket(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& x,
                          const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& y, const Eigen::VectorXd& q,
                          double h) {
  Eigen::MatrixXd dx(5, 5), dy(5, 5);
  for (int k = 0; k < 5; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(5);
    e(k) = h;
    dx.col(k) = (x(q + e) - x(q - e)) / (2 * h);
    dy.col(k) = (y(q + e) - y(q - e)) / (2 * h);
  }
  return dy * x(q) - dx * y(q);
}

TEST(NilpotentSymbolTest, RescaledFrameAgreesWithFiniteDifferences) {
  const SnakeModel m = Half(1, 1);
  const VectorField x1 = m.Xi(5);
  const VectorField x2 = TrigExpr(2) * m.Xi(4);
  std::mt19937_64 rng(32);
  const NumericPoint p = m.SamplePoint(rng);
  const NilpotentSymbol s = ComputeNilpotentSymbol(x1, x2, p);
  EXPECT_TRUE(s.matches_n);
  auto field = [&](const VectorField& f) {
    return [&m, f, p](const Eigen::VectorXd& q) {
      NumericPoint pp = p;
      for (int k = 0; k < 5; ++k) pp.Set(Chart::M().var(k), q(k));
      return Eigen::VectorXd(EvalField(f, pp));
    };
  };
  Eigen::VectorXd q(5);
  for (int k = 0; k < 5; ++k) q(k) = p.Get(Chart::M().var(k));
  const auto f1 = field(x1), f2 = field(x2);
  const double h = 1e-3;
  auto f3 = [&](const Eigen::VectorXd& r) { return FdBracket(f1, f2, r, h); };
  EXPECT_LT((f3(q) - s.basis.col(2)).norm(), 1e-5);
  EXPECT_LT((FdBracket(f1, f3, q, 1e-2) - s.basis.col(3)).norm(), 1e-2 * (1 + s.basis.col(3).norm()));
  EXPECT_LT((FdBracket(f2, f3, q, 1e-2) - s.basis.col(4)).norm(), 1e-2 * (1 + s.basis.col(4).norm()));
}

TEST(NilpotentSymbolTest, HeisenbergInputIsRejected) {
  const Chart& c = Chart::M();
  const VectorField x1 = VectorField::Coordinate(c, Var::kX);
  const VectorField x2 = VectorField::Coordinate(c, Var::kY) + TrigExpr::Variable(Var::kX) * VectorField::Coordinate(c, Var::kTheta);
  NumericPoint p;
  for (Var v : c.vars()) p.Set(v, 0.3);
  EXPECT_THROW(ComputeNilpotentSymbol(x1, x2, p), WrongGrowthError);
}

TEST_F(CoframeTest, CanonicalFrameShape) {
  const CanonicalFrame f = BuildCanonicalFrame(*model_, *coframe_);
  // L lies in D, is killed by omega5 and not by omega4.
  for (int i : {0, 1, 2, 4}) EXPECT_TRUE(Pair(coframe_->omega[i], f.fields[3]).IsZero()) << i;
  EXPECT_FALSE(Pair(coframe_->omega[3], f.fields[3]).IsZero());
  EXPECT_EQ(f.fields[4], Conj(f.fields[3]));
  EXPECT_EQ(f.fields[2], Conj(f.fields[2]));  // T is real
  EXPECT_EQ(f.fields[0], Conj(f.fields[1]));
  EXPECT_TRUE(CheckJSymbolic(f).vanishes);
}

TEST_F(CoframeTest, StructureFunctionsMatchFiniteDifferences) {
  const CanonicalFrame f = BuildCanonicalFrame(*model_, *coframe_);
  std::mt19937_64 rng(41);
  for (int t = 0; t < 3; ++t) {
    const NumericPoint p = model_->SamplePoint(rng);
    auto theta = [&](const Eigen::Matrix<double, 5, 1>& q) {
      NumericPoint pp = p;
      for (int k = 0; k < 5; ++k) pp.Set(Chart::M().var(k), q(k));
      Eigen::Matrix<Cd, 5, 5> fr;
      for (int m = 0; m < 5; ++m) fr.col(m) = EvalField(f.fields[m], pp);
      return Eigen::Matrix<Cd, 5, 5>(fr.inverse());
    };
    Eigen::Matrix<double, 5, 1> q;
    for (int k = 0; k < 5; ++k) q(k) = p.Get(Chart::M().var(k));
    const double h = 1e-5;
    std::array<Eigen::Matrix<Cd, 5, 5>, 5> d;  // d[k] = partial_k Theta
    for (int k = 0; k < 5; ++k) {
      Eigen::Matrix<double, 5, 1> e = Eigen::Matrix<double, 5, 1>::Zero();
      e(k) = h;
      d[k] = (theta(q + e) - theta(q - e)) / (2 * h);
    }
    const Eigen::Matrix<Cd, 5, 5> th = theta(q), fr = th.inverse();
    const auto c = StructureFunctions(f, p);
    for (int i = 0; i < 5; ++i) {
      Eigen::Matrix<Cd, 5, 5> coef;
      for (int k = 0; k < 5; ++k) {
        for (int j = 0; j < 5; ++j) coef(k, j) = d[k](i, j) - d[j](i, k);
      }
      const Eigen::Matrix<Cd, 5, 5> oracle = fr.transpose() * coef * fr;
      for (int m = 0; m < 5; ++m) {
        for (int n = 0; n < 5; ++n) EXPECT_NEAR(std::abs(oracle(m, n) - c[i][m][n]), 0.0, 1e-5 * (1 + std::abs(oracle(m, n))));
      }
    }
  }
}

class NormalizeTest : public CoframeTest {
 protected:
  static void SetUpTestSuite() {
    CoframeTest::SetUpTestSuite();
    NormalizeOptions o;
    o.points = 20;
    result_ = new NormalizationResult(NormalizeCoframe(*model_, *coframe_, o));
  }
  static void TearDownTestSuite() {
    delete result_;
    CoframeTest::TearDownTestSuite();
  }
  static NormalizationResult* result_;
};
NormalizationResult* NormalizeTest::result_ = nullptr;

TEST_F(NormalizeTest, FitsTheNormalForm) {
  const auto& r = *result_;
  ASSERT_EQ(r.points.size(), 20u);
  EXPECT_TRUE(r.ok);
  EXPECT_LT(r.max_residual, 1e-9);
  for (const char* k : {"J", "N", "L", "F"}) EXPECT_EQ(r.pattern.at(k), Pattern::kVanishing) << k;
  for (const char* k : {"T", "Q", "G", "V", "K", "B", "A"}) EXPECT_EQ(r.pattern.at(k), Pattern::kNonVanishing) << k;
  // With the gauge F = 0 the structure equations force S = 0 as well.
  EXPECT_EQ(r.pattern.at("S"), Pattern::kVanishing);
  for (const auto& p : r.points) {
    EXPECT_NEAR(std::abs(p.invariants.at("T")), 1.0, 1e-12);
    EXPECT_EQ(p.invariants.at("T").imag(), 0.0);
    EXPECT_EQ(p.g[0].imag(), 0.0);
  }
}

TEST_F(NormalizeTest, SecondDerivativeIdentity) { EXPECT_LT(result_->max_d2_residual, 1e-8); }

TEST_F(NormalizeTest, DJRelationForcesNAndL) {
  for (const auto& p : result_->points) {
    const DJCheck c = CheckDJRelation(p);
    EXPECT_TRUE(c.ok) << c.n_mismatch << " " << c.l_mismatch;
    EXPECT_LT(std::abs(c.n_predicted), 1e-6);
    EXPECT_LT(std::abs(c.l_predicted), 1e-6);
    // The Omega1 coefficient (4/3) J.
    EXPECT_LT(std::abs(p.dJ[0]), 1e-6);
  }
  PointNormalization bad = result_->points[0];
  bad.invariants["J"] = 0.05;
  bad.invariants["A"] = 1.0;
  EXPECT_FALSE(CheckDJRelation(bad).ok);
  PointNormalization bad2 = result_->points[0];
  bad2.dJ[4] += 1e-3;
  EXPECT_FALSE(CheckDJRelation(bad2).ok);
}

TEST_F(NormalizeTest, OtherGaugeExposesTheSFIdentity) {
  NormalizeOptions o;
  o.points = 4;
  o.gauge = Gauge::kA1Zero;
  const auto r = NormalizeCoframe(*model_, *coframe_, o);
  EXPECT_TRUE(r.ok);
  for (const auto& p : r.points) {
    EXPECT_LT(std::abs(p.invariants.at("F") + 2.0 * std::conj(p.invariants.at("S"))), 1e-9);
    EXPECT_LT(std::abs(p.a[0]), 1e-12);
  }
}

TEST_F(NormalizeTest, GaugeCovariance) {
  std::mt19937_64 rng(51);
  const AdaptedCoframe moved = HAction(RandomH(rng), *coframe_);
  NormalizeOptions o;
  o.points = 5;
  const auto r = NormalizeCoframe(*model_, moved, o);
  EXPECT_TRUE(r.ok);
  for (const auto& [k, p] : r.pattern) EXPECT_EQ(p, result_->pattern.at(k)) << k;
}

TEST_F(NormalizeTest, ConjugatedCoframe) {
  AdaptedCoframe c;
  for (int i = 0; i < 5; ++i) c.omega[i] = Conj(coframe_->omega[i]);
  NormalizeOptions o;
  o.points = 3;
  const auto a = NormalizeCoframe(*model_, *coframe_, o);
  const auto b = NormalizeCoframe(*model_, c, o);
  ASSERT_TRUE(b.ok);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    for (const auto& [k, v] : a.points[i].invariants) {
      EXPECT_NEAR(std::abs(v), std::abs(b.points[i].invariants.at(k)), 1e-9) << k;
    }
    for (const char* k : {"T", "K", "G", "Q", "A"}) {
      EXPECT_LT(std::abs(std::conj(a.points[i].invariants.at(k)) - b.points[i].invariants.at(k)), 1e-9) << k;
    }
  }
}

TEST_F(NormalizeTest, Deterministic) {
  NormalizeOptions o;
  o.points = 3;
  const auto a = NormalizeCoframe(*model_, *coframe_, o);
  const auto b = NormalizeCoframe(*model_, *coframe_, o);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].point, b.points[i].point);
    EXPECT_EQ(a.points[i].invariants, b.points[i].invariants);
  }
}

TEST_F(NormalizeTest, SymbolicModeFallsBack) {
  NormalizeOptions o;
  o.points = 2;
  o.mode = Mode::kSymbolic;
  const auto r = NormalizeCoframe(*model_, *coframe_, o);
  ASSERT_TRUE(r.symbolic_j.has_value());
  EXPECT_TRUE(r.symbolic_j->vanishes);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_TRUE(r.ok);
}

TEST_F(NormalizeTest, ReductionReproducesInvariants) {
  NormalizationResult small = *result_;
  small.points.resize(5);
  const ReductionResult red = ReduceToHJ(*model_, *coframe_, small);
  EXPECT_TRUE(red.ok) << red.error;
  EXPECT_LT(red.max_invariant_difference, 1e-8);
  EXPECT_LT(red.reduced.max_residual, 1e-9);

  small.points[0].invariants["J"] = 1e-3;
  const ReductionResult refused = ReduceToHJ(*model_, *coframe_, small);
  EXPECT_FALSE(refused.ok);
  EXPECT_FALSE(refused.error.empty());
}

TEST(NormalizeErrorsTest, NeedsAnAdaptedCoframe) {
  const SnakeModel m = Half(1, 1);
  AdaptedCoframe c = BuildAdaptedCoframe(m);
  std::swap(c.omega[0], c.omega[3]);
  EXPECT_THROW(BuildCanonicalFrame(m, c), PreconditionError);
}

}  // namespace
}  // namespace snakecr
