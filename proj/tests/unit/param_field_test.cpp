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

#include "snakecr/param_field.hpp"
#include "snakecr/parser.hpp"

namespace snakecr {
namespace {

ParamField S(int i) { return ParamField::Param(i); }

TEST(Poly, GcdOfProducts) {
  Poly a = Poly::Param(0) - Poly::Param(1);
  Poly b = Poly::Param(0) + Poly::Param(2) * Poly(2);
  Poly c = Poly::Param(1) * Poly::Param(1) + Poly(3);
  Poly g = Gcd(a * b * Poly(6), b * c * Poly(4));
  EXPECT_EQ(g, b * Poly(2));
}

TEST(Poly, ExactDivisionRejectsRemainder) {
  Poly a = Poly::Param(0) * Poly::Param(0) + Poly(1);
  EXPECT_THROW(ExactDivide(a, Poly::Param(0) + Poly(1)), std::domain_error);
  EXPECT_EQ(ExactDivide(a * (Poly::Param(2) - Poly(1)), a), Poly::Param(2) - Poly(1));
}

TEST(ParamField, ReducesToLowestTerms) {
  ParamField f = (S(0) * S(0) - S(1) * S(1)) / (S(0) + S(1));
  EXPECT_EQ(f, S(0) - S(1));
  EXPECT_EQ(f.den(), Poly(1));
}

TEST(ParamField, DenominatorSignConvention) {
  ParamField f = S(0) / (-S(2) + ParamField(1));
  EXPECT_GT(f.den().Leading().second, 0);
  EXPECT_EQ(f * (ParamField(1) - S(2)), S(0));
}

TEST(ParamField, ConstantsUseRationalArithmetic) {
  ParamField a = ParamField::Rational(2, -4);
  EXPECT_EQ(a.ToString(), "-1/2");
  EXPECT_EQ((a + ParamField::Rational(1, 2)), ParamField(0));
  EXPECT_THROW(ParamField(0).Inverse(), std::domain_error);
}

TEST(ParamField, FieldAxiomsOnRandomElements) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> d(-3, 3);
  auto random_poly = [&] {
    ParamField p = ParamField(d(rng));
    for (int k = 0; k < 3; ++k) p += ParamField(d(rng)) * S(k);
    p += ParamField(d(rng)) * S(0) * S(2);
    return p;
  };
  for (int trial = 0; trial < 60; ++trial) {
    ParamField a = random_poly(), b = random_poly(), c = random_poly();
    if (b.IsZero() || c.IsZero()) continue;
    ParamField x = a / b;
    ParamField y = c / b + a;
    EXPECT_EQ(x * (y + c), x * y + x * c);
    EXPECT_EQ((x + y) - y, x);
    if (!y.IsZero()) EXPECT_EQ((x / y) * y, x);
  }
}

TEST(ParamField, EvalAndSpecialize) {
  ParamField f = (S(0) * S(2) + ParamField(1)) / S(1);
  EXPECT_NEAR(f.Eval({2.0, 0.5, 3.0}), 14.0, 1e-12);
  ParamField g = f.Specialize({mpq_class(2), std::nullopt, mpq_class(1, 3)});
  EXPECT_EQ(g, ParamField::Rational(5, 3) / S(1));
}

TEST(ParamField, PrintParseRoundTrip) {
  std::vector<ParamField> samples = {
      (S(0) * S(0) - S(1)) / (S(0) * S(2)),
      -S(0) / S(2),
      ParamField::Rational(3, 7) * S(1) + ParamField(1),
      (ParamField(1) - S(1)) / (S(2) * S(2) * S(2)),
  };
  for (const auto& f : samples) EXPECT_EQ(ParseParam(f.ToString()), f) << f.ToString();
}

}  // namespace
}  // namespace snakecr
