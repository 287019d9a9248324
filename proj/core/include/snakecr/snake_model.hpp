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

#ifndef SNAKECR_SNAKE_MODEL_HPP_
#define SNAKECR_SNAKE_MODEL_HPP_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snakecr/exterior.hpp"

namespace snakecr {

struct SnakeParams {
  ParamField s1 = ParamField::Param(0);
  ParamField s2 = ParamField::Param(1);
  ParamField s3 = ParamField::Param(2);

  static SnakeParams Symbolic() { return {}; }
  // Each argument is "p/q" or a symbol name.
  static SnakeParams FromStrings(const std::string& s1, const std::string& s2, const std::string& s3);
  static SnakeParams Rational(const mpq_class& s1, const mpq_class& s2, const mpq_class& s3);

  // Throws std::invalid_argument outside s1 > 0, s3 > 0, 0 < s2 < 1.
  void Validate() const;
  bool IsNumeric() const { return s1.IsConstant() && s2.IsConstant() && s3.IsConstant(); }
  // Exact values for constant parameters (for ParamField::Specialize).
  std::array<std::optional<mpq_class>, kNumParams> ExactValues() const;
  // Numbers for evaluation; symbolic entries take generic stand-in values.
  std::array<double, kNumParams> NumericValues() const;
  std::string ToString() const;
};

enum class WheelConvention {
  kDifferentiated,  // (1-s2) q2 + s2 q3, the point whose differential enters the Pfaffian system
  kPlacement,       // s2 q2 + (1-s2) q3, the wheel placement of the constraint description
};

struct EmbeddingConvention {
  int q1_sign = -1;     // q1 = q2 + q1_sign * s1 * (cos(theta+o*phi), sin(theta+o*phi))
  int q4_sign = +1;     // q4 = q3 + q4_sign * s3 * (cos(theta+o*psi), sin(theta+o*psi))
  int orientation = 1;  // o
  WheelConvention wheel = WheelConvention::kDifferentiated;
  // Factor applied to each cross-product form so its dx coefficient matches
  // the printed normalization.
  std::array<ParamField, 3> form_scale{ParamField(1), ParamField(1), ParamField(1)};
  int score = 0;

  std::string Describe() const;
};

struct BuildOptions {
  WheelConvention wheel = WheelConvention::kDifferentiated;
  // Forces (q1_sign, q4_sign, orientation) instead of searching.
  std::optional<std::array<int, 3>> signs;
};

struct SnakeModel {
  SnakeParams params;
  EmbeddingConvention conventions;
  std::array<TrigExpr, 3> h;          // on the R8 chart
  std::map<Var, TrigExpr> embedding;  // x1..y4 as functions on M
  std::array<KForm, 3> pfaffian;      // Upsilon^1..3 on M
  std::array<VectorField, 5> xi;      // xi[k-1] = xi_k
  std::array<VectorField, 3> symmetries;

  const VectorField& Xi(int k) const { return xi[k - 1]; }
  Distribution distribution() const { return Distribution(Chart::M(), {Xi(4), Xi(5)}); }
  // Point of M with the parameters filled in.
  NumericPoint SamplePoint(std::mt19937_64& rng) const;
  Eigen::VectorXd Embed(const NumericPoint& p) const;  // R8 chart order
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SnakeModel BuildModel(const SnakeParams& p, const BuildOptions& options = {});

// The printed formulas, unmodified.
struct LiteralModel {
  std::array<TrigExpr, 3> h;
  std::array<KForm, 3> pfaffian;
  std::array<VectorField, 5> xi;
  std::array<VectorField, 3> symmetries;
  const VectorField& Xi(int k) const { return xi[k - 1]; }
};

LiteralModel LiteralPaperModel(const SnakeParams& p);

enum class Verdict { kMatch, kSignFlip, kMismatch };
const char* VerdictName(Verdict v);

struct DiscrepancyEntry {
  std::string id;
  std::vector<TrigExpr> literal;
  std::vector<TrigExpr> derived;
  std::vector<TrigExpr> difference;  // derived - literal, per component
  std::vector<int> flipped_components;
  Verdict verdict = Verdict::kMatch;
};

struct PairingEntry {
  int form = 0;   // a in Upsilon^a
  int field = 0;  // b in xi_b
  TrigExpr value;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyEntry> entries;
  std::vector<PairingEntry> literal_pairings;  // literal forms on literal fields
  std::vector<PairingEntry> derived_pairings;
  const DiscrepancyEntry& Find(const std::string& id) const;
};

DiscrepancyReport MakeDiscrepancyReport(const SnakeModel& m, const LiteralModel& lit);

struct GrowthCheck {
  GrowthResult growth;
  std::array<VectorField, 3> brackets;  // xi3, xi2, xi1
  TrigExpr frame_determinant;           // det(xi1, ..., xi5)
  double degenerate_fraction = 0.0;     // sampled |det| < 1e-8
  int degenerate_samples = 0;
};

GrowthCheck CheckGrowth(const SnakeModel& m, int points = 20, uint64_t seed = 1);

struct SymmetryCheck {
  int symmetry = 0;  // i in varsigma_i
  int field = 0;     // a in xi_a
  VectorField bracket;
  TrigExpr c4, c5;   // bracket = c4 xi4 + c5 xi5
  bool in_span = false;
};

std::vector<SymmetryCheck> CheckSymmetries(const SnakeModel& m);

}  // namespace snakecr

#endif  // SNAKECR_SNAKE_MODEL_HPP_
