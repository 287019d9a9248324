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

#ifndef SNAKECR_CR_STRUCTURE_HPP_
#define SNAKECR_CR_STRUCTURE_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snakecr/exterior.hpp"
#include "snakecr/param_matrix.hpp"
#include "snakecr/snake_model.hpp"

namespace snakecr {

// Linear map of R8 in the ordering (x1, x2, x3, x4, y1, y2, y3, y4).
class ComplexStructureMatrix {
 public:
  ComplexStructureMatrix() : m_(8, 8) {}
  explicit ComplexStructureMatrix(ParamMatrix m);
  static ComplexStructureMatrix Identity();
  static ComplexStructureMatrix StandardBlock();  // (0, -I4; I4, 0)
  static ComplexStructureMatrix Paper();

  const ParamMatrix& matrix() const { return m_; }
  const ParamField& operator()(int r, int c) const { return m_(r, c); }
  ComplexStructureMatrix operator-() const { return ComplexStructureMatrix(-m_); }
  friend bool operator==(const ComplexStructureMatrix&, const ComplexStructureMatrix&) = default;
  Eigen::Matrix<double, 8, 8> Numeric(const std::array<double, kNumParams>& s) const;
  std::string ToString() const;

 private:
  ParamMatrix m_;
};

bool VerifyComplexStructure(const ComplexStructureMatrix& j);

class OffLocusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct IntersectionResult {
  int dimension = 0;  // dim {w in T_qM : J w in T_qM}
  bool equals_distribution = false;
  double projector_distance = 0;
};

// Tangent data of M along R8, evaluated numerically.
struct TangentData {
  Eigen::VectorXd q8;           // point of R8
  Eigen::Matrix<double, 3, 8> dh;
  Eigen::Matrix<double, 8, 2> distribution;  // pushforward of xi4, xi5
};
TangentData TangentAt(const SnakeModel& m, const NumericPoint& p);

// Throws OffLocusError when |h_i(q)| > 1e-10.
IntersectionResult CrIntersection(const ComplexStructureMatrix& j, const SnakeModel& m, const TangentData& t);
IntersectionResult CrIntersection(const ComplexStructureMatrix& j, const SnakeModel& m, const NumericPoint& p);

struct SolveOptions {
  int newton_starts = 128;
  double newton_tolerance = 1e-12;
  int newton_max_iterations = 200;
  int filter_points = 20;
  uint64_t seed = 20140101;
  int exact_max_dimension = 8;
};

enum class SolveStatus { kFound, kEmpty, kInconclusive };
const char* SolveStatusName(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kEmpty;
  std::vector<ComplexStructureMatrix> solutions;
  int stage1_equations = 0;
  int stage1_dimension = 0;
  std::vector<ComplexStructureMatrix> stage1_basis;
  std::string stage2_method;  // "exact" or "newton"
  int stage2_candidates = 0;
  int stage3_rejected = 0;
  int newton_converged = 0;
  uint64_t seed = 0;
  std::vector<double> residuals;  // max |J^2 + I| per returned solution, evaluated
  std::vector<std::string> notes;
};

// Model parameters must have s2 constant.
SolveResult SolveComplexStructure(const SnakeModel& m, const SolveOptions& options = {});

// Complex linear coordinate on R8: dz = re + i im.
struct LinearCoordinate {
  std::string name;
  std::array<mpq_class, 8> re{};
  std::array<mpq_class, 8> im{};
};
std::array<LinearCoordinate, 4> PaperCoordinates();
LinearCoordinate Conjugate(const LinearCoordinate& z);

struct HolomorphicCheck {
  std::vector<std::optional<int>> eps;  // dz_k o J = eps_k i dz_k
  bool consistent = false;
  int sign = 0;  // the common eps when consistent
};
HolomorphicCheck CheckHolomorphic(const ComplexStructureMatrix& j,
                                  const std::vector<LinearCoordinate>& coords);
HolomorphicCheck CheckHolomorphic(const ComplexStructureMatrix& j);

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct AdaptedCoframe {
  std::array<CKForm, 5> omega;  // on the M chart
  CExpr wedge;                  // coefficient of the 5-fold wedge
  std::vector<double> wedge_samples;  // |wedge| at sample points
  KForm Re(int i) const { return RealPart(omega[i]); }
  KForm Im(int i) const { return ImagPart(omega[i]); }
};
// Requires s2 = 1/2.
AdaptedCoframe BuildAdaptedCoframe(const SnakeModel& m, int samples = 20, uint64_t seed = 5);

struct BetaChart {
  Chart chart;                               // (beta1, beta2, beta3, x2, y2)
  std::map<Var, TrigExpr> to_r8;             // x1..y4 in beta coordinates
  std::array<AngleAffine, 3> beta_of_angles;  // beta_k in terms of (theta, phi, psi)
  std::array<AngleAffine, 3> angles_of_beta;  // (theta, phi, psi) in terms of beta
  std::array<double, 5> FromR8(const Eigen::VectorXd& q8) const;
  Eigen::VectorXd ToR8(const std::array<double, 5>& b, const std::array<double, kNumParams>& s) const;
};
BetaChart BuildBetaChart(const SnakeModel& m);

struct Eigenfields {
  CVectorField zeta_plus;
  CVectorField zeta_minus;
  std::array<std::array<TrigExpr, 2>, 2> jd;  // J on D in the basis (xi4, xi5), columns are images
};
Eigenfields BuildEigenfields(const SnakeModel& m, const ComplexStructureMatrix& j);

// Pushforward of a vector field on M to R8, as TrigExpr components on M.
std::array<TrigExpr, 8> Pushforward(const SnakeModel& m, const VectorField& x);

}  // namespace snakecr

#endif  // SNAKECR_CR_STRUCTURE_HPP_
