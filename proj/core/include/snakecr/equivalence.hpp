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

#ifndef SNAKECR_EQUIVALENCE_HPP_
#define SNAKECR_EQUIVALENCE_HPP_

#include <gmpxx.h>

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snakecr/cr_structure.hpp"
#include "snakecr/jet.hpp"

namespace snakecr {

// Exact complex rational.
struct GaussianRational {
  mpq_class re = 0;
  mpq_class im = 0;

  GaussianRational() = default;
  GaussianRational(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {  // NOLINT
    re.canonicalize();
    im.canonicalize();
  }
  GaussianRational(long r) : re(r) {}                                                       // NOLINT

  bool IsZero() const { return re == 0 && im == 0; }
  GaussianRational Conj() const { return {re, -im}; }
  GaussianRational Inverse() const;
  std::complex<double> ToComplex() const { return {re.get_d(), im.get_d()}; }
  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  GaussianRational operator-() const { return {-re, -im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

inline GaussianRational Conj(const GaussianRational& z) { return z.Conj(); }
inline std::complex<double> Conj(const std::complex<double>& z) { return std::conj(z); }

template <class T>
using Matrix5 = std::array<std::array<T, 5>, 5>;

template <class T>
Matrix5<T> Multiply(const Matrix5<T>& a, const Matrix5<T>& b) {
  Matrix5<T> r{};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      T s = T(0);
      for (int k = 0; k < 5; ++k) s = s + a[i][k] * b[k][j];
      r[i][j] = s;
    }
  }
  return r;
}

// Element of the structure group acting on adapted coframes.  Rows 4 and 5
// carry g1 and conj(g1) on the diagonal.
template <class T>
struct HElement {
  std::array<T, 5> g{T(1), T(0), T(0), T(0), T(0)};

  Matrix5<T> Matrix() const {
    const T &g1 = g[0], &g2 = g[1], &g3 = g[2], &g4 = g[3], &g5 = g[4];
    const T c1 = Conj(g1);
    Matrix5<T> m{};
    for (auto& row : m) row.fill(T(0));
    m[0][0] = g1 * c1 * c1;
    m[1][1] = g1 * g1 * c1;
    m[2][0] = Conj(g3);
    m[2][1] = g3;
    m[2][2] = g1 * c1;
    m[3][0] = Conj(g5);
    m[3][1] = g4;
    m[3][2] = Conj(g2);
    m[3][3] = g1;
    m[4][0] = Conj(g4);
    m[4][1] = g5;
    m[4][2] = g2;
    m[4][4] = c1;
    return m;
  }

  // Reads the parameters back; nullopt when m does not have the pattern.
  static std::optional<HElement> FromMatrix(const Matrix5<T>& m) {
    HElement h;
    h.g = {m[3][3], m[4][2], m[2][1], m[3][1], m[4][1]};
    if (h.g[0] == T(0)) return std::nullopt;
    if (!(h.Matrix() == m)) return std::nullopt;
    return h;
  }

  // Reads the parameters from their matrix slots without checking.
  static HElement Read(const Matrix5<T>& m) {
    HElement h;
    h.g = {m[3][3], m[4][2], m[2][1], m[3][1], m[4][1]};
    return h;
  }

  friend HElement operator*(const HElement& a, const HElement& b) { return Read(Multiply(a.Matrix(), b.Matrix())); }
};

// Element of the reduced group: g1 and g2 only, g2 in row 4 and its
// conjugate in row 5, both in column 3.
template <class T>
struct HJElement {
  std::array<T, 2> g{T(1), T(0)};

  Matrix5<T> Matrix() const {
    const T c1 = Conj(g[0]);
    Matrix5<T> m{};
    for (auto& row : m) row.fill(T(0));
    m[0][0] = g[0] * c1 * c1;
    m[1][1] = g[0] * g[0] * c1;
    m[2][2] = g[0] * c1;
    m[3][2] = g[1];
    m[3][3] = g[0];
    m[4][2] = Conj(g[1]);
    m[4][4] = c1;
    return m;
  }
  static std::optional<HJElement> FromMatrix(const Matrix5<T>& m) {
    HJElement h;
    h.g = {m[3][3], m[3][2]};
    if (h.g[0] == T(0)) return std::nullopt;
    if (!(h.Matrix() == m)) return std::nullopt;
    return h;
  }
  friend HJElement operator*(const HJElement& a, const HJElement& b) {
    const Matrix5<T> m = Multiply(a.Matrix(), b.Matrix());
    HJElement h;
    h.g = {m[3][3], m[3][2]};
    return h;
  }
  // The same matrix as an element of H.
  HElement<T> AsH() const {
    HElement<T> h;
    h.g = {g[0], Conj(g[1]), T(0), T(0), T(0)};
    return h;
  }
};

template <class T>
HElement<T> Inverse(const HElement<T>& h);

extern template HElement<GaussianRational> Inverse(const HElement<GaussianRational>&);
extern template HElement<std::complex<double>> Inverse(const HElement<std::complex<double>>&);

class SingularElementError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// omega^i = h^i_j omega~^j.
AdaptedCoframe HAction(const HElement<GaussianRational>& h, const AdaptedCoframe& c);

// Evaluates TrigExpr and CExpr at a point of the M chart with the chart
// variables replaced by jets.
class JetEvaluator {
 public:
  JetEvaluator(std::shared_ptr<const JetSpace> space, const NumericPoint& base);
  Jet Eval(const TrigExpr& e);
  Jet Eval(const CExpr& e);
  const std::shared_ptr<const JetSpace>& space() const { return space_; }

 private:
  const Jet& Power(int var, int exponent);
  const Jet& Trig(const std::array<int16_t, kNumAngles>& freq, TrigKind kind);

  std::shared_ptr<const JetSpace> space_;
  NumericPoint base_;
  std::array<std::vector<Jet>, kNumCartesian> powers_;
  std::map<std::pair<std::array<int16_t, kNumAngles>, int>, Jet> trig_;
};

class WrongGrowthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NilpotentSymbol {
  // constants[k][a][b]: e_k component of the graded bracket [e_a, e_b].
  std::array<Matrix5<double>, 5> constants{};
  // Columns: the normalized basis e1..e5 in chart coordinates.
  Eigen::Matrix<double, 5, 5> basis;
  bool matches_n = false;
  double max_deviation = 0;
};

// Graded nilpotentization of the distribution spanned by x1, x2 at p.
NilpotentSymbol ComputeNilpotentSymbol(const VectorField& x1, const VectorField& x2, const NumericPoint& p);
NilpotentSymbol ComputeNilpotentSymbol(const SnakeModel& m, const NumericPoint& p);

// Frame (e1, e2, T, L, conj L) built from the CR structure: L spans the
// part of D killed by omega~5, T = i[L, conj L], e1 = [conj L, T],
// e2 = [L, T].
struct CanonicalFrame {
  std::array<CVectorField, 5> fields;
  std::map<std::pair<int, int>, CVectorField> brackets;  // m < n
};
CanonicalFrame BuildCanonicalFrame(const SnakeModel& m, const AdaptedCoframe& c);

// c[i][m][n] with d theta^i = sum_{m<n} c[i][m][n] theta^m ^ theta^n, theta
// dual to the canonical frame, at p.
std::array<Matrix5<std::complex<double>>, 5> StructureFunctions(const CanonicalFrame& f, const NumericPoint& p);

struct SymbolicJCheck {
  bool vanishes = false;
  CExpr determinant;  // det([e2, L], e2, T, L, conj L)
};
SymbolicJCheck CheckJSymbolic(const CanonicalFrame& f);

inline const std::array<const char*, 12>& InvariantNames() {
  static const std::array<const char*, 12> kNames = {"J", "T", "S", "L", "Q", "G", "V", "N", "K", "F", "B", "A"};
  return kNames;
}

enum class Gauge { kFZero, kA1Zero };
enum class Mode { kPointwise, kSymbolic };

struct NormalizeOptions {
  int points = 20;
  uint64_t seed = 7;
  int starts = 64;  // level-0 least-squares starts per point
  double residual_tolerance = 1e-9;
  Gauge gauge = Gauge::kFZero;
  Mode mode = Mode::kPointwise;
  int threads = 0;  // 0: hardware concurrency
};

// Data at one sample point.
struct PointNormalization {
  std::array<double, 5> point{};  // (x, y, theta, phi, psi)
  std::array<std::complex<double>, 5> g{};
  std::array<std::complex<double>, 5> a{};  // Omega1 = sum a_j omega^j
  std::map<std::string, std::complex<double>> invariants;
  double residual = 0;        // max |matched 2-form coefficient|
  double level0_residual = 0;
  double d2_residual = 0;     // Jacobi identity of the structure functions
  // dJ(E_b), E dual to omega.
  std::array<std::complex<double>, 5> dJ{};
  // dOmega^i coefficients: D[i][m][n], i = 0..4.
  std::array<Matrix5<std::complex<double>>, 5> D{};
};

enum class Pattern { kVanishing, kNonVanishing, kIndeterminate };
const char* PatternName(Pattern p);

struct NormalizationResult {
  Mode mode = Mode::kPointwise;
  Gauge gauge = Gauge::kFZero;
  uint64_t seed = 0;
  std::vector<PointNormalization> points;
  double max_residual = 0;
  double max_d2_residual = 0;
  std::map<std::string, double> max_abs;
  std::map<std::string, Pattern> pattern;
  std::optional<SymbolicJCheck> symbolic_j;
  std::vector<std::string> warnings;
  bool ok = false;
};

NormalizationResult NormalizeCoframe(const SnakeModel& m, const AdaptedCoframe& c, const NormalizeOptions& options = {});

struct DJCheck {
  std::complex<double> n_predicted;  // N from the omega3 coefficient of dJ
  std::complex<double> l_predicted;  // L from the omega5 coefficient
  double n_mismatch = 0;             // |N_pred - N_fit|
  double l_mismatch = 0;
  bool ok = false;
};
DJCheck CheckDJRelation(const PointNormalization& p, double tolerance = 1e-6);

struct ReductionResult {
  NormalizationResult reduced;
  double max_invariant_difference = 0;
  bool ok = false;
  std::string error;
};
// Re-runs the normalization with only the H_J freedom, starting from the
// coframe the full run moved to up to the H_J part.
ReductionResult ReduceToHJ(const SnakeModel& m, const AdaptedCoframe& c, const NormalizationResult& full,
                           const NormalizeOptions& options = {});

}  // namespace snakecr

#endif  // SNAKECR_EQUIVALENCE_HPP_
