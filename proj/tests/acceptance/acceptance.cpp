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

// Acceptance suite: one line per criterion, "criterion N: PASS|FAIL ...".
// Usage: snakecr_acceptance [N ...]; no arguments runs every criterion.

#include <sys/wait.h>

#include <chrono>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "snakecr/cr_structure.hpp"
#include "snakecr/equivalence.hpp"
#include "snakecr/kinematics.hpp"
#include "snakecr/parser.hpp"
#include "snakecr/snake_model.hpp"

namespace snakecr {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

SnakeParams Params(const mpq_class& s1, const mpq_class& s2, const mpq_class& s3) {
  return SnakeParams::Rational(s1, s2, s3);
}

SnakeParams SymbolicHalf() {
  SnakeParams p = SnakeParams::Symbolic();
  p.s2 = ParamField::Rational(1, 2);
  return p;
}

const std::vector<mpq_class>& Lengths() {
  static const std::vector<mpq_class> v{mpq_class(1, 2), mpq_class(1), mpq_class(2)};
  return v;
}

// The printed matrix, entered by hand.
Eigen::Matrix<double, 8, 8> PrintedJ() {
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

Outcome Criterion1() {
  const SnakeModel m = BuildModel(SymbolicHalf());
  Substitution sub;
  sub.cartesian = m.embedding;
  int nonzero = 0;
  for (const auto& h : m.h) nonzero += !h.Substitute(sub).IsZero();
  return {nonzero == 0, std::to_string(nonzero) + " of 3 constraints nonzero on the embedding (exact)"};
}

Outcome Criterion2() {
  const SnakeParams p = SnakeParams::Symbolic();
  const SnakeModel m = BuildModel(p);
  int nonzero = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b : {4, 5}) nonzero += !Pair(m.pfaffian[a], m.Xi(b)).IsZero();
  }
  const LiteralModel lit = LiteralPaperModel(p);
  const std::map<std::pair<int, int>, TrigExpr> expected = {{{1, 5}, Parse("2*sin(phi)")},
                                                             {{3, 5}, Parse("2*sin(psi)")},
                                                             {{3, 4}, Parse("2*s3-2*(1-s2)*cos(psi)")}};
  int literal_bad = 0;
  for (int a = 1; a <= 3; ++a) {
    for (int b : {4, 5}) {
      const TrigExpr v = Pair(lit.pfaffian[a - 1], lit.Xi(b));
      auto it = expected.find({a, b});
      literal_bad += !(v - (it == expected.end() ? TrigExpr(0) : it->second)).IsZero();
    }
  }
  const DiscrepancyReport r = MakeDiscrepancyReport(m, lit);
  int report_bad = 0;
  for (const auto& e : r.literal_pairings) {
    auto it = expected.find({e.form, e.field});
    report_bad += !(e.value - (it == expected.end() ? TrigExpr(0) : it->second)).IsZero();
  }
  report_bad += r.literal_pairings.size() != 6;
  return {nonzero == 0 && literal_bad == 0 && report_bad == 0,
          "derived nonzero pairings " + std::to_string(nonzero) + ", literal residues off " +
              std::to_string(literal_bad) + ", report entries off " + std::to_string(report_bad) + " (exact)"};
}

Outcome Criterion3() {
  const GrowthCheck g = CheckGrowth(BuildModel(SnakeParams::Symbolic()), 200, 3);
  const std::vector<int> want{2, 3, 5};
  int good = 0;
  for (const auto& r : g.growth.numeric_ranks) good += r == want;
  const double frac = good / 200.0;
  std::ostringstream os;
  os << "symbolic (";
  for (std::size_t i = 0; i < g.growth.symbolic.size(); ++i) os << (i ? "," : "") << g.growth.symbolic[i];
  os << "), numeric (2,3,5) at " << good << "/200 points (need >= 95%, threshold 1e-8)";
  return {g.growth.symbolic == want && g.growth.numeric_ranks.size() == 200 && frac >= 0.95, os.str()};
}

Outcome Criterion4() {
  const SnakeModel m = BuildModel(SnakeParams::Symbolic());
  const auto checks = CheckSymmetries(m);
  // Independent confirmation: the bracket equals c4 xi4 + c5 xi5 as expressions.
  int bad = 0;
  for (const auto& c : checks) {
    const VectorField rhs = c.c4 * m.Xi(4) + c.c5 * m.Xi(5);
    bad += !c.in_span || !(c.bracket - rhs).IsZero();
  }
  return {checks.size() == 6 && bad == 0,
          std::to_string(checks.size()) + " brackets, " + std::to_string(bad) + " outside span{xi4, xi5} (exact)"};
}

Outcome Criterion5() {
  const auto paper = ComplexStructureMatrix::Paper();
  bool ok = (paper.Numeric({1, 0.5, 1}) - PrintedJ()).isZero(0);
  std::ostringstream os;
  for (const auto& s : Lengths()) {
    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult r = SolveComplexStructure(BuildModel(Params(s, mpq_class(1, 2), s)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool has = false, closed = true, outside = false;
    for (const auto& j : r.solutions) {
      has = has || j == paper;
      closed = closed && std::count(r.solutions.begin(), r.solutions.end(), -j) == 1;
      outside = outside || !(j == paper || j == -paper);
    }
    const bool cell = r.status == SolveStatus::kFound && has && closed && !outside && secs <= 1800;
    ok = ok && cell;
    os << "s1=s3=" << s.get_str() << ":" << r.solutions.size() << (cell ? " ok" : " BAD") << "; ";
  }
  for (const mpq_class s2 : {mpq_class(1, 4), mpq_class(1, 3), mpq_class(2, 3)}) {
    const SolveResult r = SolveComplexStructure(BuildModel(Params(1, s2, 1)));
    const bool cell = r.status == SolveStatus::kEmpty && r.solutions.empty();
    ok = ok && cell;
    os << "s2=" << s2.get_str() << ":" << SolveStatusName(r.status) << "; ";
  }
  return {ok, os.str() + "(exact)"};
}

Outcome Criterion6() {
  const auto paper = ComplexStructureMatrix::Paper();
  const Eigen::Matrix<double, 8, 8> j = PrintedJ();
  const bool square = VerifyComplexStructure(paper) && (j * j + Eigen::Matrix<double, 8, 8>::Identity()).isZero(0);
  const SnakeModel m = BuildModel(Params(1, mpq_class(1, 2), 1));
  std::mt19937_64 rng(2024);
  int wrong = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const IntersectionResult r = CrIntersection(paper, m, m.SamplePoint(rng));
    wrong += r.dimension != 2;
    worst = std::max(worst, r.projector_distance);
  }
  return {square && wrong == 0 && worst < 1e-8, std::string("J^2=-I ") + (square ? "exact" : "FAILS") +
                                                     ", wrong dimension at " + std::to_string(wrong) +
                                                     "/100 points, max projector distance " + Num(worst) +
                                                     " (tol 1e-8)"};
}

Outcome Criterion7() {
  // dz_k as complex rows over (x1..x4, y1..y4), from the printed coordinates.
  using Row = Eigen::Matrix<std::complex<double>, 1, 8>;
  const std::complex<double> i(0, 1);
  std::array<Row, 4> dz;
  for (auto& r : dz) r.setZero();
  dz[0](0) = 1, dz[0](5) = i, dz[0](4) = -i;
  dz[1](1) = 1, dz[1](5) = i;
  dz[2](2) = 1, dz[2](6) = i;
  dz[3](3) = 1, dz[3](7) = i, dz[3](6) = -i;
  const Eigen::Matrix<std::complex<double>, 8, 8> j = PrintedJ().cast<std::complex<double>>();
  std::vector<int> eps;
  for (const auto& r : dz) {
    const Row lhs = r * j;
    eps.push_back((lhs - i * r).norm() == 0 ? 1 : (lhs + i * r).norm() == 0 ? -1 : 0);
  }
  const HolomorphicCheck h = CheckHolomorphic(ComplexStructureMatrix::Paper());
  bool agree = h.eps.size() == 4;
  for (int k = 0; agree && k < 4; ++k) agree = h.eps[k] && *h.eps[k] == eps[k];
  const bool one = std::all_of(eps.begin(), eps.end(), [&](int e) { return e != 0 && e == eps[0]; });
  std::ostringstream os;
  os << "eps = (" << eps[0] << "," << eps[1] << "," << eps[2] << "," << eps[3] << ")"
     << (agree ? "" : " library disagrees") << ", one global eps required (exact)";
  return {one && h.consistent && agree, os.str()};
}

Outcome Criterion8() {
  const SnakeModel m = BuildModel(SymbolicHalf());
  const AdaptedCoframe f = BuildAdaptedCoframe(m, 20, 5);
  const bool real = f.omega[1] == Conj(f.omega[0]) && f.omega[4] == Conj(f.omega[3]) && f.Im(2).IsZero();
  const double lo = f.wedge_samples.empty() ? 0 : *std::min_element(f.wedge_samples.begin(), f.wedge_samples.end());
  const bool ok = real && !f.wedge.IsZero() && f.wedge_samples.size() >= 20 && lo > 1e-6;
  return {ok, std::string("reality ") + (real ? "exact" : "FAILS") + ", symbolic wedge " +
                  (f.wedge.IsZero() ? "zero" : "nonzero") + ", min |wedge| " + Num(lo) + " at " +
                  std::to_string(f.wedge_samples.size()) + " points (tol 1e-6)"};
}

Outcome Criterion9() {
  const SnakeModel m = BuildModel(Params(1, mpq_class(1, 2), 1));
  std::mt19937_64 rng(99);
  double worst = 0;
  int bad = 0;
  for (int i = 0; i < 20; ++i) {
    const NilpotentSymbol s = ComputeNilpotentSymbol(m, m.SamplePoint(rng));
    // Independent read of the relations from the constants.
    double dev = 0;
    for (int k = 0; k < 5; ++k) {
      for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
          double want = 0;
          if (a == 0 && b == 1 && k == 2) want = 1;
          if (a == 1 && b == 0 && k == 2) want = -1;
          if (a == 0 && b == 2 && k == 3) want = 1;
          if (a == 2 && b == 0 && k == 3) want = -1;
          if (a == 1 && b == 2 && k == 4) want = 1;
          if (a == 2 && b == 1 && k == 4) want = -1;
          dev = std::max(dev, std::abs(s.constants[k][a][b] - want));
        }
      }
    }
    worst = std::max(worst, dev);
    bad += !s.matches_n;
  }
  return {bad == 0 && worst < 1e-12, "max deviation " + Num(worst) + " over 20 points (floating tol 1e-12)"};
}

NormalizationResult Normalize(const mpq_class& s) {
  const SnakeModel m = BuildModel(Params(s, mpq_class(1, 2), s));
  NormalizeOptions o;
  o.points = 20;
  return NormalizeCoframe(m, BuildAdaptedCoframe(m), o);
}

Outcome Criterion10() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& s : Lengths()) {
    const auto t0 = std::chrono::steady_clock::now();
    const NormalizationResult r = Normalize(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double zero = 0, least = INFINITY;
    std::string weakest;
    for (const char* n : {"J", "N", "L", "F"}) zero = std::max(zero, r.max_abs.at(n));
    for (const char* n : {"T", "S", "Q", "G", "V", "K", "B", "A"}) {
      if (r.max_abs.at(n) < least) least = r.max_abs.at(n), weakest = n;
    }
    const bool cell = r.points.size() >= 20 && r.max_residual < 1e-9 && zero < 1e-6 && least > 1e-3 && secs <= 3600;
    ok = ok && cell;
    os << "s1=s3=" << s.get_str() << ": residual " << Num(r.max_residual) << ", max|JNLF| " << Num(zero)
       << ", min of others " << Num(least) << " (" << weakest << ")" << (cell ? "" : " BAD") << "; ";
  }
  return {ok, os.str() + "(tol 1e-9, 1e-6, 1e-3)"};
}

Outcome Criterion11() {
  const NormalizationResult r = Normalize(1);
  double j = r.max_abs.at("J"), n = 0, l = 0;
  for (const auto& p : r.points) {
    const DJCheck d = CheckDJRelation(p);
    n = std::max(n, std::abs(d.n_predicted));
    l = std::max(l, std::abs(d.l_predicted));
  }
  return {!r.points.empty() && j < 1e-6 && n < 1e-6 && l < 1e-6,
          "max|J| " + Num(j) + ", |N| from dJ " + Num(n) + ", |L| from dJ " + Num(l) + " (tol 1e-6)"};
}

Outcome Criterion12() {
  const SnakeModel m = BuildModel(Params(1, mpq_class(1, 2), 1));
  const State q0{0.3, -0.2, 0.7, 0.4, -0.9};
  const std::vector<double> eps{1e-2, 3e-3, 1e-3};
  const FlowTestResult d1 = CommutatorFlowTest(m, q0, eps);
  const FlowTestResult d2 = CommutatorFlowTest(m.Xi(5), m.Xi(3), m.Xi(2), ParamPoint(m), q0, eps);
  const bool ok = std::abs(d1.slope - 2) <= 0.05 && d1.angle.back() < 1e-2 && d2.angle.back() < 5e-2;
  return {ok, "depth 1 slope " + std::to_string(d1.slope) + ", angle " + Num(d1.angle.back()) +
                  " (tol 2+-0.05, 1e-2); depth 2 angle " + Num(d2.angle.back()) + " (tol 5e-2)"};
}

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome Criterion13() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "snakecr_acceptance_13";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::vector<std::string> commands = {"verify-model", "solve-J", "coframe", "invariants --points 20 --seed 7"};
  int differ = 0, missing = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string text[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = dir / (std::to_string(c) + "_" + std::to_string(run) + ".json");
      const std::string cmd = std::string(SNAKECR_CLI) + " " + commands[c] + " --out " + out.string() + " > /dev/null 2>&1";
      (void)std::system(cmd.c_str());
      text[run] = Slurp(out);
    }
    missing += text[0].empty();
    differ += text[0] != text[1];
  }
  fs::remove_all(dir);
  return {differ == 0 && missing == 0, std::to_string(commands.size()) + " commands run twice, " +
                                           std::to_string(differ) + " differ, " + std::to_string(missing) +
                                           " missing (byte-identical required)"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& Criteria() {
  static const std::map<int, std::pair<std::string, std::function<Outcome()>>> c = {
      {1, {"constraint/embedding exactness", Criterion1}},
      {2, {"Pfaffian kernel and literal residues", Criterion2}},
      {3, {"growth vector (2,3,5)", Criterion3}},
      {4, {"se(2) symmetries", Criterion4}},
      {5, {"complex structure exists iff s2 = 1/2", Criterion5}},
      {6, {"J^2 = -I and CR intersection", Criterion6}},
      {7, {"holomorphic coordinates", Criterion7}},
      {8, {"adapted coframe", Criterion8}},
      {9, {"nilpotent symbol", Criterion9}},
      {10, {"invariant pattern", Criterion10}},
      {11, {"dJ consistency", Criterion11}},
      {12, {"commutator flows", Criterion12}},
      {13, {"deterministic reports", Criterion13}},
  };
  return c;
}

}  // namespace
}  // namespace snakecr

int main(int argc, char** argv) {
  using snakecr::Criteria;
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    try {
      which.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: snakecr_acceptance [criterion ...]\n";
      return 2;
    }
    if (!Criteria().count(which.back())) {
      std::cerr << "unknown criterion " << argv[i] << "\n";
      return 2;
    }
  }
  if (which.empty()) {
    for (const auto& [n, _] : Criteria()) which.push_back(n);
  }
  bool all = true;
  for (int n : which) {
    const auto& [name, fn] = Criteria().at(n);
    snakecr::Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << "  " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
