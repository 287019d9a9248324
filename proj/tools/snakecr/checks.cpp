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

#include "checks.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "snakecr/cr_structure.hpp"
#include "snakecr/parser.hpp"

namespace snakecr::tools {
namespace {

constexpr const char* kVersion = "0.1.0";

template <typename T>
std::string Str(const T& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

Status FromBool(bool ok) { return ok ? Status::kPass : Status::kFail; }

ordered_json Complex(std::complex<double> z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json Ranks(const std::vector<int>& r) { return ordered_json(r); }

bool IsHalf(const SnakeParams& p) {
  const auto v = p.ExactValues()[1];
  return v && *v == mpq_class(1, 2);
}

State StateOf(const NumericPoint& p) {
  return {p.Get(Var::kX), p.Get(Var::kY), p.Get(Var::kTheta), p.Get(Var::kPhi), p.Get(Var::kPsi)};
}

ordered_json StateJson(const State& q) { return ordered_json(std::vector<double>(q.begin(), q.end())); }

ordered_json Conventions(const EmbeddingConvention& c) {
  ordered_json j;
  j["q1_sign"] = c.q1_sign;
  j["q4_sign"] = c.q4_sign;
  j["orientation"] = c.orientation;
  j["wheel"] = c.wheel == WheelConvention::kDifferentiated ? "differentiated" : "placement";
  ordered_json scale = ordered_json::array();
  for (const auto& s : c.form_scale) scale.push_back(s.ToString());
  j["form_scale"] = scale;
  j["description"] = c.Describe();
  return j;
}

ordered_json DiscrepancyJson(const DiscrepancyReport& r) {
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json d = ordered_json::array();
    for (const auto& x : e.difference) d.push_back(x.ToString());
    entries.push_back({{"id", e.id},
                       {"verdict", VerdictName(e.verdict)},
                       {"flipped_components", e.flipped_components},
                       {"difference", d}});
  }
  auto pairings = [](const std::vector<PairingEntry>& v) {
    ordered_json out = ordered_json::array();
    for (const auto& e : v) out.push_back({{"form", e.form}, {"field", e.field}, {"value", e.value.ToString()}});
    return out;
  };
  return {{"entries", entries},
          {"literal_pairings", pairings(r.literal_pairings)},
          {"derived_pairings", pairings(r.derived_pairings)}};
}

Check FlowCheck(const std::string& id, const FlowTestResult& r, double angle_tol, bool check_slope) {
  Check c;
  c.id = id;
  c.criterion = 12;
  const double angle = r.angle.back();
  const bool slope_ok = std::abs(r.slope - 2.0) <= 0.05;
  c.status = FromBool(angle < angle_tol && (!check_slope || slope_ok));
  c.value = {{"angle", angle}, {"slope", r.slope}};
  c.tolerance = "angle " + Below(angle_tol) + (check_slope ? ", |slope - 2| <= 0.05" : "");
  c.data = {{"eps", r.eps}, {"displacement", r.displacement}, {"angle", r.angle}};
  return c;
}

}  // namespace

const char* StatusName(Status s) {
  switch (s) {
    case Status::kPass:
      return "pass";
    case Status::kFail:
      return "fail";
    case Status::kIndeterminate:
      return "indeterminate";
  }
  return "?";
}

void CheckSet::Append(CheckSet other) {
  for (auto& c : other.checks) checks.push_back(std::move(c));
  for (auto& [k, v] : other.conventions.items()) conventions[k] = v;
  for (auto& [k, v] : other.seeds.items()) seeds[k] = v;
  if (!other.discrepancy.is_null()) discrepancy = std::move(other.discrepancy);
  inconclusive = inconclusive || other.inconclusive;
}

bool CheckSet::AllPass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.status == Status::kPass; });
}

std::string Format(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}
std::string Below(double tol) { return "< " + Format(tol); }
std::string Above(double tol) { return "> " + Format(tol); }

CheckSet ModelChecks(const SnakeParams& p, const ModelCheckOptions& options) {
  CheckSet set;
  BuildOptions build;
  build.wheel = options.wheel;
  const SnakeModel m = BuildModel(p, build);
  set.conventions = Conventions(m.conventions);
  set.seeds["growth"] = options.seed;

  {
    Check c{.id = "constraint_exactness", .criterion = 1, .tolerance = "exact"};
    Substitution sub;
    sub.cartesian = m.embedding;
    ordered_json residues = ordered_json::array();
    int nonzero = 0;
    for (const auto& h : m.h) {
      const TrigExpr r = h.Substitute(sub);
      nonzero += !r.IsZero();
      residues.push_back(r.ToString());
    }
    c.status = FromBool(nonzero == 0);
    c.value = nonzero;
    c.detail = "nonzero residues of h_i on the embedding";
    c.data["residues"] = residues;
    set.Add(std::move(c));
  }
  {
    Check c{.id = "pfaffian_kernel", .criterion = 2, .tolerance = "exact"};
    int nonzero = 0;
    ordered_json pairs = ordered_json::array();
    for (int a = 0; a < 3; ++a) {
      for (int b : {4, 5}) {
        const TrigExpr v = Pair(m.pfaffian[a], m.Xi(b));
        nonzero += !v.IsZero();
        pairs.push_back({{"form", a + 1}, {"field", b}, {"value", v.ToString()}});
      }
    }
    c.status = FromBool(nonzero == 0);
    c.value = nonzero;
    c.detail = "nonzero pairings Upsilon^a(xi_b), b in {4, 5}";
    c.data["pairings"] = pairs;
    set.Add(std::move(c));
  }
  {
    // The printed formulas are audited with symbolic lengths.
    const SnakeParams sym = SnakeParams::Symbolic();
    const DiscrepancyReport r = MakeDiscrepancyReport(BuildModel(sym), LiteralPaperModel(sym));
    set.discrepancy = DiscrepancyJson(r);
    const std::map<std::pair<int, int>, std::string> expected = {
        {{1, 5}, "2*sin(phi)"}, {{3, 5}, "2*sin(psi)"}, {{3, 4}, "2*s3-2*(1-s2)*cos(psi)"}};
    int mismatched = 0;
    for (const auto& e : r.literal_pairings) {
      auto it = expected.find({e.form, e.field});
      const TrigExpr want = it == expected.end() ? TrigExpr(0) : Parse(it->second);
      mismatched += !(e.value - want).IsZero();
    }
    Check c{.id = "literal_discrepancies", .criterion = 2, .tolerance = "exact"};
    c.status = FromBool(mismatched == 0 && r.literal_pairings.size() == 6);
    c.value = mismatched;
    c.detail = "literal pairings differing from the three expected residues";
    set.Add(std::move(c));
  }
  {
    const GrowthCheck g = CheckGrowth(m, options.growth_points, options.seed);
    const std::vector<int> want{2, 3, 5};
    Check s{.id = "growth_symbolic", .criterion = 3, .tolerance = "exact"};
    s.status = FromBool(g.growth.symbolic == want);
    s.value = Ranks(g.growth.symbolic);
    set.Add(std::move(s));

    int good = 0;
    for (const auto& r : g.growth.numeric_ranks) good += r == want;
    const int n = static_cast<int>(g.growth.numeric_ranks.size());
    const double fraction = n ? static_cast<double>(good) / n : 0.0;
    Check c{.id = "growth_numeric", .criterion = 3};
    c.status = FromBool(n == options.growth_points && fraction >= 0.95);
    c.value = fraction;
    c.tolerance = ">= 0.95 of points, singular values > 1e-08";
    c.data = {{"points", n},
              {"generic_numeric", Ranks(g.growth.generic_numeric)},
              {"dropped_points", g.growth.dropped_points},
              {"degenerate_fraction", g.degenerate_fraction}};
    set.Add(std::move(c));
  }
  {
    const auto sym = CheckSymmetries(m);
    int outside = 0;
    ordered_json rows = ordered_json::array();
    for (const auto& s : sym) {
      outside += !s.in_span;
      rows.push_back({{"symmetry", s.symmetry},
                      {"field", s.field},
                      {"c4", s.c4.ToString()},
                      {"c5", s.c5.ToString()},
                      {"in_span", s.in_span}});
    }
    Check c{.id = "symmetries", .criterion = 4, .tolerance = "exact"};
    c.status = FromBool(sym.size() == 6 && outside == 0);
    c.value = outside;
    c.detail = "brackets [varsigma_i, xi_a] outside span{xi4, xi5}";
    c.data["brackets"] = rows;
    set.Add(std::move(c));
  }
  if (options.flows) {
    std::mt19937_64 rng(options.seed);
    const State q0 = StateOf(m.SamplePoint(rng));
    const std::vector<double> eps{1e-2, 3e-3, 1e-3};
    const NumericPoint params = ParamPoint(m);
    Check d1 = FlowCheck("flow_depth1", CommutatorFlowTest(m, q0, eps), 1e-2, true);
    Check d2 = FlowCheck("flow_depth2", CommutatorFlowTest(m.Xi(5), m.Xi(3), m.Xi(2), params, q0, eps), 5e-2, false);
    d1.data["q0"] = StateJson(q0);
    d2.data["q0"] = StateJson(q0);
    set.Add(std::move(d1));
    set.Add(std::move(d2));
  }
  return set;
}

CheckSet SolveChecks(const SnakeParams& p, const SolveCheckOptions& options) {
  CheckSet set;
  const SnakeModel m = BuildModel(p);
  set.conventions = Conventions(m.conventions);
  const SolveResult r = SolveComplexStructure(m, options.solver);
  set.seeds["solver"] = r.seed;

  ordered_json solutions = ordered_json::array();
  for (const auto& j : r.solutions) solutions.push_back(j.ToString());
  const ordered_json solver_data = {{"status", SolveStatusName(r.status)},
                                    {"solutions", solutions},
                                    {"stage1_equations", r.stage1_equations},
                                    {"stage1_dimension", r.stage1_dimension},
                                    {"stage2_method", r.stage2_method},
                                    {"stage2_candidates", r.stage2_candidates},
                                    {"stage3_rejected", r.stage3_rejected},
                                    {"residuals", r.residuals},
                                    {"notes", r.notes}};
  if (r.status == SolveStatus::kInconclusive) {
    set.inconclusive = true;
    Check c{.id = "solution_set", .criterion = 5, .status = Status::kIndeterminate, .tolerance = "exact"};
    c.value = "inconclusive";
    c.data = solver_data;
    set.Add(std::move(c));
    return set;
  }
  if (!IsHalf(p)) {
    Check c{.id = "solution_set", .criterion = 5, .tolerance = "exact"};
    c.status = FromBool(r.status == SolveStatus::kEmpty && r.solutions.empty());
    c.value = r.solutions.empty() ? "empty" : "non-empty";
    c.detail = "no complex structure is expected away from s2 = 1/2";
    c.data = solver_data;
    set.Add(std::move(c));
    return set;
  }

  const auto paper = ComplexStructureMatrix::Paper();
  const bool has_p = std::count(r.solutions.begin(), r.solutions.end(), paper) == 1;
  const bool has_n = std::count(r.solutions.begin(), r.solutions.end(), -paper) == 1;
  {
    Check c{.id = "solution_set", .criterion = 5, .tolerance = "exact"};
    c.status = FromBool(r.status == SolveStatus::kFound && has_p && has_n && r.solutions.size() == 2);
    c.value = static_cast<int>(r.solutions.size());
    c.detail = "solutions are exactly the printed matrix and its negative";
    c.data = solver_data;
    set.Add(std::move(c));
  }
  {
    Check c{.id = "j_squared", .criterion = 6, .tolerance = "exact"};
    bool ok = !r.solutions.empty();
    for (const auto& j : r.solutions) ok = ok && VerifyComplexStructure(j);
    c.status = FromBool(ok);
    c.value = ok;
    c.detail = "J^2 = -I over the rationals";
    set.Add(std::move(c));
  }
  {
    Check c{.id = "cr_intersection", .criterion = 6};
    std::mt19937_64 rng(options.solver.seed);
    set.seeds["intersection"] = options.solver.seed;
    int wrong_dim = 0;
    double worst = 0;
    for (int i = 0; i < options.intersection_points; ++i) {
      const IntersectionResult x = CrIntersection(paper, m, m.SamplePoint(rng));
      wrong_dim += x.dimension != 2;
      worst = std::max(worst, x.projector_distance);
    }
    c.status = FromBool(wrong_dim == 0 && worst < 1e-8 && options.intersection_points >= 100);
    c.value = {{"max_projector_distance", worst}, {"points_with_wrong_dimension", wrong_dim}};
    c.tolerance = "dimension 2, projector distance " + Below(1e-8);
    c.data["points"] = options.intersection_points;
    set.Add(std::move(c));
  }
  return set;
}

CheckSet CoframeChecks(const SnakeParams& p, const CoframeCheckOptions& options) {
  CheckSet set;
  const SnakeModel m = BuildModel(p);
  set.conventions = Conventions(m.conventions);
  set.seeds["coframe"] = options.seed;
  {
    const HolomorphicCheck h = CheckHolomorphic(ComplexStructureMatrix::Paper());
    ordered_json eps = ordered_json::array();
    for (const auto& e : h.eps) eps.push_back(e ? ordered_json(*e) : ordered_json(nullptr));
    Check c{.id = "holomorphy", .criterion = 7, .tolerance = "exact"};
    c.status = FromBool(h.consistent);
    c.value = eps;
    c.detail = "dz_k o J = eps_k i dz_k for z1..z4; one common eps required";
    set.Add(std::move(c));
  }
  const AdaptedCoframe f = BuildAdaptedCoframe(m, options.points, options.seed);
  {
    Check c{.id = "coframe_reality", .criterion = 8, .tolerance = "exact"};
    const bool ok = f.omega[1] == Conj(f.omega[0]) && f.omega[4] == Conj(f.omega[3]) && f.Im(2).IsZero();
    c.status = FromBool(ok);
    c.value = ok;
    c.detail = "omega2 = conj omega1, omega5 = conj omega4, omega3 real";
    set.Add(std::move(c));
  }
  {
    Check c{.id = "coframe_wedge_symbolic", .criterion = 8, .tolerance = "exact"};
    c.status = FromBool(!f.wedge.IsZero());
    c.value = !f.wedge.IsZero();
    c.detail = "5-fold wedge coefficient is a nonzero expression";
    set.Add(std::move(c));
  }
  {
    Check c{.id = "coframe_wedge_samples", .criterion = 8, .tolerance = Above(1e-6)};
    const double lo = f.wedge_samples.empty() ? 0.0 : *std::min_element(f.wedge_samples.begin(), f.wedge_samples.end());
    c.status = FromBool(static_cast<int>(f.wedge_samples.size()) >= 20 && lo > 1e-6);
    c.value = lo;
    c.detail = "minimum |wedge| over the samples";
    c.data["samples"] = f.wedge_samples;
    set.Add(std::move(c));
  }
  {
    Check c{.id = "coframe_annihilates_distribution", .tolerance = "exact"};
    int nonzero = 0;
    for (int a = 0; a < 3; ++a) {
      for (int b : {4, 5}) nonzero += !Pair(f.omega[a], ToComplex(m.Xi(b))).IsZero();
    }
    c.status = FromBool(nonzero == 0);
    c.value = nonzero;
    set.Add(std::move(c));
  }
  {
    Check c{.id = "nilpotent_symbol", .criterion = 9, .tolerance = Below(1e-12)};
    std::mt19937_64 rng(options.seed);
    double worst = 0;
    int failed = 0;
    for (int i = 0; i < options.points; ++i) {
      const NilpotentSymbol s = ComputeNilpotentSymbol(m, m.SamplePoint(rng));
      worst = std::max(worst, s.max_deviation);
      failed += !s.matches_n;
    }
    c.status = FromBool(failed == 0 && options.points >= 20);
    c.value = worst;
    c.detail = "max deviation of the graded structure constants from the 5-dimensional nilpotent relations";
    c.data["points"] = options.points;
    set.Add(std::move(c));
  }
  return set;
}

CheckSet InvariantChecks(const SnakeParams& p, const InvariantCheckOptions& options) {
  CheckSet set;
  const SnakeModel m = BuildModel(p);
  set.conventions = Conventions(m.conventions);
  const NormalizeOptions& no = options.normalize;
  set.seeds["normalization"] = no.seed;
  set.conventions["gauge"] = no.gauge == Gauge::kFZero ? "F=0" : "a1=0";
  set.conventions["mode"] = no.mode == Mode::kPointwise ? "pointwise" : "symbolic";
  const AdaptedCoframe f = BuildAdaptedCoframe(m);
  const NormalizationResult r = NormalizeCoframe(m, f, no);

  {
    Check c{.id = "normalization_residual", .criterion = 10, .tolerance = Below(no.residual_tolerance)};
    const int n = static_cast<int>(r.points.size());
    c.status = FromBool(n >= 20 && n == no.points && r.max_residual < no.residual_tolerance);
    c.value = r.max_residual;
    ordered_json pts = ordered_json::array();
    for (const auto& pt : r.points) {
      ordered_json inv = ordered_json::object();
      for (const char* name : InvariantNames()) inv[name] = Complex(pt.invariants.at(name));
      pts.push_back({{"point", std::vector<double>(pt.point.begin(), pt.point.end())},
                     {"residual", pt.residual},
                     {"invariants", inv}});
    }
    c.data = {{"points", pts}, {"warnings", r.warnings}};
    set.Add(std::move(c));
  }
  ordered_json magnitudes = ordered_json::object();
  for (const char* name : InvariantNames()) {
    magnitudes[name] = {{"max_abs", r.max_abs.at(name)}, {"pattern", PatternName(r.pattern.at(name))}};
  }
  {
    Check c{.id = "invariants_vanishing", .criterion = 10, .tolerance = Below(1e-6)};
    double worst = 0;
    for (const char* name : {"J", "N", "L", "F"}) worst = std::max(worst, r.max_abs.at(name));
    c.status = FromBool(worst < 1e-6);
    c.value = worst;
    c.detail = "max over J, N, L, F";
    c.data["magnitudes"] = magnitudes;
    set.Add(std::move(c));
  }
  {
    Check c{.id = "invariants_nonvanishing", .criterion = 10, .tolerance = Above(1e-3)};
    double least = INFINITY;
    std::string which;
    for (const char* name : {"T", "S", "Q", "G", "V", "K", "B", "A"}) {
      if (r.max_abs.at(name) < least) {
        least = r.max_abs.at(name);
        which = name;
      }
    }
    c.status = FromBool(least > 1e-3);
    c.value = least;
    c.detail = "smallest max magnitude among T, S, Q, G, V, K, B, A attained by " + which;
    set.Add(std::move(c));
  }
  {
    Check c{.id = "structure_jacobi", .tolerance = Below(1e-8)};
    c.status = FromBool(r.max_d2_residual < 1e-8);
    c.value = r.max_d2_residual;
    c.detail = "d^2 = 0 on the fitted structure functions";
    set.Add(std::move(c));
  }
  {
    Check c{.id = "dj_consistency", .criterion = 11, .tolerance = Below(1e-6)};
    double n_max = 0, l_max = 0, mismatch = 0;
    for (const auto& pt : r.points) {
      const DJCheck d = CheckDJRelation(pt);
      n_max = std::max(n_max, std::abs(d.n_predicted));
      l_max = std::max(l_max, std::abs(d.l_predicted));
      mismatch = std::max({mismatch, d.n_mismatch, d.l_mismatch});
    }
    const double dj = r.max_abs.at("J");
    c.status = FromBool(!r.points.empty() && dj < 1e-6 && n_max < 1e-6 && l_max < 1e-6);
    c.value = {{"N_from_dJ", n_max}, {"L_from_dJ", l_max}};
    c.detail = "N and L read off the omega3 and omega5 coefficients of dJ";
    c.data = {{"max_abs_J", dj}, {"max_fit_mismatch", mismatch}};
    set.Add(std::move(c));
  }
  if (r.symbolic_j) {
    Check c{.id = "symbolic_j", .tolerance = "exact"};
    c.status = FromBool(r.symbolic_j->vanishes);
    c.value = r.symbolic_j->vanishes;
    c.detail = "J as a symbolic determinant";
    set.Add(std::move(c));
  }
  if (options.reduction) {
    Check c{.id = "hj_reduction", .tolerance = Below(1e-8)};
    const ReductionResult red = ReduceToHJ(m, f, r, no);
    c.status = FromBool(red.ok);
    c.value = red.max_invariant_difference;
    c.detail = red.error.empty() ? "invariants after reducing to the subgroup fixing J" : red.error;
    set.Add(std::move(c));
  }
  return set;
}

SimulateOutcome SimulateChecks(const SnakeParams& p, const ControlSignal& u, const SimulateOptions& options) {
  SimulateOutcome out;
  const SnakeModel m = BuildModel(p);
  out.checks.conventions = Conventions(m.conventions);
  IntegrateOptions io;
  io.degeneracy = options.allow_degenerate ? DegeneracyPolicy::kRecord : DegeneracyPolicy::kHalt;
  try {
    out.trajectory = IntegrateControls(m, options.q0, u, io);
  } catch (const DegenerateFrameError& e) {
    Check c{.id = "frame_nondegenerate", .status = Status::kFail, .tolerance = Above(io.degeneracy_threshold)};
    c.value = "halted";
    c.detail = e.what();
    out.checks.Add(std::move(c));
    return out;
  }
  const DriftSummary d = DriftReport(m, out.trajectory, 1e-8);
  if (!options.allow_degenerate) {
    Check c{.id = "frame_nondegenerate", .tolerance = Above(io.degeneracy_threshold)};
    c.status = FromBool(d.min_abs_frame_determinant > io.degeneracy_threshold);
    c.value = d.min_abs_frame_determinant;
    out.checks.Add(std::move(c));
  }
  {
    Check c{.id = "pfaffian_drift", .tolerance = Below(1e-8)};
    c.status = FromBool(d.max_pfaffian < 1e-8);
    c.value = d.max_pfaffian;
    c.data = {{"mean", d.mean_pfaffian}, {"min_abs_frame_determinant", d.min_abs_frame_determinant}};
    out.checks.Add(std::move(c));
  }
  {
    Check c{.id = "constraint_drift", .tolerance = Below(1e-8)};
    c.status = FromBool(d.max_h < 1e-8);
    c.value = d.max_h;
    c.data = {{"mean", d.mean_h}, {"samples", out.trajectory.samples.size()}};
    out.checks.Add(std::move(c));
  }
  return out;
}

ordered_json MakeReport(const std::string& command, const ordered_json& parameters, const CheckSet& set) {
  ordered_json checks = ordered_json::array();
  int pass = 0, fail = 0, indeterminate = 0;
  for (const auto& c : set.checks) {
    pass += c.status == Status::kPass;
    fail += c.status == Status::kFail;
    indeterminate += c.status == Status::kIndeterminate;
    ordered_json j;
    j["id"] = c.id;
    j["criterion"] = c.criterion ? ordered_json(c.criterion) : ordered_json(nullptr);
    j["status"] = StatusName(c.status);
    j["value"] = c.value;
    j["tolerance"] = c.tolerance;
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (!c.data.empty()) j["data"] = c.data;
    checks.push_back(std::move(j));
  }
  ordered_json r;
  r["schema"] = "snakecr.report/1";
  r["tool"] = {{"name", "snakecr"}, {"version", kVersion}};
  r["command"] = command;
  r["parameters"] = parameters;
  r["conventions"] = set.conventions;
  r["seeds"] = set.seeds;
  r["summary"] = {{"status", ExitCode(set) == 0 ? "pass" : (set.inconclusive ? "inconclusive" : "fail")},
                  {"pass", pass},
                  {"fail", fail},
                  {"indeterminate", indeterminate}};
  r["checks"] = checks;
  r["discrepancy"] = set.discrepancy;
  return r;
}

int ExitCode(const CheckSet& set) {
  if (set.inconclusive) return 3;
  return set.AllPass() ? 0 : 1;
}

}  // namespace snakecr::tools
