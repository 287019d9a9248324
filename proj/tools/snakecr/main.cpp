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

// snakecr: verification front-end for the three-link snake model.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "checks.hpp"

namespace snakecr::tools {
namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string out;
  bool timing = false;
};

struct ParamFlags {
  std::string s1 = "1", s2 = "1/2", s3 = "1";
};

void AddParams(CLI::App* cmd, ParamFlags& p, bool s2_flag = true) {
  cmd->add_option("--s1", p.s1, "first link half-length, p/q or a symbol")->capture_default_str();
  if (s2_flag) cmd->add_option("--s2", p.s2, "wheel position in (0, 1), p/q")->capture_default_str();
  cmd->add_option("--s3", p.s3, "third link half-length, p/q or a symbol")->capture_default_str();
}

void AddCommon(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "JSON report path (default: $SNAKECR_OUT_DIR/<command>.json)");
  cmd->add_flag("--timing", c.timing, "add wall-clock timing to the report (breaks byte identity)");
}

SnakeParams Params(const ParamFlags& f) {
  try {
    return SnakeParams::FromStrings(f.s1, f.s2, f.s3);
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid parameters: ") + e.what());
  }
}

void RequireHalf(const SnakeParams& p) {
  const auto v = p.ExactValues()[1];
  if (!v || *v != mpq_class(1, 2)) throw UsageError("this command requires --s2 1/2");
}

void RequireNumericS2(const SnakeParams& p) {
  if (!p.ExactValues()[1]) throw UsageError("--s2 must be a rational p/q");
}

std::string DefaultPath(const std::string& given, const std::string& name) {
  if (!given.empty()) return given;
  if (const char* dir = std::getenv("SNAKECR_OUT_DIR"); dir && *dir) {
    return (std::filesystem::path(dir) / name).string();
  }
  return {};
}

void WriteFile(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

ordered_json ParamJson(const SnakeParams& p) {
  return {{"s1", p.s1.ToString()}, {"s2", p.s2.ToString()}, {"s3", p.s3.ToString()}};
}

std::string ValueText(const ordered_json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void PrintSummary(const CheckSet& set) {
  for (const auto& c : set.checks) {
    std::string tag = StatusName(c.status);
    for (auto& ch : tag) ch = static_cast<char>(std::toupper(ch));
    std::cout << tag << "  " << c.id;
    if (c.criterion) std::cout << " [" << c.criterion << "]";
    std::cout << "  value=" << ValueText(c.value) << "  tolerance=" << c.tolerance << "\n";
  }
}

int Finish(const std::string& command, const ordered_json& parameters, const CheckSet& set, const Common& common,
           std::chrono::steady_clock::time_point start) {
  ordered_json report = MakeReport(command, parameters, set);
  if (common.timing) {
    report["timing"] = {
        {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  }
  PrintSummary(set);
  const int code = ExitCode(set);
  std::cout << command << ": " << report["summary"]["status"].get<std::string>() << "\n";
  WriteFile(DefaultPath(common.out, command + ".json"), report.dump(2) + "\n");
  return code;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

State ParseState(const std::string& s) {
  const auto parts = SplitList(s);
  if (parts.size() != 5) throw UsageError("--q0 needs five comma-separated numbers x,y,theta,phi,psi");
  State q{};
  for (int i = 0; i < 5; ++i) {
    try {
      std::size_t used = 0;
      q[i] = std::stod(parts[i], &used);
      if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
    } catch (const std::exception&) {
      throw UsageError("--q0: not a number: " + parts[i]);
    }
  }
  return q;
}

mpq_class ParseRational(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw UsageError("not a rational p/q: " + s);
  q.canonicalize();
  return q;
}

Gauge ParseGauge(const std::string& s) {
  if (s == "F") return Gauge::kFZero;
  if (s == "a1") return Gauge::kA1Zero;
  throw UsageError("--gauge must be F or a1");
}

Mode ParseMode(const std::string& s) {
  if (s == "pointwise") return Mode::kPointwise;
  if (s == "symbolic") return Mode::kSymbolic;
  throw UsageError("--mode must be pointwise or symbolic");
}

// Cells are independent; one failing cell does not stop the others.
struct SweepCell {
  std::string s;
  std::optional<CheckSet> result;
  std::string error;
};

CheckSet SweepChecks(const std::vector<std::string>& grid, const NormalizeOptions& no, std::ostream* csv,
                     ordered_json& cells_json) {
  std::vector<SweepCell> cells;
  for (const auto& s : grid) {
    SweepCell cell{.s = s};
    try {
      const mpq_class v = ParseRational(s);
      const SnakeParams p = SnakeParams::Rational(v, mpq_class(1, 2), v);
      p.Validate();
      InvariantCheckOptions o{.normalize = no, .reduction = false};
      cell.result = InvariantChecks(p, o);
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
  }

  const auto& names = InvariantNames();
  if (csv) {
    *csv << "s1_s3,status";
    for (const char* n : names) *csv << "," << n;
    *csv << ",highlighted,error\n";
  }
  cells_json = ordered_json::array();
  std::optional<std::string> reference;
  bool consistent = true;
  int errors = 0;
  for (const auto& cell : cells) {
    ordered_json j{{"s1", cell.s}, {"s3", cell.s}};
    if (!cell.result) {
      ++errors;
      j["status"] = "error";
      j["error"] = cell.error;
      if (csv) {
        *csv << cell.s << ",error";
        for (std::size_t i = 0; i < names.size(); ++i) *csv << ",";
        *csv << ",,\"" << cell.error << "\"\n";
      }
      cells_json.push_back(j);
      continue;
    }
    ordered_json mags;
    for (const auto& c : cell.result->checks) {
      if (c.id == "invariants_vanishing") mags = c.data["magnitudes"];
    }
    std::string pattern;
    std::vector<std::string> deviations;
    for (const char* n : names) {
      const std::string pat = mags[n]["pattern"].get<std::string>();
      pattern += std::string(n) + ":" + pat + ";";
      const bool expect_zero = std::string("JNLF").find(n) != std::string::npos;
      if ((pat == "vanishing") != expect_zero) deviations.push_back(n);
    }
    if (!reference) reference = pattern;
    consistent = consistent && pattern == *reference;
    j["status"] = cell.result->AllPass() ? "pass" : "fail";
    j["magnitudes"] = mags;
    j["residual"] = cell.result->checks.front().value;
    j["highlighted"] = !deviations.empty();
    j["deviations"] = deviations;
    if (csv) {
      *csv << cell.s << "," << j["status"].get<std::string>();
      for (const char* n : names) *csv << "," << Format(mags[n]["max_abs"].get<double>());
      *csv << "," << (deviations.empty() ? "no" : "yes") << ",\n";
    }
    cells_json.push_back(j);
  }

  CheckSet set;
  if (cells.empty()) return set;
  set.seeds["normalization"] = no.seed;
  Check done{.id = "cells_completed", .tolerance = "exact"};
  done.status = errors == 0 ? Status::kPass : Status::kFail;
  done.value = static_cast<int>(cells.size()) - errors;
  done.detail = "grid cells without an error";
  done.data["cells"] = static_cast<int>(cells.size());
  set.Add(std::move(done));
  Check same{.id = "pattern_consistent", .tolerance = "exact"};
  same.status = consistent ? Status::kPass : Status::kFail;
  same.value = consistent;
  same.detail = "vanishing pattern identical across completed cells";
  same.data["cells"] = cells_json;
  set.Add(std::move(same));
  return set;
}

void Suffix(CheckSet& set, const std::string& tag) {
  for (auto& c : set.checks) c.id += "[" + tag + "]";
}

int Run(int argc, char** argv) {
  CLI::App app{"Verification tools for the three-link snake CR model", "snakecr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "snakecr 0.1.0");

  Common common;
  ParamFlags pf;

  auto* vm = app.add_subcommand("verify-model", "constraints, kernel, literal audit, growth, symmetries, flows");
  AddParams(vm, pf);
  AddCommon(vm, common);
  ModelCheckOptions mo;
  std::string wheel = "differentiated";
  bool no_flows = false;
  vm->add_option("--points", mo.growth_points, "numeric growth sample size")->capture_default_str();
  vm->add_option("--seed", mo.seed, "sampling seed")->capture_default_str();
  vm->add_option("--wheel", wheel, "differentiated or placement")->capture_default_str();
  vm->add_flag("--no-flows", no_flows, "skip the commutator flow tests");

  auto* sj = app.add_subcommand("solve-J", "solve the integrability system for the complex structure");
  AddParams(sj, pf);
  AddCommon(sj, common);
  SolveCheckOptions so;
  sj->add_option("--seed", so.solver.seed, "solver seed")->capture_default_str();
  sj->add_option("--starts", so.solver.newton_starts, "Newton starts when elimination is skipped")
      ->capture_default_str();
  sj->add_option("--intersection-points", so.intersection_points, "sample points for the CR intersection")
      ->capture_default_str();

  auto* cf = app.add_subcommand("coframe", "holomorphic coordinates, adapted coframe, nilpotent symbol");
  AddParams(cf, pf);
  AddCommon(cf, common);
  CoframeCheckOptions co;
  cf->add_option("--points", co.points, "sample points")->capture_default_str();
  cf->add_option("--seed", co.seed, "sampling seed")->capture_default_str();

  NormalizeOptions no;
  std::string mode = "pointwise", gauge = "F";
  auto* inv = app.add_subcommand("invariants", "normalize the coframe and read off the twelve invariants");
  AddParams(inv, pf);
  AddCommon(inv, common);
  bool no_reduction = false;
  inv->add_option("--points", no.points, "sample points")->capture_default_str();
  inv->add_option("--seed", no.seed, "sampling seed")->capture_default_str();
  inv->add_option("--starts", no.starts, "least-squares starts per point")->capture_default_str();
  inv->add_option("--mode", mode, "pointwise or symbolic")->capture_default_str();
  inv->add_option("--gauge", gauge, "F (F = 0) or a1 (a1 = 0)")->capture_default_str();
  inv->add_option("--threads", no.threads, "worker threads, 0 for all cores")->capture_default_str();
  inv->add_flag("--no-reduction", no_reduction, "skip the reduction to the subgroup fixing J");

  auto* sw = app.add_subcommand("sweep", "invariant pattern over a grid of s1 = s3 with s2 = 1/2");
  AddCommon(sw, common);
  std::string grid, sweep_csv;
  sw->add_option("--grid", grid, "comma-separated values p/q for s1 = s3")->required();
  sw->add_option("--points", no.points, "sample points per cell")->capture_default_str();
  sw->add_option("--seed", no.seed, "sampling seed")->capture_default_str();
  sw->add_option("--threads", no.threads, "worker threads, 0 for all cores")->capture_default_str();
  sw->add_option("--csv", sweep_csv, "CSV matrix of cell results");

  auto* sim = app.add_subcommand("simulate", "integrate piecewise-constant controls and monitor drift");
  AddParams(sim, pf);
  std::string controls, q0 = "0,0,0,0.4,-0.7", traj_csv, sim_report;
  SimulateOptions simo;
  bool sim_timing = false;
  sim->add_option("--controls", controls, "CSV with rows t,u1,u2")->required()->check(CLI::ExistingFile);
  sim->add_option("--q0", q0, "initial state x,y,theta,phi,psi")->capture_default_str();
  sim->add_option("--dt", simo.dt, "RK4 step")->capture_default_str();
  sim->add_option("--T", simo.horizon, "horizon")->capture_default_str();
  sim->add_option("--out", traj_csv, "trajectory CSV (default: $SNAKECR_OUT_DIR/trajectory.csv)");
  sim->add_option("--report", sim_report, "JSON report (default: $SNAKECR_OUT_DIR/simulate.json)");
  sim->add_flag("--allow-degenerate", simo.allow_degenerate, "record degenerate frames instead of halting");
  sim->add_flag("--timing", sim_timing, "add wall-clock timing to the report");

  auto* rep = app.add_subcommand("report", "every acceptance check in one report");
  AddParams(rep, pf, false);
  AddCommon(rep, common);
  uint64_t rep_seed = 7;
  rep->add_option("--points", no.points, "normalization sample points")->capture_default_str();
  rep->add_option("--seed", rep_seed, "normalization seed")->capture_default_str();
  rep->add_option("--threads", no.threads, "worker threads, 0 for all cores")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    if (*vm) {
      if (wheel != "differentiated" && wheel != "placement") throw UsageError("--wheel must be differentiated or placement");
      mo.wheel = wheel == "placement" ? WheelConvention::kPlacement : WheelConvention::kDifferentiated;
      mo.flows = !no_flows;
      const SnakeParams p = Params(pf);
      ordered_json params = ParamJson(p);
      params["points"] = mo.growth_points;
      params["wheel"] = wheel;
      const CheckSet set = ModelChecks(p, mo);
      for (const auto& c : set.checks) {
        if (c.id == "growth_symbolic") std::cout << "growth vector " << c.value.dump() << "\n";
      }
      return Finish("verify-model", params, set, common, start);
    }
    if (*sj) {
      const SnakeParams p = Params(pf);
      RequireNumericS2(p);
      ordered_json params = ParamJson(p);
      params["intersection_points"] = so.intersection_points;
      const CheckSet set = SolveChecks(p, so);
      const Check& first = set.checks.front();
      std::cout << "solution set: " << (first.value.is_number() ? first.value.dump() + " element(s)" : ValueText(first.value)) << "\n";
      return Finish("solve-J", params, set, common, start);
    }
    if (*cf) {
      const SnakeParams p = Params(pf);
      RequireHalf(p);
      ordered_json params = ParamJson(p);
      params["points"] = co.points;
      return Finish("coframe", params, CoframeChecks(p, co), common, start);
    }
    if (*inv) {
      const SnakeParams p = Params(pf);
      RequireHalf(p);
      no.mode = ParseMode(mode);
      no.gauge = ParseGauge(gauge);
      ordered_json params = ParamJson(p);
      params["points"] = no.points;
      params["starts"] = no.starts;
      InvariantCheckOptions io{.normalize = no, .reduction = !no_reduction};
      return Finish("invariants", params, InvariantChecks(p, io), common, start);
    }
    if (*sw) {
      const auto values = SplitList(grid);
      for (const auto& v : values) ParseRational(v);
      std::ostringstream csv;
      ordered_json cells;
      const CheckSet set = SweepChecks(values, no, sweep_csv.empty() ? nullptr : &csv, cells);
      for (const auto& c : cells) {
        std::cout << "cell s1=s3=" << c["s1"].get<std::string>() << ": " << c["status"].get<std::string>();
        if (c.contains("highlighted") && c["highlighted"].get<bool>()) {
          std::cout << "  deviates at " << c["deviations"].dump();
        }
        if (c.contains("error")) std::cout << "  " << c["error"].get<std::string>();
        std::cout << "\n";
      }
      ordered_json params{{"grid", values}, {"s2", "1/2"}, {"points", no.points}};
      if (!sweep_csv.empty()) WriteFile(sweep_csv, csv.str());
      return Finish("sweep", params, set, common, start);
    }
    if (*sim) {
      const SnakeParams p = Params(pf);
      if (!p.IsNumeric()) throw UsageError("simulate needs numeric parameters");
      simo.q0 = ParseState(q0);
      std::ifstream in(controls);
      ControlSignal u;
      try {
        u = ControlSignal::FromCsv(in, simo.horizon, simo.dt);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--controls: ") + e.what());
      }
      const SimulateOutcome out = SimulateChecks(p, u, simo);
      std::ostringstream csv;
      WriteTrajectoryCsv(csv, out.trajectory);
      WriteFile(DefaultPath(traj_csv, "trajectory.csv"), csv.str());
      ordered_json params = ParamJson(p);
      params["q0"] = std::vector<double>(simo.q0.begin(), simo.q0.end());
      params["dt"] = simo.dt;
      params["T"] = simo.horizon;
      params["allow_degenerate"] = simo.allow_degenerate;
      Common c{.out = sim_report, .timing = sim_timing};
      return Finish("simulate", params, out.checks, c, start);
    }
    if (*rep) {
      pf.s2 = "1/2";
      const SnakeParams p = Params(pf);
      no.seed = rep_seed;
      CheckSet set;
      {
        // Model checks run with symbolic lengths so the identities hold for all s1, s3.
        SnakeParams sym = SnakeParams::Symbolic();
        sym.s2 = ParamField::Rational(1, 2);
        set.Append(ModelChecks(sym));
      }
      set.Append(SolveChecks(p));
      for (const char* s2 : {"1/4", "1/3", "2/3"}) {
        CheckSet off = SolveChecks(Params({pf.s1, s2, pf.s3}));
        Suffix(off, std::string("s2=") + s2);
        set.Append(std::move(off));
      }
      set.Append(CoframeChecks(p));
      InvariantCheckOptions io{.normalize = no, .reduction = true};
      CheckSet invariants = InvariantChecks(p, io);
      {
        io.reduction = false;
        const CheckSet again = InvariantChecks(p, io);
        auto dump = [](const CheckSet& s) {
          ordered_json j = ordered_json::array();
          for (const auto& c : s.checks) {
            if (c.id != "hj_reduction") j.push_back({{"id", c.id}, {"value", c.value}, {"data", c.data}});
          }
          return j.dump();
        };
        Check d{.id = "determinism", .criterion = 13, .tolerance = "byte-identical"};
        const bool same = dump(invariants) == dump(again);
        d.status = same ? Status::kPass : Status::kFail;
        d.value = same;
        d.detail = "normalization repeated with the same seed";
        invariants.Add(std::move(d));
      }
      set.Append(std::move(invariants));
      ordered_json params = ParamJson(p);
      params["points"] = no.points;
      return Finish("report", params, set, common, start);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace
}  // namespace snakecr::tools

int main(int argc, char** argv) { return snakecr::tools::Run(argc, argv); }
