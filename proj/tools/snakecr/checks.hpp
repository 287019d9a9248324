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

#ifndef SNAKECR_TOOLS_CHECKS_HPP_
#define SNAKECR_TOOLS_CHECKS_HPP_

#include "json.hpp"
#include <string>
#include <vector>

#include "snakecr/equivalence.hpp"
#include "snakecr/kinematics.hpp"
#include "snakecr/snake_model.hpp"

namespace snakecr::tools {

using nlohmann::ordered_json;

enum class Status { kPass, kFail, kIndeterminate };
const char* StatusName(Status s);

// One verification. `value` and `tolerance` are what the status was decided on.
struct Check {
  std::string id;
  int criterion = 0;  // acceptance criterion number, 0 for auxiliary checks
  Status status = Status::kIndeterminate;
  ordered_json value;
  std::string tolerance;  // "exact" or a comparison such as "< 1e-09"
  std::string detail;
  ordered_json data = ordered_json::object();
};

struct CheckSet {
  std::vector<Check> checks;
  ordered_json conventions = ordered_json::object();
  ordered_json discrepancy;  // null unless the model checks ran
  ordered_json seeds = ordered_json::object();
  bool inconclusive = false;

  void Add(Check c) { checks.push_back(std::move(c)); }
  void Append(CheckSet other);
  bool AllPass() const;
};

std::string Format(double x);  // shortest round-trip text
std::string Below(double tol);  // "< tol"
std::string Above(double tol);  // "> tol"

struct ModelCheckOptions {
  int growth_points = 200;
  uint64_t seed = 1;
  WheelConvention wheel = WheelConvention::kDifferentiated;
  bool flows = true;
};
// Constraints, kernel, literal audit, growth, symmetries, commutator flows.
CheckSet ModelChecks(const SnakeParams& p, const ModelCheckOptions& options = {});

struct SolveCheckOptions {
  SolveOptions solver;
  int intersection_points = 100;
};
// Solution set of the integrability system, and the pair found at s2 = 1/2.
CheckSet SolveChecks(const SnakeParams& p, const SolveCheckOptions& options = {});

struct CoframeCheckOptions {
  int points = 20;
  uint64_t seed = 5;
};
// Holomorphic coordinates, adapted coframe, nilpotent symbol. Requires s2 = 1/2.
CheckSet CoframeChecks(const SnakeParams& p, const CoframeCheckOptions& options = {});

struct InvariantCheckOptions {
  NormalizeOptions normalize;
  bool reduction = true;
};
// Pointwise or symbolic normalization and the invariant pattern. Requires s2 = 1/2.
CheckSet InvariantChecks(const SnakeParams& p, const InvariantCheckOptions& options = {});

struct SimulateOptions {
  State q0{};
  double dt = 1e-3;
  double horizon = 1;
  bool allow_degenerate = false;
};
struct SimulateOutcome {
  CheckSet checks;
  Trajectory trajectory;
};
SimulateOutcome SimulateChecks(const SnakeParams& p, const ControlSignal& u, const SimulateOptions& options);

// Report document in the snakecr.report/1 schema.
ordered_json MakeReport(const std::string& command, const ordered_json& parameters, const CheckSet& set);

// Exit status for a finished command: 0 all pass, 3 inconclusive solver, 1 otherwise.
int ExitCode(const CheckSet& set);

}  // namespace snakecr::tools

#endif  // SNAKECR_TOOLS_CHECKS_HPP_
