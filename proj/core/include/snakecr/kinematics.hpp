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

#ifndef SNAKECR_KINEMATICS_HPP_
#define SNAKECR_KINEMATICS_HPP_

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "snakecr/snake_model.hpp"

namespace snakecr {

using State = std::array<double, 5>;  // (x, y, theta, phi, psi)

// Piecewise-constant controls: u1 multiplies xi4, u2 multiplies xi5.
struct ControlSignal {
  struct Piece {
    double t = 0;  // start time
    double u1 = 0;
    double u2 = 0;
  };
  std::vector<Piece> pieces;  // sorted by t, first at 0
  double horizon = 1;
  double dt = 1e-3;

  static ControlSignal Constant(double u1, double u2, double horizon, double dt);
  // Rows "t,u1,u2"; an optional header line is skipped.
  static ControlSignal FromCsv(std::istream& in, double horizon, double dt);
  void Validate() const;  // throws std::invalid_argument
  std::array<double, 2> At(double t) const;
};

struct TrajectorySample {
  double t = 0;
  State q{};
  std::array<double, 2> u{};
  Eigen::Matrix<double, 8, 1> r8;       // pushforward to the joint chart
  std::array<double, 3> h_drift{};      // |h_i(r8)|
  std::array<double, 3> pfaffian_drift{};  // |Upsilon^a(qdot)|
  double frame_determinant = 0;         // det(xi1..xi5) at q
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
};

class DegenerateFrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class StepOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DegeneracyPolicy { kHalt, kRecord };

struct IntegrateOptions {
  DegeneracyPolicy degeneracy = DegeneracyPolicy::kHalt;
  double degeneracy_threshold = 1e-10;
  std::size_t max_steps = 10'000'000;
};

// Fixed-step RK4 of qdot = u1 xi4(q) + u2 xi5(q) in the chart.
Trajectory IntegrateControls(const SnakeModel& m, const State& q0, const ControlSignal& u,
                             const IntegrateOptions& options = {});

// Independent trajectories, integrated in parallel; results in input order.
std::vector<Trajectory> IntegrateMany(const SnakeModel& m, const std::vector<State>& q0,
                                      const std::vector<ControlSignal>& u, const IntegrateOptions& options = {},
                                      int threads = 0);

struct DriftSummary {
  double max_h = 0, mean_h = 0;
  double max_pfaffian = 0, mean_pfaffian = 0;
  double min_abs_frame_determinant = 0;
  bool flagged = false;  // max_h or max_pfaffian above the tolerance
};

// Recomputes the drift from the stored states.
DriftSummary DriftReport(const SnakeModel& m, const Trajectory& t, double tolerance = 1e-8);

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& t);

// Time-t flow of a vector field on the M chart by RK4 with the given steps.
State Flow(const VectorField& x, const NumericPoint& params, const State& q, double t, int steps);

struct FlowTestResult {
  std::vector<double> eps;
  std::vector<double> displacement;  // |commutator displacement|
  std::vector<double> angle;         // between displacement/eps^2 and the expected field
  double slope = 0;                  // log-log fit of displacement against eps
  Eigen::Matrix<double, 5, 1> expected;
};

// Phi^{-e}_Y o Phi^{-e}_X o Phi^{e}_Y o Phi^{e}_X (q0) - q0 against e^2 [X, Y](q0).
FlowTestResult CommutatorFlowTest(const VectorField& x, const VectorField& y, const VectorField& expected,
                                  const NumericPoint& params, const State& q0, const std::vector<double>& eps,
                                  int steps = 32);
// X = xi5, Y = xi4 against xi3.
FlowTestResult CommutatorFlowTest(const SnakeModel& m, const State& q0, const std::vector<double>& eps);

// Rotation by angle about the origin followed by a translation.
struct RigidMotion {
  double tx = 0, ty = 0, angle = 0;
  State Apply(const State& q) const;
};

NumericPoint ParamPoint(const SnakeModel& m);
NumericPoint ChartPoint(const SnakeModel& m, const State& q);

}  // namespace snakecr

#endif  // SNAKECR_KINEMATICS_HPP_
