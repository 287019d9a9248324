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

#include "snakecr/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace snakecr {

ControlSignal ControlSignal::Constant(double u1, double u2, double horizon, double dt) {
  ControlSignal s;
  s.pieces = {{0.0, u1, u2}};
  s.horizon = horizon;
  s.dt = dt;
  s.Validate();
  return s;
}

ControlSignal ControlSignal::FromCsv(std::istream& in, double horizon, double dt) {
  ControlSignal s;
  s.horizon = horizon;
  s.dt = dt;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Piece p;
    if (!(ls >> p.t >> p.u1 >> p.u2)) {
      if (s.pieces.empty() && row == 1) continue;  // header
      throw std::invalid_argument("controls row " + std::to_string(row) + ": expected t,u1,u2");
    }
    s.pieces.push_back(p);
  }
  s.Validate();
  return s;
}

void ControlSignal::Validate() const {
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(horizon >= 0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be non-negative");
  if (pieces.empty()) throw std::invalid_argument("control signal has no pieces");
  if (pieces[0].t != 0) throw std::invalid_argument("first control piece must start at t = 0");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!std::isfinite(pieces[i].u1) || !std::isfinite(pieces[i].u2)) throw std::invalid_argument("non-finite control");
    if (i > 0 && !(pieces[i].t > pieces[i - 1].t)) throw std::invalid_argument("control times must increase");
  }
}

std::array<double, 2> ControlSignal::At(double t) const {
  auto it = std::upper_bound(pieces.begin(), pieces.end(), t, [](double v, const Piece& p) { return v < p.t; });
  const Piece& p = it == pieces.begin() ? pieces.front() : *(it - 1);
  return {p.u1, p.u2};
}

NumericPoint ParamPoint(const SnakeModel& m) {
  NumericPoint p;
  const auto v = m.params.NumericValues();
  for (int i = 0; i < kNumParams; ++i) p.SetParam(i, v[i]);
  return p;
}

NumericPoint ChartPoint(const SnakeModel& m, const State& q) {
  NumericPoint p = ParamPoint(m);
  for (int k = 0; k < 5; ++k) p.Set(Chart::M().var(k), q[k]);
  return p;
}

namespace {

NumericPoint WithState(NumericPoint p, const State& q) {
  for (int k = 0; k < 5; ++k) p.Set(Chart::M().var(k), q[k]);
  return p;
}

Eigen::Matrix<double, 5, 1> Eval(const VectorField& x, const NumericPoint& base, const State& q) {
  return EvalField(x, WithState(base, q));
}

State Axpy(const State& q, double a, const Eigen::Matrix<double, 5, 1>& v) {
  State r = q;
  for (int k = 0; k < 5; ++k) r[k] += a * v(k);
  return r;
}

template <class F>
State Rk4Step(const F& f, const State& q, double h) {
  const auto k1 = f(q);
  const auto k2 = f(Axpy(q, h / 2, k1));
  const auto k3 = f(Axpy(q, h / 2, k2));
  const auto k4 = f(Axpy(q, h, k3));
  return Axpy(q, h / 6, k1 + 2 * k2 + 2 * k3 + k4);
}

double FrameDeterminant(const SnakeModel& m, const NumericPoint& p) {
  Eigen::Matrix<double, 5, 5> f;
  for (int k = 0; k < 5; ++k) f.col(k) = EvalField(m.xi[k], p);
  return f.determinant();
}

Eigen::Matrix<double, 5, 1> Velocity(const SnakeModel& m, const NumericPoint& p, const std::array<double, 2>& u) {
  Eigen::Matrix<double, 5, 1> v = Eigen::Matrix<double, 5, 1>::Zero();
  if (u[0] != 0) v += u[0] * EvalField(m.Xi(4), p);
  if (u[1] != 0) v += u[1] * EvalField(m.Xi(5), p);
  return v;
}

NumericPoint R8Point(const SnakeModel& m, const Eigen::Matrix<double, 8, 1>& r8) {
  NumericPoint p = ParamPoint(m);
  for (int k = 0; k < 8; ++k) p.Set(Chart::R8().var(k), r8(k));
  return p;
}

void Diagnose(const SnakeModel& m, TrajectorySample& s) {
  const NumericPoint p = ChartPoint(m, s.q);
  s.r8 = m.Embed(p);
  const NumericPoint r = R8Point(m, s.r8);
  for (int i = 0; i < 3; ++i) s.h_drift[i] = std::abs(m.h[i].Eval(r));
  const Eigen::Matrix<double, 5, 1> v = Velocity(m, p, s.u);
  for (int a = 0; a < 3; ++a) {
    double acc = 0;
    for (int k = 0; k < 5; ++k) acc += m.pfaffian[a][k].Eval(p) * v(k);
    s.pfaffian_drift[a] = std::abs(acc);
  }
  s.frame_determinant = FrameDeterminant(m, p);
}

std::string Describe(const State& q) {
  std::ostringstream os;
  os << "(" << q[0] << ", " << q[1] << ", " << q[2] << ", " << q[3] << ", " << q[4] << ")";
  return os.str();
}

}  // namespace

Trajectory IntegrateControls(const SnakeModel& m, const State& q0, const ControlSignal& u,
                             const IntegrateOptions& options) {
  u.Validate();
  const double steps_d = std::ceil(u.horizon / u.dt - 1e-9);
  if (steps_d > static_cast<double>(options.max_steps)) {
    throw StepOverflowError("horizon / dt exceeds the step limit of " + std::to_string(options.max_steps));
  }
  const auto steps = static_cast<std::size_t>(steps_d);
  const NumericPoint base = ParamPoint(m);
  Trajectory out;
  out.samples.reserve(steps + 1);
  State q = q0;
  double t = 0;
  for (std::size_t i = 0;; ++i) {
    TrajectorySample s;
    s.t = t;
    s.q = q;
    s.u = u.At(t);
    Diagnose(m, s);
    if (options.degeneracy == DegeneracyPolicy::kHalt && std::abs(s.frame_determinant) < options.degeneracy_threshold) {
      throw DegenerateFrameError("frame det(xi1..xi5) = " + std::to_string(s.frame_determinant) + " at t = " +
                                 std::to_string(t) + ", q = " + Describe(q));
    }
    out.samples.push_back(s);
    if (i == steps) break;
    const double h = std::min(u.dt, u.horizon - t);
    const auto uu = u.At(t);
    q = Rk4Step([&](const State& x) { return Velocity(m, WithState(base, x), uu); }, q, h);
    for (double v : q) {
      if (!std::isfinite(v)) throw StepOverflowError("state left the finite range at t = " + std::to_string(t));
    }
    t = i + 1 == steps ? u.horizon : (i + 1) * u.dt;
  }
  return out;
}

std::vector<Trajectory> IntegrateMany(const SnakeModel& m, const std::vector<State>& q0,
                                      const std::vector<ControlSignal>& u, const IntegrateOptions& options,
                                      int threads) {
  if (q0.size() != u.size()) throw std::invalid_argument("one control signal per initial state");
  const int n = static_cast<int>(q0.size());
  std::vector<Trajectory> out(n);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::max(1, std::min(threads, n));
  std::vector<std::future<void>> jobs;
  for (int w = 0; w < threads; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < n; i += threads) out[i] = IntegrateControls(m, q0[i], u[i], options);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

DriftSummary DriftReport(const SnakeModel& m, const Trajectory& t, double tolerance) {
  DriftSummary d;
  if (t.samples.empty()) return d;
  d.min_abs_frame_determinant = std::abs(t.samples.front().frame_determinant);
  double sum_h = 0, sum_p = 0;
  for (const auto& s : t.samples) {
    const NumericPoint rp = R8Point(m, s.r8);
    const NumericPoint p = ChartPoint(m, s.q);
    const Eigen::Matrix<double, 5, 1> v = Velocity(m, p, s.u);
    double hmax = 0, pmax = 0;
    for (int i = 0; i < 3; ++i) hmax = std::max(hmax, std::abs(m.h[i].Eval(rp)));
    for (int a = 0; a < 3; ++a) {
      double acc = 0;
      for (int k = 0; k < 5; ++k) acc += m.pfaffian[a][k].Eval(p) * v(k);
      pmax = std::max(pmax, std::abs(acc));
    }
    d.max_h = std::max(d.max_h, hmax);
    d.max_pfaffian = std::max(d.max_pfaffian, pmax);
    sum_h += hmax;
    sum_p += pmax;
    d.min_abs_frame_determinant = std::min(d.min_abs_frame_determinant, std::abs(s.frame_determinant));
  }
  d.mean_h = sum_h / t.samples.size();
  d.mean_pfaffian = sum_p / t.samples.size();
  d.flagged = d.max_h > tolerance || d.max_pfaffian > tolerance;
  return d;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& t) {
  out << "t,x,y,theta,phi,psi,h1,h2,h3,upsilon1,upsilon2,upsilon3,frame_det\n";
  const auto old = out.precision(17);
  for (const auto& s : t.samples) {
    out << s.t;
    for (double v : s.q) out << ',' << v;
    for (double v : s.h_drift) out << ',' << v;
    for (double v : s.pfaffian_drift) out << ',' << v;
    out << ',' << s.frame_determinant << '\n';
  }
  out.precision(old);
}

State Flow(const VectorField& x, const NumericPoint& params, const State& q, double t, int steps) {
  State r = q;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) r = Rk4Step([&](const State& s) { return Eval(x, params, s); }, r, h);
  return r;
}

FlowTestResult CommutatorFlowTest(const VectorField& x, const VectorField& y, const VectorField& expected,
                                  const NumericPoint& params, const State& q0, const std::vector<double>& eps,
                                  int steps) {
  FlowTestResult out;
  out.eps = eps;
  out.expected = Eval(expected, params, q0);
  for (double e : eps) {
    State q = Flow(x, params, q0, e, steps);
    q = Flow(y, params, q, e, steps);
    q = Flow(x, params, q, -e, steps);
    q = Flow(y, params, q, -e, steps);
    Eigen::Matrix<double, 5, 1> d;
    for (int k = 0; k < 5; ++k) d(k) = q[k] - q0[k];
    out.displacement.push_back(d.norm());
    const double c = d.dot(out.expected) / (d.norm() * out.expected.norm());
    out.angle.push_back(std::acos(std::clamp(c, -1.0, 1.0)));
  }
  if (eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double lx = std::log(eps[i]), ly = std::log(out.displacement[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

FlowTestResult CommutatorFlowTest(const SnakeModel& m, const State& q0, const std::vector<double>& eps) {
  return CommutatorFlowTest(m.Xi(5), m.Xi(4), m.Xi(3), ParamPoint(m), q0, eps);
}

State RigidMotion::Apply(const State& q) const {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * q[0] - s * q[1] + tx, s * q[0] + c * q[1] + ty, q[2] + angle, q[3], q[4]};
}

}  // namespace snakecr
