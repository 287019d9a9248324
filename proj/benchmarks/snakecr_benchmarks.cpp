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

#include <benchmark/benchmark.h>

#include <random>

#include "snakecr/cr_structure.hpp"
#include "snakecr/equivalence.hpp"
#include "snakecr/kinematics.hpp"
#include "snakecr/parser.hpp"
#include "snakecr/snake_model.hpp"

namespace snakecr {
namespace {

SnakeParams Half() { return SnakeParams::Rational(1, mpq_class(1, 2), 1); }

void BM_TrigProduct(benchmark::State& state) {
  const TrigExpr a = Parse("s1*cos(theta+phi)-x*sin(psi)+2");
  const TrigExpr b = Parse("s3*sin(theta-psi)+y*cos(2*phi)");
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_TrigProduct);

void BM_BuildModelSymbolic(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(BuildModel(SnakeParams::Symbolic()));
}
BENCHMARK(BM_BuildModelSymbolic)->Unit(benchmark::kMillisecond);

void BM_Growth(benchmark::State& state) {
  const SnakeModel m = BuildModel(Half());
  for (auto _ : state) benchmark::DoNotOptimize(CheckGrowth(m, static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_Growth)->Arg(20)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SolveComplexStructure(benchmark::State& state) {
  const SnakeModel m = BuildModel(SnakeParams::Rational(1, mpq_class(1, state.range(0)), 1));
  for (auto _ : state) benchmark::DoNotOptimize(SolveComplexStructure(m));
}
BENCHMARK(BM_SolveComplexStructure)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_AdaptedCoframe(benchmark::State& state) {
  const SnakeModel m = BuildModel(Half());
  for (auto _ : state) benchmark::DoNotOptimize(BuildAdaptedCoframe(m));
}
BENCHMARK(BM_AdaptedCoframe)->Unit(benchmark::kMillisecond);

void BM_NilpotentSymbol(benchmark::State& state) {
  const SnakeModel m = BuildModel(Half());
  std::mt19937_64 rng(3);
  const NumericPoint p = m.SamplePoint(rng);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeNilpotentSymbol(m, p));
}
BENCHMARK(BM_NilpotentSymbol)->Unit(benchmark::kMicrosecond);

void BM_NormalizeOnePoint(benchmark::State& state) {
  const SnakeModel m = BuildModel(Half());
  const AdaptedCoframe c = BuildAdaptedCoframe(m);
  NormalizeOptions o;
  o.points = 1;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(NormalizeCoframe(m, c, o));
}
BENCHMARK(BM_NormalizeOnePoint)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_IntegrateControls(benchmark::State& state) {
  const SnakeModel m = BuildModel(Half());
  const ControlSignal u = ControlSignal::Constant(1.0, 0.5, 1.0, 1.0 / static_cast<double>(state.range(0)));
  const State q0{0, 0, 0, 0.4, -0.7};
  for (auto _ : state) benchmark::DoNotOptimize(IntegrateControls(m, q0, u));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntegrateControls)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CommutatorFlow(benchmark::State& state) {
  const SnakeModel m = BuildModel(Half());
  const State q0{0.3, -0.2, 0.7, 0.4, -0.9};
  for (auto _ : state) benchmark::DoNotOptimize(CommutatorFlowTest(m, q0, {1e-2, 1e-3}));
}
BENCHMARK(BM_CommutatorFlow)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace snakecr

BENCHMARK_MAIN();
