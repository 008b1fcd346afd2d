// Copyright 2026 The ilqrgrad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial references vs OpenMP kernels, and implicit vs unrolled backward.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "ilqrgrad/baselines.hpp"
#include "ilqrgrad/learning.hpp"

namespace {

using namespace ilqrgrad;

struct Fixture {
  Problem problem;
  Params params;
  Vec x0;
  IlqrResult result;
  LqrExpansion expansion;
  LqrSolution lqr;
  std::vector<int> seeds;
};

Fixture make_fixture(const std::string& id, int T, int forced_iterations = 0) {
  const ModelSpec spec = make_model_spec(id);
  Fixture f;
  f.problem = Problem::from_spec(spec, T);
  f.params = Params{spec.dyn_params, spec.cost_params};
  std::mt19937_64 rng(0);
  f.x0 = sample_initial_state(spec, rng);
  IlqrOptions opts;
  opts.fp_tol = 1e-10;
  opts.forced_iterations = forced_iterations;
  f.result = ilqr_solve(f.problem, f.x0, f.params, opts);
  f.expansion = expand(f.problem, f.x0, f.result.traj, f.params);
  f.lqr = solve_lqr(f.expansion.lqr, f.result.traj);
  const int n = f.problem.state_dim(), m = f.problem.control_dim();
  f.seeds.resize(T * m);
  std::iota(f.seeds.begin(), f.seeds.end(), T * n);
  return f;
}

void BM_LqrJacobianSerial(benchmark::State& state) {
  const Fixture f = make_fixture("cartpole", static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lqr_jacobian_serial(f.expansion.lqr, f.lqr, f.seeds));
}

void BM_LqrJacobianParallel(benchmark::State& state) {
  const Fixture f = make_fixture("cartpole", static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(lqr_jacobian_batched(f.expansion.lqr, f.lqr, f.seeds, 0));
}

void assemble(benchmark::State& state, bool serial) {
  const Fixture f = make_fixture("cartpole", static_cast<int>(state.range(0)));
  AssemblyOptions opts;
  opts.serial_reference = serial;
  opts.parallel_min_horizon = serial ? 1 << 30 : 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_fixed_point_system(f.problem, f.x0, f.result.traj,
                                                         f.params, ParamBlock::kAll, opts));
}

void BM_AssemblySerial(benchmark::State& state) { assemble(state, true); }
void BM_AssemblyParallel(benchmark::State& state) { assemble(state, false); }

void finite_diff(benchmark::State& state, bool parallel) {
  const Fixture f = make_fixture("pendulum", static_cast<int>(state.range(0)));
  FiniteDiffOptions opts;
  opts.parallel = parallel;
  opts.ilqr.fp_tol = 1e-10;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        finite_diff_sensitivities(f.problem, f.x0, f.params, ParamBlock::kDynamics, opts));
}

void BM_FiniteDiffSerial(benchmark::State& state) { finite_diff(state, false); }
void BM_FiniteDiffParallel(benchmark::State& state) { finite_diff(state, true); }

void BM_ImplicitBackward(benchmark::State& state) {
  const Fixture f = make_fixture("pendulum", 10, static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        implicit_backward(f.problem, f.x0, f.params, f.result, ParamBlock::kDynamics));
}

void BM_UnrolledBackward(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Fixture f = make_fixture("pendulum", 10);
  IlqrOptions opts;
  opts.fp_tol = 1e-10;
  opts.forced_iterations = N;
  for (auto _ : state) {
    const UnrolledResult r =
        unrolled_sensitivities(f.problem, f.x0, f.params, ParamBlock::kDynamics, N, opts);
    state.SetIterationTime(r.derivative_seconds);
  }
}

}  // namespace

BENCHMARK(BM_LqrJacobianSerial)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_LqrJacobianParallel)->Arg(10)->Arg(40)->Arg(160)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_AssemblySerial)->Arg(10)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssemblyParallel)->Arg(10)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiniteDiffSerial)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiniteDiffParallel)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImplicitBackward)->Arg(50)->Arg(100)->Arg(200)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UnrolledBackward)
    ->Arg(50)
    ->Arg(100)
    ->Arg(200)
    ->Arg(300)
    ->UseManualTime()
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
