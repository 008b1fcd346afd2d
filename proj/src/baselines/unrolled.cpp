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

#include <chrono>

#include "ilqrgrad/baselines.hpp"

namespace ilqrgrad {

namespace {

/// d(initial guess)/dtheta: controls are constant, states follow the rollout.
UnrolledTape initial_tape(const Problem& problem, const Trajectory& guess,
                          const Params& params, ParamBlock block) {
  const int T = problem.horizon, n = problem.state_dim(), m = problem.control_dim();
  const int p = params.dim(block);
  UnrolledTape tape;
  tape.dX = Mat::Zero(T * n, p);
  tape.dU = Mat::Zero(T * m, p);
  if (block == ParamBlock::kCost) return tape;
  const int pd = problem.dynamics->param_dim();
  Mat dx = Mat::Zero(n, p);
  for (int t = 0; t + 1 < T; ++t) {
    const DynamicsEval dyn =
        problem.dynamics->linearize(guess.x.col(t), guess.u.col(t), params.dynamics);
    Mat next = dyn.A * dx;
    next.leftCols(pd) += dyn.df_dtheta;
    dx = std::move(next);
    tape.dX.middleRows((t + 1) * n, n) = dx;
  }
  return tape;
}

}  // namespace

void unrolled_update(const FixedPointSystem& step, UnrolledTape& tape) {
  Mat dU = step.G_X * tape.dX + step.G_U * tape.dU + step.G_theta;
  Mat dX = step.F_X * tape.dX + step.F_U * tape.dU + step.F_theta;
  tape.dX = std::move(dX);
  tape.dU = std::move(dU);
  ++tape.iterations;
}

UnrolledResult unrolled_sensitivities(const Problem& problem, const Vec& x_init,
                                      const Params& params, ParamBlock block, int iterations,
                                      const IlqrOptions& ilqr_opts,
                                      const AssemblyOptions& assembly) {
  if (iterations < 1) throw ConfigError("unrolled sensitivities need at least one iteration");
  problem.validate(params, x_init);
  using clock = std::chrono::steady_clock;

  UnrolledResult out;
  IlqrResult& res = out.ilqr;
  Trajectory traj = initial_guess(problem, x_init, params);
  double cost = problem.total_cost(traj, params);
  res.cost_history.push_back(cost);

  auto start = clock::now();
  UnrolledTape tape = initial_tape(problem, traj, params, block);
  out.derivative_seconds += std::chrono::duration<double>(clock::now() - start).count();

  AssemblyOptions step_opts = assembly;
  step_opts.factorize = false;
  double full_residual = INFINITY;
  for (int it = 1; it <= iterations; ++it) {
    IlqrStep step = ilqr_step(problem, x_init, traj, cost, params, ilqr_opts);
    full_residual = step.full.residual;

    start = clock::now();
    if (step.accepted) {
      step_opts.alpha = step.alpha;
      const FixedPointSystem sys =
          assemble_fixed_point_system(problem, x_init, traj, params, block, step_opts);
      unrolled_update(sys, tape);
    } else {
      ++tape.iterations;
    }
    out.derivative_seconds += std::chrono::duration<double>(clock::now() - start).count();

    res.K = step.full.lqr.K();
    res.k = step.full.lqr.k();
    res.iterations = it;
    res.step_sizes.push_back(step.alpha);
    res.residual = step.alpha * full_residual;
    traj = std::move(step.next);
    cost = step.cost;
    res.cost_history.push_back(cost);
  }
  res.traj = std::move(traj);
  res.converged = full_residual <= ilqr_opts.fp_tol;

  out.sens.dX = std::move(tape.dX);
  out.sens.dU = std::move(tape.dU);
  return out;
}

}  // namespace ilqrgrad
