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

#include <cmath>

#include "ilqrgrad/ilqr.hpp"

namespace ilqrgrad {

LqrExpansion expand(const Problem& problem, const Vec& x_init, const Trajectory& traj,
                    const Params& params) {
  const int T = problem.horizon, n = problem.state_dim(), m = problem.control_dim();
  if (traj.x.rows() != n || traj.x.cols() != T || traj.u.rows() != m || traj.u.cols() != T)
    throw ConfigError("iLQR: trajectory shape does not match the problem");

  LqrExpansion ex;
  LqrProblem& lqr = ex.lqr;
  lqr.x_init = x_init;
  lqr.u_lower = problem.u_lower;
  lqr.u_upper = problem.u_upper;
  lqr.D.resize(T);
  lqr.d.resize(T);
  lqr.C.resize(T);
  lqr.c.resize(T);
  ex.dynamics.reserve(T - 1);
  ex.cost.reserve(T);

  Vec tau(n + m);
  for (int t = 0; t < T; ++t) {
    tau << traj.x.col(t), traj.u.col(t);
    if (t + 1 < T) {
      DynamicsEval dyn = problem.dynamics->linearize(traj.x.col(t), traj.u.col(t),
                                                     params.dynamics);
      if (!dyn.next_state.allFinite() || !dyn.A.allFinite() || !dyn.B.allFinite())
        throw NumericError("dynamics evaluation is not finite", t + 1);
      lqr.D[t] = dyn.D();
      lqr.d[t] = dyn.next_state - lqr.D[t] * tau;
      ex.dynamics.push_back(std::move(dyn));
    } else {
      lqr.D[t] = Mat::Zero(n, n + m);
      lqr.d[t] = Vec::Zero(n);
    }
    CostEval cost = problem.cost->eval(traj.x.col(t), traj.u.col(t), params.cost, t + 1);
    lqr.C[t] = cost.C;
    lqr.c[t] = cost.c - cost.C * tau;
    ex.cost.push_back(std::move(cost));
  }
  return ex;
}

IterationOutput iteration_map(const Problem& problem, const Vec& x_init,
                              const Trajectory& traj, const Params& params, double alpha,
                              const LqrOptions& opts) {
  IterationOutput out;
  out.expansion = expand(problem, x_init, traj, params);
  out.lqr = solve_lqr(out.expansion.lqr, traj, opts);
  const Mat controls = traj.u + alpha * (out.lqr.tau.u - traj.u);
  out.traj = problem.rollout(x_init, controls, params);
  out.residual = max_abs(controls - traj.u);
  return out;
}

Trajectory initial_guess(const Problem& problem, const Vec& x_init, const Params& params) {
  const Mat zero = Mat::Zero(problem.control_dim(), problem.horizon);
  return problem.rollout(x_init, problem.clip_controls(zero), params);
}

IlqrStep ilqr_step(const Problem& problem, const Vec& x_init, const Trajectory& traj,
                   double current_cost, const Params& params, const IlqrOptions& opts) {
  IlqrStep step;
  step.full = iteration_map(problem, x_init, traj, params, 1.0, opts.lqr);
  step.next = step.full.traj;
  step.cost = problem.total_cost(step.next, params);
  step.alpha = 1.0;
  if (!opts.line_search || step.full.residual <= opts.full_step_below) {
    if (!std::isfinite(step.cost)) throw NumericError("iLQR: cost is not finite", 0);
    return step;
  }

  const Mat direction = step.full.lqr.tau.u - traj.u;
  double alpha = 1.0;
  for (int i = 0; i < opts.line_search_steps; ++i, alpha *= 0.5) {
    if (i > 0) {
      step.next = problem.rollout(x_init, traj.u + alpha * direction, params);
      step.cost = problem.total_cost(step.next, params);
    }
    if (std::isfinite(step.cost) && step.cost < current_cost) {
      step.alpha = alpha;
      return step;
    }
  }
  step.accepted = false;
  step.alpha = 0.0;
  step.next = traj;
  step.cost = current_cost;
  return step;
}

IlqrResult ilqr_solve(const Problem& problem, const Vec& x_init, const Params& params,
                      const IlqrOptions& opts) {
  problem.validate(params, x_init);
  IlqrResult res;
  Trajectory traj = initial_guess(problem, x_init, params);
  double cost = problem.total_cost(traj, params);
  res.cost_history.push_back(cost);

  const bool forced = opts.forced_iterations > 0;
  const int budget = forced ? opts.forced_iterations : opts.max_iter;
  double full_residual = INFINITY;

  for (int it = 1; it <= budget; ++it) {
    IlqrStep step = ilqr_step(problem, x_init, traj, cost, params, opts);
    full_residual = step.full.residual;
    res.K = step.full.lqr.K();
    res.k = step.full.lqr.k();
    res.iterations = it;
    res.step_sizes.push_back(step.alpha);
    res.residual = step.alpha * full_residual;
    traj = std::move(step.next);
    cost = step.cost;
    res.cost_history.push_back(cost);

    if (!forced && full_residual <= opts.fp_tol) break;
    if (!forced && !step.accepted) break;
  }
  res.traj = std::move(traj);
  res.converged = full_residual <= opts.fp_tol;
  return res;
}

}  // namespace ilqrgrad
