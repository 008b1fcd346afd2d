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

#pragma once

#include <vector>

#include "ilqrgrad/lqr.hpp"
#include "ilqrgrad/problem.hpp"

namespace ilqrgrad {

struct IlqrOptions {
  double fp_tol = 1e-8;
  int max_iter = 200;
  bool line_search = true;
  /// When positive, run exactly this many iterations (timing runs).
  int forced_iterations = 0;
  /// Steps whose max control change is below this skip the line search.
  double full_step_below = 1e-6;
  int line_search_steps = 11;  // alpha = 1, 1/2, ..., 2^-10
  LqrOptions lqr;
};

/// The LQR subproblem posed around a trajectory, with the model evaluations
/// it was built from (reused by the implicit gradient).
struct LqrExpansion {
  LqrProblem lqr;
  std::vector<DynamicsEval> dynamics;  // size T-1
  std::vector<CostEval> cost;          // size T
};

/// Linearize the dynamics and quadraticize the cost around `traj`; the LQR is
/// posed in absolute coordinates with d_t = f(x_t, u_t) - D_t tau_t and
/// c_t = grad g_t - C_t tau_t.
LqrExpansion expand(const Problem& problem, const Vec& x_init, const Trajectory& traj,
                    const Params& params);

struct IterationOutput {
  Trajectory traj;
  LqrExpansion expansion;
  LqrSolution lqr;
  double residual = 0.0;  // max |u' - u|
};

/// One iLQR iteration: expand, solve the LQR around `traj`, set
/// u' = u + alpha (u_lqr - u) and re-roll the states through the true dynamics.
IterationOutput iteration_map(const Problem& problem, const Vec& x_init,
                              const Trajectory& traj, const Params& params,
                              double alpha = 1.0, const LqrOptions& opts = {});

struct IlqrResult {
  Trajectory traj;
  std::vector<Mat> K;  // gains of the final iteration
  std::vector<Vec> k;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> cost_history;
  std::vector<double> step_sizes;
};

/// Zero controls clipped to the box, states rolled out from x_init.
Trajectory initial_guess(const Problem& problem, const Vec& x_init, const Params& params);

/// One globalized iteration as performed inside ilqr_solve.
struct IlqrStep {
  IterationOutput full;  // alpha = 1 candidate (carries the LQR data)
  Trajectory next;
  double alpha = 1.0;
  double cost = 0.0;
  bool accepted = true;
};
IlqrStep ilqr_step(const Problem& problem, const Vec& x_init, const Trajectory& traj,
                   double current_cost, const Params& params, const IlqrOptions& opts);

IlqrResult ilqr_solve(const Problem& problem, const Vec& x_init, const Params& params,
                      const IlqrOptions& opts = {});

}  // namespace ilqrgrad
