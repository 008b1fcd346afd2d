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
#include <exception>

#include "ilqrgrad/baselines.hpp"

namespace ilqrgrad {

namespace {

std::vector<std::string> block_names(const Problem& problem, ParamBlock block) {
  std::vector<std::string> names;
  if (block != ParamBlock::kCost) names = problem.dynamics->param_names();
  if (block != ParamBlock::kDynamics) {
    const auto cost = problem.cost->param_names();
    names.insert(names.end(), cost.begin(), cost.end());
  }
  return names;
}

/// Solves at theta +- h e_j for every j; probes are independent.
std::vector<Trajectory> probe_solutions(const Problem& problem, const Vec& x_init,
                                        const Params& params, ParamBlock block,
                                        const FiniteDiffOptions& opts, Vec& steps) {
  const Vec theta = params.select(block);
  const int p = static_cast<int>(theta.size());
  steps.resize(p);
  for (int j = 0; j < p; ++j)
    steps[j] = opts.relative_step ? opts.h * std::max(1.0, std::abs(theta[j])) : opts.h;

  std::vector<Trajectory> sols(2 * p);
  std::vector<int> failed(2 * p, 0);
  std::vector<std::exception_ptr> errors(2 * p);
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (int k = 0; k < 2 * p; ++k) {
    try {
      Vec perturbed = theta;
      perturbed[k / 2] += (k % 2 == 0 ? steps[k / 2] : -steps[k / 2]);
      const IlqrResult r = ilqr_solve(problem, x_init, params.with(block, perturbed), opts.ilqr);
      if (!r.converged) failed[k] = 1;
      sols[k] = r.traj;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  const auto names = block_names(problem, block);
  for (int k = 0; k < 2 * p; ++k) {
    const int j = k / 2;
    const std::string who = j < static_cast<int>(names.size()) ? names[j] : std::to_string(j);
    if (errors[k]) {
      try {
        std::rethrow_exception(errors[k]);
      } catch (const std::exception& e) {
        throw SolverError("finite differences: solve failed when perturbing parameter '" + who +
                          "': " + e.what());
      }
    }
    if (failed[k])
      throw SolverError("finite differences: iLQR did not converge when perturbing parameter '" +
                        who + "'");
  }
  return sols;
}

}  // namespace

Vec finite_diff_gradient(const Problem& problem, const Vec& x_init, const Params& params,
                         ParamBlock block, const TrajectoryLoss& loss,
                         const FiniteDiffOptions& opts) {
  Vec steps;
  const std::vector<Trajectory> sols = probe_solutions(problem, x_init, params, block, opts, steps);
  const int p = static_cast<int>(steps.size());
  Vec grad(p);
  for (int j = 0; j < p; ++j)
    grad[j] = (loss(sols[2 * j]) - loss(sols[2 * j + 1])) / (2.0 * steps[j]);
  return grad;
}

TrajectorySensitivities finite_diff_sensitivities(const Problem& problem, const Vec& x_init,
                                                  const Params& params, ParamBlock block,
                                                  const FiniteDiffOptions& opts) {
  Vec steps;
  const std::vector<Trajectory> sols = probe_solutions(problem, x_init, params, block, opts, steps);
  const int p = static_cast<int>(steps.size());
  const int T = problem.horizon, n = problem.state_dim(), m = problem.control_dim();
  TrajectorySensitivities sens;
  sens.dX.resize(T * n, p);
  sens.dU.resize(T * m, p);
  for (int j = 0; j < p; ++j) {
    sens.dX.col(j) = (sols[2 * j].stacked_x() - sols[2 * j + 1].stacked_x()) / (2.0 * steps[j]);
    sens.dU.col(j) = (sols[2 * j].stacked_u() - sols[2 * j + 1].stacked_u()) / (2.0 * steps[j]);
  }
  return sens;
}

}  // namespace ilqrgrad
