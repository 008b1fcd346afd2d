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

#include "ilqrgrad/implicit_diff.hpp"

namespace ilqrgrad {

TrajectorySensitivities implicit_backward(const Problem& problem, const Vec& x_init,
                                          const Params& params, const IlqrResult& result,
                                          ParamBlock block, const AssemblyOptions& opts) {
  if (!result.converged)
    throw SolverError("implicit gradient requested at a non-converged iLQR result (residual " +
                      std::to_string(result.residual) + ")");
  const FixedPointSystem sys =
      assemble_fixed_point_system(problem, x_init, result.traj, params, block, opts);
  return solve_sensitivities(sys);
}

GradResult grad_trajectory(const Problem& problem, const Vec& x_init, const Params& params,
                           const GradOptions& opts) {
  GradResult out;
  out.ilqr = ilqr_solve(problem, x_init, params, opts.ilqr);
  const auto start = std::chrono::steady_clock::now();
  out.sens = implicit_backward(problem, x_init, params, out.ilqr, opts.block, opts.assembly);
  out.backward_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace ilqrgrad
