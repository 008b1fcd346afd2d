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

#include <functional>

#include "ilqrgrad/implicit_diff.hpp"

namespace ilqrgrad {

/// Per-iteration carry of the unrolled forward-mode sensitivities.
struct UnrolledTape {
  Mat dX;  // Tn x p
  Mat dU;  // Tm x p
  int iterations = 0;
};

struct UnrolledResult {
  TrajectorySensitivities sens;
  IlqrResult ilqr;
  double derivative_seconds = 0.0;  // sensitivity work only
};

/// Runs exactly `iterations` iLQR steps and pushes dX/dtheta, dU/dtheta
/// through the linearization of every step actually taken.
UnrolledResult unrolled_sensitivities(const Problem& problem, const Vec& x_init,
                                      const Params& params, ParamBlock block, int iterations,
                                      const IlqrOptions& ilqr_opts = {},
                                      const AssemblyOptions& assembly = {});

/// Propagates one tape through a single iteration-map linearization.
void unrolled_update(const FixedPointSystem& step, UnrolledTape& tape);

using TrajectoryLoss = std::function<double(const Trajectory&)>;

struct FiniteDiffOptions {
  double h = 1e-5;          // step, relative to max(1, |theta_j|)
  bool relative_step = true;
  bool parallel = true;
  IlqrOptions ilqr;
};

/// Central differences of loss(tau*(theta)) with 2p full iLQR solves.
/// Throws SolverError naming the parameter whose perturbed solve failed.
Vec finite_diff_gradient(const Problem& problem, const Vec& x_init, const Params& params,
                         ParamBlock block, const TrajectoryLoss& loss,
                         const FiniteDiffOptions& opts = {});

/// Central-difference Jacobians of the converged trajectory itself.
TrajectorySensitivities finite_diff_sensitivities(const Problem& problem, const Vec& x_init,
                                                  const Params& params, ParamBlock block,
                                                  const FiniteDiffOptions& opts = {});

}  // namespace ilqrgrad
