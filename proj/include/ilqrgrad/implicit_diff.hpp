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

#include <string>
#include <vector>

#include "ilqrgrad/ilqr.hpp"

namespace ilqrgrad {

/// Partial derivatives of one step's LQR coefficients (D_t, d_t, C_t, c_t)
/// with respect to that step's own x_t, u_t and the selected parameters.
/// Coefficients of step t depend on no other step, so dD/dX is block
/// diagonal; only these diagonal blocks are ever stored.
struct StepDerivatives {
  MatSlices dD_dx, dD_du, dD_dtheta;  // slices of n x (n+m)
  Mat dd_dx, dd_du, dd_dtheta;        // n x n, n x m, n x p
  MatSlices dC_dx, dC_du, dC_dtheta;  // slices of (n+m) x (n+m)
  Mat dc_dx, dc_du, dc_dtheta;        // (n+m) x n, (n+m) x m, (n+m) x p
  Mat A, B, df_dtheta;                // first-order dynamics (zero at t = T)

  /// Number of doubles held; grows linearly in T across a trajectory.
  std::size_t stored_doubles() const;
};

std::vector<StepDerivatives> step_derivatives(const Problem& problem,
                                              const Trajectory& traj,
                                              const LqrExpansion& expansion,
                                              ParamBlock block);

/// Solved fixed-point sensitivities, stacked as (x_1..x_T) and (u_1..u_T).
struct TrajectorySensitivities {
  Mat dX;  // Tn x p
  Mat dU;  // Tm x p
  double residual = 0.0;             // relative residual of the linear system
  double condition_estimate = 0.0;   // max of the two factorizations
  bool degenerate_active_set = false;
  std::string warning;
};

/// Total derivatives along the fixed point carried by the forward sweep.
struct SensitivityState {
  int t = 0;  // 1-based time index
  Mat dx_dtheta;          // n x p
  Mat du_dtheta;          // m x p
  MatSlices dD_dtheta;    // p slices of n x (n+m)
  Mat dd_dtheta;          // n x p
  MatSlices dC_dtheta;    // p slices
  Mat dc_dtheta;          // (n+m) x p
};

/// Single O(T) sweep starting from dx_1/dtheta = 0 that propagates
/// dx_t/dtheta through the dynamics and forms the total derivatives of
/// D_t, d_t, C_t, c_t along the trajectory. du_t/dtheta is K_t dx_t when
/// `solved` is null, otherwise the matching rows of solved->dU.
std::vector<SensitivityState> forward_algorithm(const Problem& problem,
                                                const IlqrResult& result,
                                                const std::vector<StepDerivatives>& steps,
                                                const TrajectorySensitivities* solved = nullptr);

std::vector<SensitivityState> forward_algorithm(const Problem& problem, const Vec& x_init,
                                                const Params& params,
                                                const IlqrResult& result, ParamBlock block,
                                                const TrajectorySensitivities* solved = nullptr);

/// "full": implicit differentiation of the fixed point. "last-layer": the
/// trajectory the final LQR was built around is treated as constant.
enum class DiffMode { kFull, kLastLayer };
DiffMode parse_diff_mode(const std::string& name);
std::string to_string(DiffMode mode);

/// Jacobians of one iteration map (X, U, theta) -> (X', U') where
/// U' = U + alpha (U_lqr - U) and X' is the rollout of U'.
struct FixedPointSystem {
  Mat F_X, F_U, F_theta;
  Mat G_X, G_U, G_theta;
  Eigen::PartialPivLU<Mat> M;  // factorization of I - F_X
  Mat K_op;                    // I - G_U
  double condition_M = 0.0;
  bool degenerate_active_set = false;
};

struct AssemblyOptions {
  DiffMode mode = DiffMode::kFull;
  double alpha = 1.0;
  int parallel_min_horizon = 30;
  bool serial_reference = false;  // contract seeds with the serial kernel
  bool factorize = true;          // factor I - F_X (not needed when unrolling)
  LqrOptions lqr;
};

/// Build the six Jacobians from the LQR unit-seed gradients chained with the
/// per-step coefficient derivatives, plus the rollout's direct dependence.
/// Throws SolverError if I - F_X is numerically singular.
FixedPointSystem assemble_fixed_point_system(const Problem& problem, const Vec& x_init,
                                             const Trajectory& at, const Params& params,
                                             ParamBlock block,
                                             const AssemblyOptions& opts = {});

/// Closed form: dU = (K - G_X M F_U)^{-1} (G_X M F_theta + G_theta),
/// dX = M (F_theta + F_U dU).
TrajectorySensitivities solve_sensitivities(const FixedPointSystem& sys);

/// Direct LU solve of the 2x2 block system; reference for the closed form.
TrajectorySensitivities solve_sensitivities_block(const FixedPointSystem& sys);

/// dL/dtheta = dL/dX dX/dtheta + dL/dU dU/dtheta.
Vec vjp(const Vec& dL_dX, const Vec& dL_dU, const TrajectorySensitivities& sens);
Vec vjp(const Trajectory& dL_dtraj, const TrajectorySensitivities& sens);

struct GradOptions {
  IlqrOptions ilqr;
  AssemblyOptions assembly;
  ParamBlock block = ParamBlock::kDynamics;
};

struct GradResult {
  IlqrResult ilqr;
  TrajectorySensitivities sens;
  double backward_seconds = 0.0;  // assembly + solve only
};

/// ilqr_solve followed by the implicit backward stage. Throws SolverError
/// when the solve did not converge.
GradResult grad_trajectory(const Problem& problem, const Vec& x_init, const Params& params,
                           const GradOptions& opts = {});

/// The backward stage alone, at a converged result.
TrajectorySensitivities implicit_backward(const Problem& problem, const Vec& x_init,
                                          const Params& params, const IlqrResult& result,
                                          ParamBlock block, const AssemblyOptions& opts = {});

}  // namespace ilqrgrad
