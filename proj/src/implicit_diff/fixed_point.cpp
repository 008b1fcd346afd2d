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
#include <numeric>

#include "ilqrgrad/implicit_diff.hpp"

namespace ilqrgrad {

namespace {

constexpr double kSingularRcond = 1e-14;
constexpr double kIllConditioned = 1e12;

using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

double frobenius_dot(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

/// d(row of the LQR output)/d(x_t, u_t, theta) from one unit-seed gradient.
void contract_seed(const LqrCoefficientGrad& g, const std::vector<StepDerivatives>& steps,
                   int n, int m, RowRef gx, RowRef gu, RowRef gth) {
  const int T = static_cast<int>(steps.size());
  const int p = static_cast<int>(gth.size());
  gth.setZero();
  for (int t = 0; t < T; ++t) {
    const StepDerivatives& s = steps[t];
    const Mat& dD = g.dD[t];
    const Vec& dd = g.dd[t];
    const Mat& dC = g.dC[t];
    const Vec& dc = g.dc[t];
    for (int j = 0; j < n; ++j)
      gx[t * n + j] = frobenius_dot(dD, s.dD_dx[j]) + dd.dot(s.dd_dx.col(j)) +
                      frobenius_dot(dC, s.dC_dx[j]) + dc.dot(s.dc_dx.col(j));
    for (int j = 0; j < m; ++j)
      gu[t * m + j] = frobenius_dot(dD, s.dD_du[j]) + dd.dot(s.dd_du.col(j)) +
                      frobenius_dot(dC, s.dC_du[j]) + dc.dot(s.dc_du.col(j));
    for (int q = 0; q < p; ++q)
      gth[q] += frobenius_dot(dD, s.dD_dtheta[q]) + dd.dot(s.dd_dtheta.col(q)) +
                frobenius_dot(dC, s.dC_dtheta[q]) + dc.dot(s.dc_dtheta.col(q));
  }
}

/// Tangent of the rollout x'_1 = x_init, x'_{t+1} = f(x'_t, u'_t) for control
/// directions V (Tm x c) and, when given, parameter directions.
Mat rollout_tangent(const std::vector<Mat>& A, const std::vector<Mat>& B,
                    const std::vector<Mat>* df_dtheta, const Mat& V, int n, int m) {
  const int T = static_cast<int>(A.size());
  const int cols = static_cast<int>(V.cols());
  Mat out = Mat::Zero(T * n, cols);
  Mat dx = Mat::Zero(n, cols);
  for (int t = 0; t + 1 < T; ++t) {
    Mat next = A[t] * dx + B[t] * V.middleRows(t * m, m);
    if (df_dtheta) next += (*df_dtheta)[t];
    dx = std::move(next);
    out.middleRows((t + 1) * n, n) = dx;
  }
  return out;
}

double sensitivity_residual(const FixedPointSystem& sys, const Mat& dX, const Mat& dU) {
  const Mat r1 = dX - sys.F_X * dX - sys.F_U * dU - sys.F_theta;
  const Mat r2 = sys.K_op * dU - sys.G_X * dX - sys.G_theta;
  const double scale = std::max({max_abs(sys.F_theta), max_abs(sys.G_theta), max_abs(dX),
                                 max_abs(dU), 1e-300});
  return std::max(max_abs(r1), max_abs(r2)) / scale;
}

}  // namespace

DiffMode parse_diff_mode(const std::string& name) {
  if (name == "full") return DiffMode::kFull;
  if (name == "last-layer") return DiffMode::kLastLayer;
  throw ConfigError("unknown differentiation mode '" + name + "'");
}

std::string to_string(DiffMode mode) {
  return mode == DiffMode::kFull ? "full" : "last-layer";
}

FixedPointSystem assemble_fixed_point_system(const Problem& problem, const Vec& x_init,
                                             const Trajectory& at, const Params& params,
                                             ParamBlock block, const AssemblyOptions& opts) {
  problem.validate(params, x_init);
  const int T = problem.horizon, n = problem.state_dim(), m = problem.control_dim();
  const int p = params.dim(block);

  const LqrExpansion expansion = expand(problem, x_init, at, params);
  const LqrSolution lqr = solve_lqr(expansion.lqr, at, opts.lqr);
  const std::vector<StepDerivatives> steps = step_derivatives(problem, at, expansion, block);

  // One unit seed per control output.
  std::vector<int> seeds(T * m);
  std::iota(seeds.begin(), seeds.end(), T * n);
  const std::vector<LqrCoefficientGrad> rows =
      opts.serial_reference
          ? lqr_jacobian_serial(expansion.lqr, lqr, seeds)
          : lqr_jacobian_batched(expansion.lqr, lqr, seeds, opts.parallel_min_horizon);

  FixedPointSystem sys;
  sys.degenerate_active_set = lqr.backward.degenerate;
  sys.G_X.resize(T * m, T * n);
  sys.G_U.resize(T * m, T * m);
  sys.G_theta.resize(T * m, p);
  const int count = T * m;
  if (opts.serial_reference) {
    for (int r = 0; r < count; ++r)
      contract_seed(rows[r], steps, n, m, sys.G_X.row(r), sys.G_U.row(r), sys.G_theta.row(r));
  } else {
    const bool parallel = T >= opts.parallel_min_horizon;
#pragma omp parallel for schedule(static) if (parallel)
    for (int r = 0; r < count; ++r)
      contract_seed(rows[r], steps, n, m, sys.G_X.row(r), sys.G_U.row(r), sys.G_theta.row(r));
  }

  if (opts.mode == DiffMode::kLastLayer) {
    sys.G_X.setZero();
    sys.G_U.setZero();
  }
  const double alpha = opts.alpha;
  sys.G_X *= alpha;
  sys.G_theta *= alpha;
  sys.G_U = alpha * sys.G_U + (1.0 - alpha) * Mat::Identity(T * m, T * m);

  // Rollout of the new controls; at a fixed point it retraces `at`.
  const Mat new_controls = at.u + alpha * (lqr.tau.u - at.u);
  const Trajectory next = problem.rollout(x_init, new_controls, params);
  std::vector<Mat> A(T), B(T), dfdth(T);
  const bool retraced = next.x == at.x && next.u == at.u;
  for (int t = 0; t + 1 < T; ++t) {
    if (retraced) {
      A[t] = steps[t].A;
      B[t] = steps[t].B;
      dfdth[t] = steps[t].df_dtheta;
    } else {
      const DynamicsEval dyn =
          problem.dynamics->linearize(next.x.col(t), next.u.col(t), params.dynamics);
      A[t] = dyn.A;
      B[t] = dyn.B;
      dfdth[t] = Mat::Zero(n, p);
      if (block != ParamBlock::kCost) dfdth[t].leftCols(dyn.df_dtheta.cols()) = dyn.df_dtheta;
    }
  }
  sys.F_X = rollout_tangent(A, B, nullptr, sys.G_X, n, m);
  sys.F_U = rollout_tangent(A, B, nullptr, sys.G_U, n, m);
  sys.F_theta = rollout_tangent(A, B, &dfdth, sys.G_theta, n, m);

  sys.K_op = Mat::Identity(T * m, T * m) - sys.G_U;
  if (!opts.factorize) return sys;
  sys.M.compute(Mat::Identity(T * n, T * n) - sys.F_X);
  const double rcond = sys.M.rcond();
  sys.condition_M = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(rcond > kSingularRcond))
    throw SolverError("fixed-point system: I - F_X is singular (condition estimate " +
                      std::to_string(sys.condition_M) + ")");
  return sys;
}

TrajectorySensitivities solve_sensitivities(const FixedPointSystem& sys) {
  const Mat MF_U = sys.M.solve(sys.F_U);
  const Mat MF_theta = sys.M.solve(sys.F_theta);
  const Mat schur = sys.K_op - sys.G_X * MF_U;
  const Eigen::PartialPivLU<Mat> schur_lu(schur);

  TrajectorySensitivities sens;
  sens.dU = schur_lu.solve(sys.G_X * MF_theta + sys.G_theta);
  sens.dX = MF_theta + MF_U * sens.dU;
  sens.degenerate_active_set = sys.degenerate_active_set;

  const double rcond_s = schur_lu.rcond();
  sens.condition_estimate =
      std::max(sys.condition_M, rcond_s > 0.0 ? 1.0 / rcond_s : INFINITY);
  if (!(sens.condition_estimate <= kIllConditioned))
    sens.warning = "ill-conditioned fixed-point system (condition estimate " +
                   std::to_string(sens.condition_estimate) + ")";
  sens.residual = sensitivity_residual(sys, sens.dX, sens.dU);

#ifndef NDEBUG
  const TrajectorySensitivities direct = solve_sensitivities_block(sys);
  if (sens.condition_estimate < 1e8 &&
      (relative_error(sens.dU, direct.dU, 1e-12) > 1e-6 ||
       relative_error(sens.dX, direct.dX, 1e-12) > 1e-6))
    throw SolverError("closed-form sensitivities disagree with the block solve");
#endif
  return sens;
}

TrajectorySensitivities solve_sensitivities_block(const FixedPointSystem& sys) {
  const int nx = static_cast<int>(sys.F_X.rows());
  const int nu = static_cast<int>(sys.G_U.rows());
  const int p = static_cast<int>(sys.F_theta.cols());
  Mat lhs(nx + nu, nx + nu);
  lhs << Mat::Identity(nx, nx) - sys.F_X, -sys.F_U, -sys.G_X, sys.K_op;
  Mat rhs(nx + nu, p);
  rhs << sys.F_theta, sys.G_theta;
  const Eigen::PartialPivLU<Mat> lu(lhs);
  const Mat sol = lu.solve(rhs);

  TrajectorySensitivities sens;
  sens.dX = sol.topRows(nx);
  sens.dU = sol.bottomRows(nu);
  sens.degenerate_active_set = sys.degenerate_active_set;
  const double rcond = lu.rcond();
  sens.condition_estimate = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  sens.residual = sensitivity_residual(sys, sens.dX, sens.dU);
  return sens;
}

Vec vjp(const Vec& dL_dX, const Vec& dL_dU, const TrajectorySensitivities& sens) {
  if (dL_dX.size() != sens.dX.rows() || dL_dU.size() != sens.dU.rows())
    throw ConfigError("vjp: cotangent shape does not match the sensitivities");
  return sens.dX.transpose() * dL_dX + sens.dU.transpose() * dL_dU;
}

Vec vjp(const Trajectory& dL_dtraj, const TrajectorySensitivities& sens) {
  return vjp(dL_dtraj.stacked_x(), dL_dtraj.stacked_u(), sens);
}

}  // namespace ilqrgrad
