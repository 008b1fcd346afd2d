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

#include "ilqrgrad/lqr.hpp"

namespace ilqrgrad {

namespace {

struct Adjoint {
  Trajectory dtau;
  Mat dlambda;  // n x T
};

/// Solves the LQR with the primal's quadratic terms and active set, linear
/// term (gx, gu), zero offsets and zero initial state. Its solution and
/// costates are the adjoint variables of the primal KKT system.
Adjoint solve_adjoint(const LqrProblem& prob, const LqrSolution& sol, const Mat& gx,
                      const Mat& gu) {
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  const LqrBackward& bw = sol.backward;

  std::vector<Vec> p(T), k(T);
  Vec p_next = Vec::Zero(n);
  for (int t = T - 1; t >= 0; --t) {
    Vec qx = gx.col(t);
    Vec qu = gu.col(t);
    for (int i = 0; i < m; ++i)
      if (bw.clamped[t][i]) qu[i] = 0.0;
    if (t + 1 < T) {
      const Mat& D = prob.D[t];
      qx.noalias() += D.leftCols(n).transpose() * p_next;
      qu.noalias() += D.rightCols(m).transpose() * p_next;
    }
    Vec kk = Vec::Zero(m);
    const auto& free = bw.free_index[t];
    if (!free.empty()) kk(free) = -bw.free_llt[t].solve(qu(free));
    p[t] = qx + bw.K[t].transpose() * (bw.Quu[t] * kk + qu) + bw.Qux[t].transpose() * kk;
    k[t] = std::move(kk);
    p_next = p[t];
  }

  Adjoint adj{Trajectory{Mat(n, T), Mat(m, T)}, Mat(n, T)};
  Vec dx = Vec::Zero(n);
  Vec dtau(n + m);
  for (int t = 0; t < T; ++t) {
    const Vec du = bw.K[t] * dx + k[t];
    adj.dtau.x.col(t) = dx;
    adj.dtau.u.col(t) = du;
    adj.dlambda.col(t) = bw.P[t] * dx + p[t];
    if (t + 1 < T) {
      dtau << dx, du;
      dx = prob.D[t] * dtau;
    }
  }
  return adj;
}

LqrCoefficientGrad coefficient_grad(const LqrProblem& prob, const LqrSolution& sol,
                                    const Mat& gx, const Mat& gu) {
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  const Adjoint adj = solve_adjoint(prob, sol, gx, gu);

  LqrCoefficientGrad grad;
  grad.dD.assign(T, Mat::Zero(n, n + m));
  grad.dd.assign(T, Vec::Zero(n));
  grad.dC.resize(T);
  grad.dc.resize(T);
  Vec tau(n + m), dtau(n + m);
  for (int t = 0; t < T; ++t) {
    tau << sol.tau.x.col(t), sol.tau.u.col(t);
    dtau << adj.dtau.x.col(t), adj.dtau.u.col(t);
    const Mat outer = dtau * tau.transpose();
    grad.dC[t] = 0.5 * (outer + outer.transpose());
    grad.dc[t] = dtau;
    if (t + 1 < T) {
      grad.dD[t] = sol.lambda.col(t + 1) * dtau.transpose() +
                   adj.dlambda.col(t + 1) * tau.transpose();
      grad.dd[t] = adj.dlambda.col(t + 1);
    }
  }
  grad.dx_init = adj.dlambda.col(0);
  return grad;
}

LqrCoefficientGrad unit_seed_grad(const LqrProblem& prob, const LqrSolution& sol,
                                  int index) {
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  if (index < 0 || index >= T * (n + m))
    throw ConfigError("LQR Jacobian: output index out of range");
  Mat gx = Mat::Zero(n, T);
  Mat gu = Mat::Zero(m, T);
  if (index < T * n)
    gx.reshaped()[index] = 1.0;
  else
    gu.reshaped()[index - T * n] = 1.0;
  return coefficient_grad(prob, sol, gx, gu);
}

}  // namespace

LqrCoefficientGrad lqr_grad_scalar(const LqrProblem& prob, const LqrSolution& sol,
                                   const Trajectory& dL_dtau) {
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  if (dL_dtau.x.rows() != n || dL_dtau.x.cols() != T || dL_dtau.u.rows() != m ||
      dL_dtau.u.cols() != T)
    throw ConfigError("LQR gradient: cotangent has wrong shape");
  return coefficient_grad(prob, sol, dL_dtau.x, dL_dtau.u);
}

std::vector<LqrCoefficientGrad> lqr_jacobian_batched(const LqrProblem& prob,
                                                     const LqrSolution& sol,
                                                     std::span<const int> out_indices,
                                                     int parallel_min_horizon) {
  const int count = static_cast<int>(out_indices.size());
  const int size = prob.horizon() * (prob.state_dim() + prob.control_dim());
  for (int index : out_indices)
    if (index < 0 || index >= size) throw ConfigError("LQR Jacobian: output index out of range");
  std::vector<LqrCoefficientGrad> rows(count);
  const bool parallel = prob.horizon() >= parallel_min_horizon;
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < count; ++r) rows[r] = unit_seed_grad(prob, sol, out_indices[r]);
  return rows;
}

std::vector<LqrCoefficientGrad> lqr_jacobian_serial(const LqrProblem& prob,
                                                    const LqrSolution& sol,
                                                    std::span<const int> out_indices) {
  std::vector<LqrCoefficientGrad> rows;
  rows.reserve(out_indices.size());
  for (int index : out_indices) rows.push_back(unit_seed_grad(prob, sol, index));
  return rows;
}

}  // namespace ilqrgrad
