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

#include "ilqrgrad/implicit_diff.hpp"

namespace ilqrgrad {

namespace {

std::size_t slice_doubles(const MatSlices& s) {
  std::size_t total = 0;
  for (const auto& m : s) total += static_cast<std::size_t>(m.size());
  return total;
}

}  // namespace

std::size_t StepDerivatives::stored_doubles() const {
  return slice_doubles(dD_dx) + slice_doubles(dD_du) + slice_doubles(dD_dtheta) +
         slice_doubles(dC_dx) + slice_doubles(dC_du) + slice_doubles(dC_dtheta) +
         dd_dx.size() + dd_du.size() + dd_dtheta.size() + dc_dx.size() + dc_du.size() +
         dc_dtheta.size() + A.size() + B.size() + df_dtheta.size();
}

std::vector<StepDerivatives> step_derivatives(const Problem& problem,
                                              const Trajectory& traj,
                                              const LqrExpansion& expansion,
                                              ParamBlock block) {
  const int T = problem.horizon, n = problem.state_dim(), m = problem.control_dim();
  const int k = n + m;
  const int pd = problem.dynamics->param_dim();
  const int pc = problem.cost->param_dim();
  const bool use_dyn = block != ParamBlock::kCost;
  const bool use_cost = block != ParamBlock::kDynamics;
  const int p = (use_dyn ? pd : 0) + (use_cost ? pc : 0);
  const int cost_offset = use_dyn ? pd : 0;

  std::vector<StepDerivatives> steps(T);
  Vec tau(k);
  for (int t = 0; t < T; ++t) {
    StepDerivatives& s = steps[t];
    tau << traj.x.col(t), traj.u.col(t);

    s.dD_dtheta.assign(p, Mat::Zero(n, k));
    s.dd_dx = Mat::Zero(n, n);
    s.dd_du = Mat::Zero(n, m);
    s.dd_dtheta = Mat::Zero(n, p);
    s.A = Mat::Zero(n, n);
    s.B = Mat::Zero(n, m);
    s.df_dtheta = Mat::Zero(n, p);
    if (t + 1 < T) {
      const DynamicsEval& dyn = expansion.dynamics[t];
      s.dD_dx = dyn.dD_dx;
      s.dD_du = dyn.dD_du;
      for (int j = 0; j < n; ++j) s.dd_dx.col(j) = -dyn.dD_dx[j] * tau;
      for (int j = 0; j < m; ++j) s.dd_du.col(j) = -dyn.dD_du[j] * tau;
      if (use_dyn) {
        for (int q = 0; q < pd; ++q) {
          s.dD_dtheta[q] = dyn.dD_dtheta[q];
          s.dd_dtheta.col(q) = dyn.df_dtheta.col(q) - dyn.dD_dtheta[q] * tau;
        }
        s.df_dtheta.leftCols(pd) = dyn.df_dtheta;
      }
      s.A = dyn.A;
      s.B = dyn.B;
    } else {
      s.dD_dx.assign(n, Mat::Zero(n, k));
      s.dD_du.assign(m, Mat::Zero(n, k));
    }

    const CostEval& cost = expansion.cost[t];
    s.dC_dx = cost.dC_dx;
    s.dC_du = cost.dC_du;
    s.dC_dtheta.assign(p, Mat::Zero(k, k));
    s.dc_dx.resize(k, n);
    s.dc_du.resize(k, m);
    s.dc_dtheta = Mat::Zero(k, p);
    // c here is the absolute linear term grad g - C tau; its tau-derivative
    // reduces to -(dC/dtau_j) tau.
    for (int j = 0; j < n; ++j) s.dc_dx.col(j) = -cost.dC_dx[j] * tau;
    for (int j = 0; j < m; ++j) s.dc_du.col(j) = -cost.dC_du[j] * tau;
    if (use_cost) {
      for (int q = 0; q < pc; ++q) {
        s.dC_dtheta[cost_offset + q] = cost.dC_dtheta[q];
        s.dc_dtheta.col(cost_offset + q) = cost.dc_dtheta.col(q) - cost.dC_dtheta[q] * tau;
      }
    }
  }
  return steps;
}

}  // namespace ilqrgrad
