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

std::vector<SensitivityState> forward_algorithm(const Problem& problem,
                                                const IlqrResult& result,
                                                const std::vector<StepDerivatives>& steps,
                                                const TrajectorySensitivities* solved) {
  const int T = problem.horizon, n = problem.state_dim(), m = problem.control_dim();
  if (static_cast<int>(steps.size()) != T)
    throw ConfigError("forward sweep: step derivatives do not cover the horizon");
  const int p = static_cast<int>(steps.front().dd_dtheta.cols());
  if (solved && solved->dU.cols() != p)
    throw ConfigError("forward sweep: solved sensitivities have the wrong width");
  if (!solved && static_cast<int>(result.K.size()) != T)
    throw ConfigError("forward sweep: result carries no feedback gains");

  std::vector<SensitivityState> out(T);
  Mat dx = Mat::Zero(n, p);
  for (int t = 0; t < T; ++t) {
    const StepDerivatives& s = steps[t];
    SensitivityState& st = out[t];
    st.t = t + 1;
    st.dx_dtheta = dx;
    st.du_dtheta = solved ? Mat(solved->dU.middleRows(t * m, m)) : Mat(result.K[t] * dx);
    const Mat& du = st.du_dtheta;

    st.dD_dtheta = s.dD_dtheta;
    st.dC_dtheta = s.dC_dtheta;
    for (int q = 0; q < p; ++q) {
      for (int j = 0; j < n; ++j) {
        if (dx(j, q) == 0.0) continue;
        st.dD_dtheta[q] += dx(j, q) * s.dD_dx[j];
        st.dC_dtheta[q] += dx(j, q) * s.dC_dx[j];
      }
      for (int j = 0; j < m; ++j) {
        if (du(j, q) == 0.0) continue;
        st.dD_dtheta[q] += du(j, q) * s.dD_du[j];
        st.dC_dtheta[q] += du(j, q) * s.dC_du[j];
      }
    }
    st.dd_dtheta = s.dd_dtheta + s.dd_dx * dx + s.dd_du * du;
    st.dc_dtheta = s.dc_dtheta + s.dc_dx * dx + s.dc_du * du;

    if (t + 1 < T) dx = s.A * dx + s.B * du + s.df_dtheta;
  }
  return out;
}

std::vector<SensitivityState> forward_algorithm(const Problem& problem, const Vec& x_init,
                                                const Params& params,
                                                const IlqrResult& result, ParamBlock block,
                                                const TrajectorySensitivities* solved) {
  problem.validate(params, x_init);
  const LqrExpansion expansion = expand(problem, x_init, result.traj, params);
  const std::vector<StepDerivatives> steps =
      step_derivatives(problem, result.traj, expansion, block);
  return forward_algorithm(problem, result, steps, solved);
}

}  // namespace ilqrgrad
