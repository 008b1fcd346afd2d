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

#include "ilqrgrad/learning.hpp"

namespace ilqrgrad {

namespace {

struct Linearized {
  Vec residual;  // stacked x_{t+1} - f(x_t, u_t, theta)
  Mat jacobian;  // d residual / d theta
};

int transition_count(const ExpertDataset& data, std::span<const int> indices) {
  int count = 0;
  for (int idx : indices) {
    if (idx < 0 || idx >= static_cast<int>(data.records.size()))
      throw ConfigError("sysid: record index out of range");
    const ExpertRecord& rec = data.records[idx];
    if (rec.X.cols() != rec.T || rec.U.cols() != rec.T)
      throw ConfigError("sysid needs expert state sequences in every record");
    count += rec.T - 1;
  }
  return count;
}

Linearized linearize_all(const Problem& problem, const ExpertDataset& data,
                         std::span<const int> indices, const Vec& theta, bool with_jacobian) {
  const int n = problem.state_dim();
  const int p = problem.dynamics->param_dim();
  const int rows = transition_count(data, indices) * n;
  Linearized out;
  out.residual.resize(rows);
  if (with_jacobian) out.jacobian.resize(rows, p);
  int r = 0;
  for (int idx : indices) {
    const ExpertRecord& rec = data.records[idx];
    for (int t = 0; t + 1 < rec.T; ++t, r += n) {
      if (with_jacobian) {
        const DynamicsEval ev = problem.dynamics->linearize(rec.X.col(t), rec.U.col(t), theta);
        out.residual.segment(r, n) = rec.X.col(t + 1) - ev.next_state;
        out.jacobian.middleRows(r, n) = -ev.df_dtheta;
      } else {
        out.residual.segment(r, n) =
            rec.X.col(t + 1) - problem.dynamics->step(rec.X.col(t), rec.U.col(t), theta);
      }
    }
  }
  return out;
}

}  // namespace

double sysid_objective(const Problem& problem, const ExpertDataset& data,
                       std::span<const int> indices, const Vec& theta) {
  return linearize_all(problem, data, indices, theta, false).residual.squaredNorm();
}

SysidResult sysid_fit(const Problem& problem, const ExpertDataset& data,
                      std::span<const int> indices, const Vec& theta_init,
                      const SysidOptions& opts) {
  const int p = problem.dynamics->param_dim();
  if (theta_init.size() != p) throw ConfigError("sysid: initial parameter length mismatch");
  if (indices.empty()) throw ConfigError("sysid: no records");

  SysidResult out;
  out.theta = theta_init;
  Linearized lin = linearize_all(problem, data, indices, out.theta, true);
  out.objective = lin.residual.squaredNorm();
  out.history.push_back(out.objective);

  Eigen::JacobiSVD<Mat> svd(lin.jacobian);
  const Vec sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  out.rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > opts.rank_tol * smax) ++out.rank;
  out.under_determined = out.rank < p;

  double damping = 1e-6;
  for (int it = 1; it <= opts.max_iter && out.objective > opts.tol; ++it) {
    out.iterations = it;
    const Mat JtJ = lin.jacobian.transpose() * lin.jacobian;
    const Vec grad = lin.jacobian.transpose() * lin.residual;
    const double scale = std::max(JtJ.diagonal().maxCoeff(), 1e-300);
    bool improved = false;
    Vec step;
    while (damping < 1e12) {
      const Mat H = JtJ + damping * scale * Mat::Identity(p, p);
      step = -H.ldlt().solve(grad);
      const Vec trial = out.theta + step;
      const double obj = sysid_objective(problem, data, indices, trial);
      if (std::isfinite(obj) && obj < out.objective) {
        out.theta = trial;
        out.objective = obj;
        damping = std::max(damping / 10.0, 1e-12);
        improved = true;
        break;
      }
      damping *= 10.0;
    }
    out.history.push_back(out.objective);
    if (!improved) break;
    if (step.norm() <= 1e-15 * (1.0 + out.theta.norm())) break;
    lin = linearize_all(problem, data, indices, out.theta, true);
  }
  return out;
}

}  // namespace ilqrgrad
