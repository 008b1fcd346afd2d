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

void LqrProblem::validate() const {
  const int T = horizon(), n = state_dim(), m = control_dim();
  if (T < 1) throw ConfigError("LQR: horizon must be at least 1");
  if (n < 1 || m < 1) throw ConfigError("LQR: empty state or control");
  if (u_upper.size() != m) throw ConfigError("LQR: bound dimension mismatch");
  if ((u_lower.array() > u_upper.array()).any())
    throw ConfigError("LQR: lower bound exceeds upper bound");
  if (static_cast<int>(D.size()) != T || static_cast<int>(d.size()) != T ||
      static_cast<int>(c.size()) != T)
    throw ConfigError("LQR: coefficient sequences must all have length T");
  for (int t = 0; t < T; ++t) {
    if (C[t].rows() != n + m || C[t].cols() != n + m || c[t].size() != n + m)
      throw ConfigError("LQR: cost block has wrong shape at t=" + std::to_string(t + 1));
    if (t + 1 < T && (D[t].rows() != n || D[t].cols() != n + m || d[t].size() != n))
      throw ConfigError("LQR: dynamics block has wrong shape at t=" + std::to_string(t + 1));
  }
}

double LqrProblem::objective(const Trajectory& tau) const {
  const int n = state_dim(), m = control_dim();
  double total = 0.0;
  Vec z(n + m);
  for (int t = 0; t < horizon(); ++t) {
    z << tau.x.col(t), tau.u.col(t);
    total += 0.5 * z.dot(C[t] * z) + c[t].dot(z);
  }
  return total;
}

Trajectory default_nominal(const LqrProblem& prob) {
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  Trajectory nominal{Mat::Zero(n, T), Mat::Zero(m, T)};
  nominal.x.col(0) = prob.x_init;
  const Vec u0 = Vec::Zero(m).cwiseMax(prob.u_lower).cwiseMin(prob.u_upper);
  nominal.u.colwise() = u0;
  return nominal;
}

LqrBackward lqr_backward(const LqrProblem& prob, const Trajectory& nominal,
                         const LqrOptions& opts) {
  prob.validate();
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  if (nominal.x.rows() != n || nominal.x.cols() != T || nominal.u.rows() != m ||
      nominal.u.cols() != T)
    throw ConfigError("LQR: nominal trajectory has wrong shape");

  LqrBackward bw;
  bw.K.resize(T);
  bw.k.resize(T);
  bw.P.resize(T);
  bw.p.resize(T);
  bw.Quu.resize(T);
  bw.Qux.resize(T);
  bw.clamped.resize(T);
  bw.free_index.resize(T);
  bw.free_llt.resize(T);
  bw.regularization.assign(T, 0.0);

  Mat P_next = Mat::Zero(n, n);
  Vec p_next = Vec::Zero(n);
  Vec tau_bar(n + m);

  for (int t = T - 1; t >= 0; --t) {
    tau_bar << nominal.x.col(t), nominal.u.col(t);
    Mat Q = prob.C[t];
    Vec q = prob.c[t] + prob.C[t] * tau_bar;
    if (t + 1 < T) {
      const Mat& D = prob.D[t];
      const Vec defect = D * tau_bar + prob.d[t] - nominal.x.col(t + 1);
      Q.noalias() += D.transpose() * P_next * D;
      q.noalias() += D.transpose() * (P_next * defect + p_next);
    }
    Q = 0.5 * (Q + Q.transpose());

    const Mat Qxx = Q.topLeftCorner(n, n);
    const Mat Qux = Q.bottomLeftCorner(m, n);
    const Vec qx = q.head(n);
    const Vec qu = q.tail(m);

    double reg = 0.0;
    Mat H = Q.bottomRightCorner(m, m);
    while (Eigen::LLT<Mat>(H).info() != Eigen::Success) {
      reg = (reg == 0.0) ? opts.reg_init : reg * opts.reg_factor;
      if (reg > opts.reg_max)
        throw SolverError("LQR: control Hessian not positive definite after regularization",
                          t + 1);
      H = Q.bottomRightCorner(m, m) + reg * Mat::Identity(m, m);
    }
    if (reg > 0.0) bw.regularized = true;
    bw.regularization[t] = reg;

    const Vec ubar = nominal.u.col(t);
    const BoxQpResult qp =
        solve_box_qp(H, qu, prob.u_lower - ubar, prob.u_upper - ubar, Vec::Zero(m),
                     opts.box_qp_max_iter, opts.degenerate_tol);
    if (qp.degenerate) bw.degenerate = true;

    std::vector<int> free;
    for (int i = 0; i < m; ++i)
      if (!qp.clamped[i]) free.push_back(i);

    Mat K = Mat::Zero(m, n);
    Eigen::LLT<Mat> llt;
    if (!free.empty()) {
      llt.compute(H(free, free));
      K(free, Eigen::all) = -llt.solve(Qux(free, Eigen::all));
    }
    const Vec& k = qp.x;

    Mat P = Qxx + K.transpose() * H * K + K.transpose() * Qux + Qux.transpose() * K;
    Vec p = qx + K.transpose() * (H * k + qu) + Qux.transpose() * k;
    P = 0.5 * (P + P.transpose());

    bw.K[t] = K;
    bw.k[t] = k;
    bw.P[t] = P;
    bw.p[t] = p;
    bw.Quu[t] = H;
    bw.Qux[t] = Qux;
    bw.clamped[t] = qp.clamped;
    bw.free_index[t] = std::move(free);
    bw.free_llt[t] = std::move(llt);
    P_next = std::move(P);
    p_next = std::move(p);
  }
  return bw;
}

LqrSolution lqr_forward(const LqrProblem& prob, const Trajectory& nominal,
                        LqrBackward backward) {
  const int T = prob.horizon(), n = prob.state_dim(), m = prob.control_dim();
  LqrSolution sol;
  sol.tau = Trajectory{Mat(n, T), Mat(m, T)};
  sol.delta_x.resize(n, T);
  sol.delta_u.resize(m, T);
  sol.lambda.resize(n, T);

  Vec x = prob.x_init;
  Vec tau(n + m);
  for (int t = 0; t < T; ++t) {
    const Vec dx = x - nominal.x.col(t);
    Vec u = nominal.u.col(t) + backward.K[t] * dx + backward.k[t];
    u = u.cwiseMax(prob.u_lower).cwiseMin(prob.u_upper);
    sol.tau.x.col(t) = x;
    sol.tau.u.col(t) = u;
    sol.delta_x.col(t) = dx;
    sol.delta_u.col(t) = u - nominal.u.col(t);
    sol.lambda.col(t) = backward.P[t] * dx + backward.p[t];
    if (t + 1 < T) {
      tau << x, u;
      x = prob.D[t] * tau + prob.d[t];
    }
  }
  sol.backward = std::move(backward);
  return sol;
}

LqrSolution solve_lqr(const LqrProblem& prob, const Trajectory& nominal,
                      const LqrOptions& opts, int active_set_passes) {
  LqrSolution sol = lqr_forward(prob, nominal, lqr_backward(prob, nominal, opts));
  for (int pass = 1; pass < active_set_passes; ++pass) {
    LqrBackward bw = lqr_backward(prob, sol.tau, opts);
    bool same = true;
    for (int t = 0; t < prob.horizon() && same; ++t)
      same = (bw.clamped[t] == sol.backward.clamped[t]).all();
    const Trajectory around = sol.tau;
    sol = lqr_forward(prob, around, std::move(bw));
    if (same) break;
  }
  return sol;
}

LqrSolution solve_lqr(const LqrProblem& prob, const LqrOptions& opts,
                      int active_set_passes) {
  return solve_lqr(prob, default_nominal(prob), opts, active_set_passes);
}

}  // namespace ilqrgrad
