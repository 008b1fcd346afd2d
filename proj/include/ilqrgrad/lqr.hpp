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

#include <span>
#include <vector>

#include "ilqrgrad/types.hpp"

namespace ilqrgrad {

/// Time-varying, box-constrained LQR in absolute coordinates tau_t = (x_t, u_t):
///
///   min  sum_t 1/2 tau_t' C_t tau_t + c_t' tau_t
///   s.t. x_{t+1} = D_t tau_t + d_t,  x_1 = x_init,  u_lower <= u_t <= u_upper
///
/// All sequences have length T; D_T and d_T would only define x_{T+1}, which
/// is not part of the trajectory, and are ignored.
struct LqrProblem {
  std::vector<Mat> D;
  std::vector<Vec> d;
  std::vector<Mat> C;
  std::vector<Vec> c;
  Vec x_init;
  Vec u_lower;
  Vec u_upper;

  int horizon() const { return static_cast<int>(C.size()); }
  int state_dim() const { return static_cast<int>(x_init.size()); }
  int control_dim() const { return static_cast<int>(u_lower.size()); }

  /// Throws ConfigError on inconsistent shapes or inverted bounds.
  void validate() const;
  /// Objective value of a trajectory (constraints are not checked).
  double objective(const Trajectory& tau) const;
};

struct LqrOptions {
  double reg_init = 1e-6;
  double reg_factor = 10.0;
  double reg_max = 1e6;
  /// A bound is degenerate when the gradient there is below this.
  double degenerate_tol = 1e-10;
  int box_qp_max_iter = 100;
};

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Riccati backward pass with a frozen active set, expanded around a nominal
/// trajectory (the active set is the one optimal at zero state deviation).
/// Gains act on deviations: du_t = K_t dx_t + k_t. Rows of K_t belonging to
/// clamped controls are zero.
struct LqrBackward {
  std::vector<Mat> K;
  std::vector<Vec> k;
  std::vector<Mat> P;  // value Hessian at t (deviation coordinates)
  std::vector<Vec> p;  // value gradient at t
  std::vector<Mat> Quu;
  std::vector<Mat> Qux;
  std::vector<BoolMask> clamped;
  std::vector<std::vector<int>> free_index;
  std::vector<Eigen::LLT<Mat>> free_llt;  // Quu restricted to the free set
  std::vector<double> regularization;
  bool regularized = false;
  bool degenerate = false;
};

struct LqrSolution {
  Trajectory tau;  // absolute solution
  Mat delta_x;     // tau.x - nominal.x
  Mat delta_u;
  Mat lambda;      // costates lambda_t = dV_t/dx_t, n x T
  LqrBackward backward;

  const std::vector<BoolMask>& active_set() const { return backward.clamped; }
  const std::vector<Mat>& K() const { return backward.K; }
  const std::vector<Vec>& k() const { return backward.k; }
};

/// Nominal used when the caller has none: x_1 = x_init, other states zero,
/// controls zero projected onto the box.
Trajectory default_nominal(const LqrProblem& prob);

LqrBackward lqr_backward(const LqrProblem& prob, const Trajectory& nominal,
                         const LqrOptions& opts = {});

/// Rolls the linear dynamics forward under the gains. Controls are projected
/// onto the box, which only bites away from the nominal.
LqrSolution lqr_forward(const LqrProblem& prob, const Trajectory& nominal,
                        LqrBackward backward);

/// Backward + forward. With `active_set_passes > 1` the solve is repeated
/// around its own output until the active set stops changing, which yields
/// the exact optimum of the box-constrained problem.
LqrSolution solve_lqr(const LqrProblem& prob, const Trajectory& nominal,
                      const LqrOptions& opts = {}, int active_set_passes = 1);
LqrSolution solve_lqr(const LqrProblem& prob, const LqrOptions& opts = {},
                      int active_set_passes = 1);

/// Gradient of a scalar loss L(tau*) with respect to every LQR coefficient.
/// dC holds the symmetric gradient (1/2)(G + G').
struct LqrCoefficientGrad {
  std::vector<Mat> dD;
  std::vector<Vec> dd;
  std::vector<Mat> dC;
  std::vector<Vec> dc;
  Vec dx_init;
};

/// One auxiliary LQR solve reusing the stored factorizations; O(T).
/// Cotangent entries on clamped controls are ignored since those controls are
/// locally constant.
LqrCoefficientGrad lqr_grad_scalar(const LqrProblem& prob, const LqrSolution& sol,
                                   const Trajectory& dL_dtau);

/// Index into the stacked output (x_1..x_T, u_1..u_T), column-major per step.
struct OutputIndex {
  static int state(int t, int i, int n) { return t * n + i; }
  static int control(int t, int i, int n, int m, int T) { return T * n + t * m + i; }
};

/// Unit-seed ("binary loss") gradients for the selected output components.
/// Seeds are evaluated in parallel when the horizon is at least
/// `parallel_min_horizon`; results are identical either way.
std::vector<LqrCoefficientGrad> lqr_jacobian_batched(const LqrProblem& prob,
                                                     const LqrSolution& sol,
                                                     std::span<const int> out_indices,
                                                     int parallel_min_horizon = 30);

/// Serial reference for lqr_jacobian_batched.
std::vector<LqrCoefficientGrad> lqr_jacobian_serial(const LqrProblem& prob,
                                                    const LqrSolution& sol,
                                                    std::span<const int> out_indices);

/// Projected-Newton solver for min 1/2 x'Hx + g'x over lower <= x <= upper.
struct BoxQpResult {
  Vec x;
  BoolMask clamped;
  bool degenerate = false;
  int iterations = 0;
};
/// Throws SolverError when the free block of H is not positive definite.
BoxQpResult solve_box_qp(const Mat& H, const Vec& g, const Vec& lower,
                         const Vec& upper, const Vec& x0, int max_iter = 100,
                         double degenerate_tol = 1e-10);

}  // namespace ilqrgrad
