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
#include <memory>
#include <string>
#include <vector>

#include "ilqrgrad/types.hpp"

namespace ilqrgrad {

/// First and second derivatives of one discrete dynamics step
/// x' = f(x, u, theta) around a point.
///
/// With D = [A, B] (n x (n+m)), the second-derivative tensors are stored as
/// slices: dD_dx[j] = dD/dx_j, dD_du[j] = dD/du_j, dD_dtheta[k] = dD/dtheta_k.
struct DynamicsEval {
  Vec next_state;
  Mat A;
  Mat B;
  Mat df_dtheta;  // n x p
  MatSlices dD_dx;
  MatSlices dD_du;
  MatSlices dD_dtheta;

  Mat D() const {
    Mat out(A.rows(), A.cols() + B.cols());
    out << A, B;
    return out;
  }
};

class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  virtual std::string id() const = 0;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual int param_dim() const = 0;
  virtual Vec default_params() const = 0;
  virtual std::vector<std::string> param_names() const;

  virtual Vec step(const Vec& x, const Vec& u, const Vec& theta) const = 0;
  virtual DynamicsEval linearize(const Vec& x, const Vec& u,
                                 const Vec& theta) const = 0;

 protected:
  /// Throws ConfigError on any dimension mismatch.
  void check_dims(const Vec& x, const Vec& u, const Vec& theta) const;
};

/// Single-link pendulum, angle measured from the hanging rest position:
///   angle' = angle + dt * omega
///   omega' = omega + dt * (-(g/l) sin(angle) + u / (m l^2))
/// Parameters (m, l, g).
class Pendulum final : public DynamicsModel {
 public:
  explicit Pendulum(double dt = 0.05) : dt_(dt) {}

  std::string id() const override { return "pendulum"; }
  int state_dim() const override { return 2; }
  int control_dim() const override { return 1; }
  int param_dim() const override { return 3; }
  Vec default_params() const override;
  std::vector<std::string> param_names() const override;

  Vec step(const Vec& x, const Vec& u, const Vec& theta) const override;
  DynamicsEval linearize(const Vec& x, const Vec& u,
                         const Vec& theta) const override;

  double dt() const { return dt_; }

 private:
  double dt_;
};

/// Cart-pole with state (position, velocity, pole angle, pole rate), angle 0
/// upright, explicit Euler. Parameters (cart mass, pole mass, gravity, pole
/// half-length).
class CartPole final : public DynamicsModel {
 public:
  explicit CartPole(double dt = 0.05) : dt_(dt) {}

  std::string id() const override { return "cartpole"; }
  int state_dim() const override { return 4; }
  int control_dim() const override { return 1; }
  int param_dim() const override { return 4; }
  Vec default_params() const override;
  std::vector<std::string> param_names() const override;

  Vec step(const Vec& x, const Vec& u, const Vec& theta) const override;
  DynamicsEval linearize(const Vec& x, const Vec& u,
                         const Vec& theta) const override;

  double dt() const { return dt_; }

 private:
  double dt_;
};

/// f(x, u, theta) = (A0 + sum_k theta_k A_k) x + B0 u.
class LinearTestDynamics final : public DynamicsModel {
 public:
  LinearTestDynamics(Mat A0, Mat B0, MatSlices A_params = {},
                     Vec default_theta = {});

  /// Damped oscillator with parameters (stiffness, damping).
  static LinearTestDynamics oscillator(double dt = 0.1);

  std::string id() const override { return "linear-test"; }
  int state_dim() const override { return static_cast<int>(A0_.rows()); }
  int control_dim() const override { return static_cast<int>(B0_.cols()); }
  int param_dim() const override { return static_cast<int>(A_params_.size()); }
  Vec default_params() const override { return default_theta_; }

  Vec step(const Vec& x, const Vec& u, const Vec& theta) const override;
  DynamicsEval linearize(const Vec& x, const Vec& u,
                         const Vec& theta) const override;

  Mat state_matrix(const Vec& theta) const;
  const Mat& control_matrix() const { return B0_; }
  const MatSlices& param_slices() const { return A_params_; }

 private:
  Mat A0_;
  Mat B0_;
  MatSlices A_params_;
  Vec default_theta_;
};

/// Wraps a user-supplied step function; all derivatives by central
/// differences (second derivatives by differencing the first).
class FiniteDiffDynamics final : public DynamicsModel {
 public:
  using StepFn = std::function<Vec(const Vec&, const Vec&, const Vec&)>;

  FiniteDiffDynamics(std::string id, int n, int m, Vec default_theta,
                     StepFn step);

  std::string id() const override { return id_; }
  int state_dim() const override { return n_; }
  int control_dim() const override { return m_; }
  int param_dim() const override { return static_cast<int>(default_theta_.size()); }
  Vec default_params() const override { return default_theta_; }

  Vec step(const Vec& x, const Vec& u, const Vec& theta) const override;
  DynamicsEval linearize(const Vec& x, const Vec& u,
                         const Vec& theta) const override;

 private:
  struct FirstOrder {
    Mat D;
    Mat df_dtheta;
  };
  FirstOrder first_order(const Vec& x, const Vec& u, const Vec& theta) const;

  std::string id_;
  int n_;
  int m_;
  Vec default_theta_;
  StepFn step_;
};

/// Quadratic expansion of the running cost g_t(x, u, theta) at a point, plus
/// the derivatives of that expansion needed by the implicit gradient.
/// `c` and `C` are the gradient and Hessian in tau = (x, u).
struct CostEval {
  double value = 0.0;
  Vec c;
  Mat C;
  MatSlices dC_dtheta;  // p_c slices of (n+m)x(n+m)
  Mat dc_dtheta;        // (n+m) x p_c
  MatSlices dC_dx;      // n slices (third derivatives)
  MatSlices dC_du;      // m slices
};

class CostModel {
 public:
  virtual ~CostModel() = default;
  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual int param_dim() const = 0;
  virtual std::vector<std::string> param_names() const;

  virtual double value(const Vec& x, const Vec& u, const Vec& theta,
                       int t) const = 0;
  /// Throws NumericError naming t when the expansion is not finite.
  virtual CostEval eval(const Vec& x, const Vec& u, const Vec& theta,
                        int t) const = 0;
};

/// Weighted squared distance to a goal point in (x, u):
///   g(tau) = 1/2 sum_i w_i (tau_i - goal_i)^2
/// theta packs (w, goal), each of length n+m.
class GoalCost final : public CostModel {
 public:
  GoalCost(int n, int m) : n_(n), m_(m) {}

  static Vec pack(const Vec& weights, const Vec& goal);

  int state_dim() const override { return n_; }
  int control_dim() const override { return m_; }
  int param_dim() const override { return 2 * (n_ + m_); }
  std::vector<std::string> param_names() const override;

  double value(const Vec& x, const Vec& u, const Vec& theta,
               int t) const override;
  CostEval eval(const Vec& x, const Vec& u, const Vec& theta,
                int t) const override;

 private:
  void check(const Vec& x, const Vec& u, const Vec& theta) const;
  int n_;
  int m_;
};

/// Everything needed to pose a benchmark problem by name.
struct ModelSpec {
  std::string id;
  std::shared_ptr<const DynamicsModel> dynamics;
  std::shared_ptr<const CostModel> cost;
  Vec dyn_params;
  Vec cost_params;
  Vec u_lower;
  Vec u_upper;
  Vec init_low;   // initial-state sampling box
  Vec init_high;
  int default_horizon = 20;
};

/// "pendulum", "cartpole" or "linear-test"; throws ConfigError otherwise.
ModelSpec make_model_spec(const std::string& id);
std::vector<std::string> model_ids();

}  // namespace ilqrgrad
