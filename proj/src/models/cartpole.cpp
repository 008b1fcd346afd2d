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

#include <array>
#include <cmath>

#include "ilqrgrad/detail/jet.hpp"
#include "ilqrgrad/models.hpp"

namespace ilqrgrad {

namespace {

constexpr int kN = 4;
constexpr int kM = 1;
constexpr int kP = 4;
constexpr int kVars = kN + kM + kP;

using detail::Jet2;
using std::cos;
using std::sin;

/// One explicit Euler step; templated so the same code yields values and
/// exact second derivatives.
template <typename S>
std::array<S, kN> euler_step(const std::array<S, kN>& x, const S& force,
                             const std::array<S, kP>& theta, double dt) {
  const S& cart_mass = theta[0];
  const S& pole_mass = theta[1];
  const S& gravity = theta[2];
  const S& half_length = theta[3];

  const S sin_a = sin(x[2]);
  const S cos_a = cos(x[2]);
  const S total = cart_mass + pole_mass;
  const S temp = (force + pole_mass * half_length * x[3] * x[3] * sin_a) / total;
  const S angle_acc = (gravity * sin_a - cos_a * temp) /
                      (half_length * (4.0 / 3.0 - pole_mass * cos_a * cos_a / total));
  const S cart_acc = temp - pole_mass * half_length * angle_acc * cos_a / total;

  return {x[0] + dt * x[1], x[1] + dt * cart_acc, x[2] + dt * x[3],
          x[3] + dt * angle_acc};
}

}  // namespace

Vec CartPole::default_params() const { return Vec{{1.0, 0.1, 9.81, 0.5}}; }

std::vector<std::string> CartPole::param_names() const {
  return {"m_cart", "m_pole", "g", "l"};
}

Vec CartPole::step(const Vec& x, const Vec& u, const Vec& theta) const {
  check_dims(x, u, theta);
  const std::array<double, kN> xs{x[0], x[1], x[2], x[3]};
  const std::array<double, kP> ps{theta[0], theta[1], theta[2], theta[3]};
  const auto next = euler_step(xs, u[0], ps, dt_);
  return Vec{{next[0], next[1], next[2], next[3]}};
}

DynamicsEval CartPole::linearize(const Vec& x, const Vec& u, const Vec& theta) const {
  check_dims(x, u, theta);
  using J = Jet2<kVars>;
  std::array<J, kN> xs;
  std::array<J, kP> ps;
  for (int i = 0; i < kN; ++i) xs[i] = J::variable(i, x[i]);
  const J force = J::variable(kN, u[0]);
  for (int k = 0; k < kP; ++k) ps[k] = J::variable(kN + kM + k, theta[k]);

  const auto next = euler_step(xs, force, ps, dt_);

  DynamicsEval ev;
  ev.next_state.resize(kN);
  ev.A.resize(kN, kN);
  ev.B.resize(kN, kM);
  ev.df_dtheta.resize(kN, kP);
  const Mat zero = Mat::Zero(kN, kN + kM);
  ev.dD_dx.assign(kN, zero);
  ev.dD_du.assign(kM, zero);
  ev.dD_dtheta.assign(kP, zero);

  for (int i = 0; i < kN; ++i) {
    const J& fi = next[i];
    ev.next_state[i] = fi.v;
    ev.A.row(i) = fi.g.segment<kN>(0).transpose();
    ev.B.row(i) = fi.g.segment<kM>(kN).transpose();
    ev.df_dtheta.row(i) = fi.g.segment<kP>(kN + kM).transpose();
    // Row i of D is d f_i / d(x, u); its derivative in variable j is the
    // Hessian row restricted to the (x, u) columns.
    for (int j = 0; j < kN; ++j)
      ev.dD_dx[j].row(i) = fi.h.block<1, kN + kM>(j, 0);
    for (int j = 0; j < kM; ++j)
      ev.dD_du[j].row(i) = fi.h.block<1, kN + kM>(kN + j, 0);
    for (int k = 0; k < kP; ++k)
      ev.dD_dtheta[k].row(i) = fi.h.block<1, kN + kM>(kN + kM + k, 0);
  }
  return ev;
}

}  // namespace ilqrgrad
