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

#include "ilqrgrad/models.hpp"

namespace ilqrgrad {

Vec Pendulum::default_params() const { return Vec{{1.0, 1.0, 9.81}}; }

std::vector<std::string> Pendulum::param_names() const { return {"m", "l", "g"}; }

Vec Pendulum::step(const Vec& x, const Vec& u, const Vec& theta) const {
  check_dims(x, u, theta);
  const double m = theta[0], l = theta[1], g = theta[2];
  const double angle = x[0], omega = x[1];
  const double accel = -(g / l) * std::sin(angle) + u[0] / (m * l * l);
  return Vec{{angle + dt_ * omega, omega + dt_ * accel}};
}

DynamicsEval Pendulum::linearize(const Vec& x, const Vec& u, const Vec& theta) const {
  DynamicsEval ev;
  ev.next_state = step(x, u, theta);

  const double m = theta[0], l = theta[1], g = theta[2];
  const double s = std::sin(x[0]), c = std::cos(x[0]);
  const double tau = u[0];
  const double ml2 = m * l * l;

  ev.A = Mat{{1.0, dt_}, {-dt_ * (g / l) * c, 1.0}};
  ev.B = Mat{{0.0}, {dt_ / ml2}};
  ev.df_dtheta = Mat::Zero(2, 3);
  ev.df_dtheta(1, 0) = -dt_ * tau / (m * ml2);
  ev.df_dtheta(1, 1) = dt_ * ((g / (l * l)) * s - 2.0 * tau / (ml2 * l));
  ev.df_dtheta(1, 2) = -dt_ * s / l;

  // D = [[1, dt, 0], [-dt g/l cos, 1, dt/(m l^2)]]
  const Mat zero = Mat::Zero(2, 3);
  ev.dD_dx.assign(2, zero);
  ev.dD_dx[0](1, 0) = dt_ * (g / l) * s;
  ev.dD_du.assign(1, zero);
  ev.dD_dtheta.assign(3, zero);
  ev.dD_dtheta[0](1, 2) = -dt_ / (m * ml2);
  ev.dD_dtheta[1](1, 0) = dt_ * g * c / (l * l);
  ev.dD_dtheta[1](1, 2) = -2.0 * dt_ / (ml2 * l);
  ev.dD_dtheta[2](1, 0) = -dt_ * c / l;
  return ev;
}

}  // namespace ilqrgrad
