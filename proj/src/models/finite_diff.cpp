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

namespace {

// Steps balance truncation against roundoff for central differences.
constexpr double kFirstStep = 6e-6;
constexpr double kSecondStep = 1e-4;

double scaled_step(double base, double v) { return base * (1.0 + std::abs(v)); }

}  // namespace

FiniteDiffDynamics::FiniteDiffDynamics(std::string id, int n, int m,
                                       Vec default_theta, StepFn step)
    : id_(std::move(id)),
      n_(n),
      m_(m),
      default_theta_(std::move(default_theta)),
      step_(std::move(step)) {
  if (n <= 0 || m <= 0) throw ConfigError(id_ + ": dimensions must be positive");
  if (!step_) throw ConfigError(id_ + ": empty step function");
}

Vec FiniteDiffDynamics::step(const Vec& x, const Vec& u, const Vec& theta) const {
  check_dims(x, u, theta);
  Vec out = step_(x, u, theta);
  if (out.size() != n_) throw ConfigError(id_ + ": step returned wrong dimension");
  return out;
}

FiniteDiffDynamics::FirstOrder FiniteDiffDynamics::first_order(
    const Vec& x, const Vec& u, const Vec& theta) const {
  const int p = param_dim();
  FirstOrder fo{Mat(n_, n_ + m_), Mat(n_, p)};
  auto column = [&](Vec& v, int i, const auto& eval) {
    const double h = scaled_step(kFirstStep, v[i]);
    const double saved = v[i];
    v[i] = saved + h;
    const Vec plus = eval();
    v[i] = saved - h;
    const Vec minus = eval();
    v[i] = saved;
    return Vec((plus - minus) / (2.0 * h));
  };
  Vec xs = x, us = u, ts = theta;
  auto eval = [&] { return step_(xs, us, ts); };
  for (int i = 0; i < n_; ++i) fo.D.col(i) = column(xs, i, eval);
  for (int i = 0; i < m_; ++i) fo.D.col(n_ + i) = column(us, i, eval);
  for (int k = 0; k < p; ++k) fo.df_dtheta.col(k) = column(ts, k, eval);
  return fo;
}

DynamicsEval FiniteDiffDynamics::linearize(const Vec& x, const Vec& u,
                                           const Vec& theta) const {
  DynamicsEval ev;
  ev.next_state = step(x, u, theta);
  const FirstOrder fo = first_order(x, u, theta);
  ev.A = fo.D.leftCols(n_);
  ev.B = fo.D.rightCols(m_);
  ev.df_dtheta = fo.df_dtheta;

  auto slice = [&](Vec& v, int i, const Vec& xs, const Vec& us, const Vec& ts) {
    const double h = scaled_step(kSecondStep, v[i]);
    const double saved = v[i];
    v[i] = saved + h;
    const Mat plus = first_order(xs, us, ts).D;
    v[i] = saved - h;
    const Mat minus = first_order(xs, us, ts).D;
    v[i] = saved;
    return Mat((plus - minus) / (2.0 * h));
  };
  Vec xs = x, us = u, ts = theta;
  for (int i = 0; i < n_; ++i) ev.dD_dx.push_back(slice(xs, i, xs, us, ts));
  for (int i = 0; i < m_; ++i) ev.dD_du.push_back(slice(us, i, xs, us, ts));
  for (int k = 0; k < param_dim(); ++k) ev.dD_dtheta.push_back(slice(ts, k, xs, us, ts));
  return ev;
}

}  // namespace ilqrgrad
