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

#include "ilqrgrad/lqr.hpp"

namespace ilqrgrad {

namespace {

constexpr double kArmijo = 0.1;
constexpr double kBacktrack = 0.6;
constexpr double kMinStep = 1e-22;

Vec clamp(const Vec& x, const Vec& lower, const Vec& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

BoolMask clamped_set(const Vec& x, const Vec& grad, const Vec& lower, const Vec& upper) {
  BoolMask out(x.size());
  for (int i = 0; i < x.size(); ++i)
    out[i] = (x[i] <= lower[i] && grad[i] > 0.0) || (x[i] >= upper[i] && grad[i] < 0.0);
  return out;
}

std::vector<int> free_indices(const BoolMask& clamped) {
  std::vector<int> idx;
  for (int i = 0; i < clamped.size(); ++i)
    if (!clamped[i]) idx.push_back(i);
  return idx;
}

}  // namespace

BoxQpResult solve_box_qp(const Mat& H, const Vec& g, const Vec& lower,
                         const Vec& upper, const Vec& x0, int max_iter,
                         double degenerate_tol) {
  const int m = static_cast<int>(g.size());
  auto value = [&](const Vec& v) { return 0.5 * v.dot(H * v) + g.dot(v); };

  BoxQpResult res;
  Vec x = clamp(x0, lower, upper);
  BoolMask clamped = BoolMask::Constant(m, false);

  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const Vec grad = g + H * x;
    clamped = clamped_set(x, grad, lower, upper);
    const std::vector<int> free = free_indices(clamped);
    if (free.empty()) break;

    const Mat Hff = H(free, free);
    Eigen::LLT<Mat> llt(Hff);
    if (llt.info() != Eigen::Success)
      throw SolverError("box QP: free Hessian block is not positive definite");

    // Newton target on the free set with clamped components held fixed.
    Vec fixed = x;
    for (int i : free) fixed[i] = 0.0;
    const Vec rhs = g(free) + H(free, Eigen::all) * fixed;
    const Vec target = -llt.solve(rhs);

    bool inside = true;
    for (size_t j = 0; j < free.size(); ++j) {
      const int i = free[j];
      if (target[j] < lower[i] || target[j] > upper[i]) inside = false;
    }

    if (inside) {
      Vec next = x;
      for (size_t j = 0; j < free.size(); ++j) next[free[j]] = target[j];
      const BoolMask after = clamped_set(next, g + H * next, lower, upper);
      x = next;
      if ((after == clamped).all()) {
        clamped = after;
        break;
      }
      continue;
    }

    Vec search = Vec::Zero(m);
    for (size_t j = 0; j < free.size(); ++j) search[free[j]] = target[j] - x[free[j]];
    const double slope = grad.dot(search);
    const double v0 = value(x);
    double step = 1.0;
    Vec candidate = clamp(x + search, lower, upper);
    while (value(candidate) - v0 > kArmijo * step * slope && step > kMinStep) {
      step *= kBacktrack;
      candidate = clamp(x + step * search, lower, upper);
    }
    x = candidate;
  }

  res.x = x;
  res.clamped = clamped;
  const Vec grad = g + H * x;
  const double scale = 1.0 + g.cwiseAbs().maxCoeff();
  for (int i = 0; i < m; ++i) {
    const bool at_bound = x[i] == lower[i] || x[i] == upper[i];
    if (at_bound && std::abs(grad[i]) <= degenerate_tol * scale) res.degenerate = true;
  }
  return res;
}

}  // namespace ilqrgrad
