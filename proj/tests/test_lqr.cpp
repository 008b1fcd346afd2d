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

#include <gtest/gtest.h>

#include <numeric>

#include "ilqrgrad/lqr.hpp"
#include "test_util.hpp"

namespace ilqrgrad {
namespace {

using testing::uniform;

LqrProblem random_lqr(std::mt19937_64& rng, int T, int n, int m, double bound) {
  LqrProblem p;
  const int k = n + m;
  for (int t = 0; t < T; ++t) {
    const Mat L = uniform(rng, k, k, -1.0, 1.0);
    p.C.push_back(L * L.transpose() + 0.5 * Mat::Identity(k, k));
    p.c.push_back(uniform(rng, k, -1.0, 1.0));
    Mat D = uniform(rng, n, k, -0.5, 0.5);
    D.leftCols(n) += Mat::Identity(n, n);
    p.D.push_back(D);
    p.d.push_back(uniform(rng, n, -0.5, 0.5));
  }
  p.x_init = uniform(rng, n, -1.0, 1.0);
  p.u_lower = Vec::Constant(m, -bound);
  p.u_upper = Vec::Constant(m, bound);
  return p;
}

/// Equality-constrained QP over the stacked (tau_1..tau_T) solved through its
/// dense KKT matrix.
Trajectory kkt_solve(const LqrProblem& p) {
  const int T = p.horizon(), n = p.state_dim(), m = p.control_dim(), k = n + m;
  const int nz = T * k, nc = T * n;
  Mat H = Mat::Zero(nz, nz);
  Vec g(nz);
  Mat A = Mat::Zero(nc, nz);
  Vec b(nc);
  for (int t = 0; t < T; ++t) {
    H.block(t * k, t * k, k, k) = p.C[t];
    g.segment(t * k, k) = p.c[t];
  }
  A.block(0, 0, n, n) = Mat::Identity(n, n);
  b.head(n) = p.x_init;
  for (int t = 0; t + 1 < T; ++t) {
    A.block((t + 1) * n, (t + 1) * k, n, n) = Mat::Identity(n, n);
    A.block((t + 1) * n, t * k, n, k) = -p.D[t];
    b.segment((t + 1) * n, n) = p.d[t];
  }
  Mat KKT = Mat::Zero(nz + nc, nz + nc);
  KKT.topLeftCorner(nz, nz) = H;
  KKT.topRightCorner(nz, nc) = A.transpose();
  KKT.bottomLeftCorner(nc, nz) = A;
  Vec rhs(nz + nc);
  rhs << -g, b;
  const Vec z = KKT.fullPivLu().solve(rhs);
  Trajectory out{Mat(n, T), Mat(m, T)};
  for (int t = 0; t < T; ++t) {
    out.x.col(t) = z.segment(t * k, n);
    out.u.col(t) = z.segment(t * k + n, m);
  }
  return out;
}

Trajectory rollout(const LqrProblem& p, const Mat& u) {
  const int T = p.horizon(), n = p.state_dim(), m = p.control_dim();
  Trajectory tr{Mat(n, T), u};
  tr.x.col(0) = p.x_init;
  Vec tau(n + m);
  for (int t = 0; t + 1 < T; ++t) {
    tau << tr.x.col(t), u.col(t);
    tr.x.col(t + 1) = p.D[t] * tau + p.d[t];
  }
  return tr;
}

TEST(Lqr, UnconstrainedMatchesDenseKkt) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const int T = 1 + trial % 8, n = 1 + trial % 3, m = 1 + trial % 2;
    const LqrProblem p = random_lqr(rng, T, n, m, 1e6);
    const LqrSolution sol = solve_lqr(p);
    const Trajectory ref = kkt_solve(p);
    EXPECT_LE(relative_error(sol.tau.x, ref.x, 1.0), 1e-8);
    EXPECT_LE(relative_error(sol.tau.u, ref.u, 1.0), 1e-8);
    EXPECT_FALSE(sol.active_set()[0].any());
  }
}

TEST(Lqr, ResultIndependentOfNominalWhenUnconstrained) {
  std::mt19937_64 rng(2);
  const LqrProblem p = random_lqr(rng, 6, 3, 2, 1e6);
  const Trajectory nominal{uniform(rng, 3, 6, -2, 2), uniform(rng, 2, 6, -2, 2)};
  EXPECT_LE(relative_error(solve_lqr(p, nominal).tau.u, solve_lqr(p).tau.u, 1.0), 1e-10);
}

TEST(Lqr, BoxConstrainedClampsExactlyAndBeatsFeasibleProbes) {
  std::mt19937_64 rng(3);
  int clamped_seen = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int T = 3 + trial % 6, n = 2, m = 2;
    LqrProblem p = random_lqr(rng, T, n, m, 0.3);
    for (auto& c : p.c) c *= 4.0;
    const LqrSolution sol = solve_lqr(p, LqrOptions{}, 20);
    const double best = p.objective(sol.tau);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < m; ++i) {
        const double u = sol.tau.u(i, t);
        EXPECT_GE(u, p.u_lower[i]);
        EXPECT_LE(u, p.u_upper[i]);
        if (sol.active_set()[t][i]) {
          ++clamped_seen;
          EXPECT_TRUE(u == p.u_lower[i] || u == p.u_upper[i]);
        }
      }
    // States follow the dynamics exactly.
    EXPECT_LE(max_abs(rollout(p, sol.tau.u).x - sol.tau.x), 1e-12);
    for (int probe = 0; probe < 200; ++probe) {
      const Mat u = uniform(rng, m, T, -0.3, 0.3);
      EXPECT_GE(p.objective(rollout(p, u)), best - 1e-10);
      const Mat near = (sol.tau.u + uniform(rng, m, T, -1e-3, 1e-3))
                           .cwiseMax(-0.3)
                           .cwiseMin(0.3);
      EXPECT_GE(p.objective(rollout(p, near)), best - 1e-10);
    }
  }
  EXPECT_GT(clamped_seen, 0);
}

TEST(Lqr, IndefiniteControlHessianReportsTimeIndex) {
  std::mt19937_64 rng(4);
  LqrProblem p = random_lqr(rng, 4, 2, 1, 1e6);
  p.C[2](2, 2) = -1e8;
  try {
    solve_lqr(p);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.time_index(), 3);
  }
}

TEST(Lqr, RejectsInconsistentShapes) {
  std::mt19937_64 rng(5);
  LqrProblem p = random_lqr(rng, 3, 2, 1, 1.0);
  p.D[1] = Mat::Zero(3, 3);
  EXPECT_THROW(solve_lqr(p), ConfigError);
  p = random_lqr(rng, 3, 2, 1, 1.0);
  p.u_lower[0] = 2.0;
  EXPECT_THROW(solve_lqr(p), ConfigError);
}

TEST(BoxQp, MatchesEnumeratedActiveSets) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 3;
    const Mat L = uniform(rng, m, m, -1, 1);
    const Mat H = L * L.transpose() + 0.1 * Mat::Identity(m, m);
    const Vec g = uniform(rng, m, -3, 3);
    const Vec lo = Vec::Constant(m, -1.0), hi = Vec::Constant(m, 1.0);
    const BoxQpResult r = solve_box_qp(H, g, lo, hi, Vec::Zero(m));
    const double fr = 0.5 * r.x.dot(H * r.x) + g.dot(r.x);
    // Brute force: every face of the box.
    double best = INFINITY;
    for (int code = 0; code < 27; ++code) {
      Vec x(m);
      std::vector<int> free;
      int c = code;
      for (int i = 0; i < m; ++i, c /= 3) {
        if (c % 3 == 0) x[i] = lo[i];
        if (c % 3 == 1) x[i] = hi[i];
        if (c % 3 == 2) free.push_back(i);
      }
      std::vector<int> fixed;
      for (int i = 0; i < m; ++i)
        if (std::find(free.begin(), free.end(), i) == free.end()) fixed.push_back(i);
      if (!free.empty()) {
        const Vec xf = x(fixed);
        const Vec rhs = -(Vec(g(free)) + Mat(H(free, fixed)) * xf);
        const Mat Hff = H(free, free);
        const Vec sol = Hff.ldlt().solve(rhs);
        x(free) = sol;
      }
      if ((x.array() < lo.array() - 1e-12).any() || (x.array() > hi.array() + 1e-12).any())
        continue;
      best = std::min(best, 0.5 * x.dot(H * x) + g.dot(x));
    }
    EXPECT_NEAR(fr, best, 1e-10);
  }
}

/// Apply `delta` to one coefficient entry addressed by a flat index.
struct CoefficientRef {
  int kind;  // 0 D, 1 d, 2 C (symmetric pair), 3 c, 4 x_init
  int t, i, j;
};

std::vector<CoefficientRef> all_coefficients(const LqrProblem& p) {
  const int T = p.horizon(), n = p.state_dim(), k = n + p.control_dim();
  std::vector<CoefficientRef> refs;
  for (int t = 0; t + 1 < T; ++t) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) refs.push_back({0, t, i, j});
    for (int i = 0; i < n; ++i) refs.push_back({1, t, i, 0});
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j <= i; ++j) refs.push_back({2, t, i, j});
    for (int i = 0; i < k; ++i) refs.push_back({3, t, i, 0});
  }
  for (int i = 0; i < n; ++i) refs.push_back({4, 0, i, 0});
  return refs;
}

void perturb(LqrProblem& p, const CoefficientRef& r, double h) {
  switch (r.kind) {
    case 0: p.D[r.t](r.i, r.j) += h; break;
    case 1: p.d[r.t][r.i] += h; break;
    case 2:
      p.C[r.t](r.i, r.j) += h;
      if (r.i != r.j) p.C[r.t](r.j, r.i) += h;
      break;
    case 3: p.c[r.t][r.i] += h; break;
    default: p.x_init[r.i] += h;
  }
}

double analytic(const LqrCoefficientGrad& g, const CoefficientRef& r) {
  switch (r.kind) {
    case 0: return g.dD[r.t](r.i, r.j);
    case 1: return g.dd[r.t][r.i];
    case 2: return r.i == r.j ? g.dC[r.t](r.i, r.i) : g.dC[r.t](r.i, r.j) + g.dC[r.t](r.j, r.i);
    case 3: return g.dc[r.t][r.i];
    default: return g.dx_init[r.i];
  }
}

void check_scalar_gradient(const LqrProblem& p, int passes, std::mt19937_64& rng) {
  const int T = p.horizon(), n = p.state_dim(), m = p.control_dim();
  const LqrSolution sol = solve_lqr(p, LqrOptions{}, passes);
  const Trajectory w{uniform(rng, n, T, -1, 1), uniform(rng, m, T, -1, 1)};
  const auto loss = [&](const LqrProblem& q) {
    const Trajectory tau = solve_lqr(q, LqrOptions{}, passes).tau;
    return (w.x.array() * tau.x.array()).sum() + (w.u.array() * tau.u.array()).sum();
  };
  const LqrCoefficientGrad g = lqr_grad_scalar(p, sol, w);
  EXPECT_EQ(max_abs(g.dD[T - 1]), 0.0);
  EXPECT_EQ(max_abs(g.dd[T - 1]), 0.0);
  double worst = 0.0, scale = 0.0;
  for (const auto& r : all_coefficients(p)) {
    LqrProblem a = p, b = p;
    const double h = 1e-6;
    perturb(a, r, h);
    perturb(b, r, -h);
    const double fd = (loss(a) - loss(b)) / (2 * h);
    worst = std::max(worst, std::abs(fd - analytic(g, r)));
    scale = std::max(scale, std::abs(fd));
  }
  EXPECT_LE(worst / scale, 1e-5);
}

TEST(LqrGrad, ScalarLossMatchesCoefficientDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 6; ++trial)
    check_scalar_gradient(random_lqr(rng, 2 + trial, 2, 2, 1e6), 1, rng);
}

TEST(LqrGrad, ScalarLossWithActiveBoundsMatchesDifferences) {
  std::mt19937_64 rng(8);
  int tested = 0;
  for (int trial = 0; trial < 20 && tested < 4; ++trial) {
    LqrProblem p = random_lqr(rng, 4, 2, 2, 0.2);
    for (auto& c : p.c) c *= 3.0;
    const LqrSolution sol = solve_lqr(p, LqrOptions{}, 20);
    bool any = false;
    for (const auto& a : sol.active_set()) any = any || a.any();
    if (!any || sol.backward.degenerate) continue;
    ++tested;
    check_scalar_gradient(p, 20, rng);
  }
  EXPECT_GT(tested, 0);
}

TEST(LqrGrad, FullJacobianMatchesColumnDifferences) {
  std::mt19937_64 rng(9);
  const int T = 3, n = 2, m = 1;
  const LqrProblem p = random_lqr(rng, T, n, m, 1e6);
  const LqrSolution sol = solve_lqr(p);
  std::vector<int> idx(T * (n + m));
  std::iota(idx.begin(), idx.end(), 0);
  const auto rows = lqr_jacobian_batched(p, sol, idx);
  const auto stacked = [&](const LqrProblem& q) {
    return testing::flatten(solve_lqr(q).tau);
  };
  for (const auto& r : all_coefficients(p)) {
    LqrProblem a = p, b = p;
    perturb(a, r, 1e-6);
    perturb(b, r, -1e-6);
    const Vec col = (stacked(a) - stacked(b)) / 2e-6;
    Vec got(col.size());
    for (int k = 0; k < col.size(); ++k) got[k] = analytic(rows[k], r);
    EXPECT_LE(relative_error(got, col, 1e-6), 1e-5);
  }
}

TEST(LqrGrad, BatchedEqualsSerialBitwise) {
  std::mt19937_64 rng(10);
  const LqrProblem p = random_lqr(rng, 40, 3, 2, 0.5);
  const LqrSolution sol = solve_lqr(p);
  std::vector<int> idx(p.horizon() * 2);
  std::iota(idx.begin(), idx.end(), p.horizon() * 3);
  const auto a = lqr_jacobian_batched(p, sol, idx, 1);
  const auto b = lqr_jacobian_serial(p, sol, idx);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    for (int t = 0; t < p.horizon(); ++t) {
      EXPECT_EQ(a[k].dD[t], b[k].dD[t]);
      EXPECT_EQ(a[k].dC[t], b[k].dC[t]);
      EXPECT_EQ(a[k].dc[t], b[k].dc[t]);
      EXPECT_EQ(a[k].dd[t], b[k].dd[t]);
    }
}

TEST(LqrGrad, RejectsOutOfRangeIndex) {
  std::mt19937_64 rng(11);
  const LqrProblem p = random_lqr(rng, 3, 2, 1, 1.0);
  const LqrSolution sol = solve_lqr(p);
  const std::vector<int> bad{0, 9};
  EXPECT_THROW(lqr_jacobian_batched(p, sol, bad), ConfigError);
}

}  // namespace
}  // namespace ilqrgrad
