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

#include <cstdio>
#include <filesystem>

#include "ilqrgrad/baselines.hpp"
#include "ilqrgrad/learning.hpp"

namespace ilqrgrad {
namespace {

struct Instance {
  ModelSpec spec;
  Problem problem;
  Params truth;
};

Instance setup(const std::string& id, int T = 0) {
  Instance s{make_model_spec(id), {}, {}};
  s.problem = Problem::from_spec(s.spec, T > 0 ? T : s.spec.default_horizon);
  s.truth = Params{s.spec.dyn_params, s.spec.cost_params};
  return s;
}

TEST(Dataset, SplitSizes) {
  const DatasetSplit s = make_split(84);
  EXPECT_EQ(s.train.size(), 50u);
  EXPECT_EQ(s.validation.size(), 17u);
  EXPECT_EQ(s.test.size(), 17u);
  EXPECT_EQ(records_for_train_size(50), 82);
  const DatasetSplit smallest = make_split(82);
  EXPECT_EQ(smallest.train.size(), 50u);
  EXPECT_EQ(smallest.validation.size(), 16u);
  EXPECT_EQ(make_split(1).train.size(), 1u);
  EXPECT_THROW(make_split(0), ConfigError);
}

TEST(Dataset, DeterministicUnderSeed) {
  const Instance s = setup("pendulum");
  const auto a = generate_dataset(s.spec, s.problem, s.truth, 1, 42);
  const auto b = generate_dataset(s.spec, s.problem, s.truth, 1, 42);
  EXPECT_EQ(record_to_json(a.records[0]), record_to_json(b.records[0]));
  const auto c = generate_dataset(s.spec, s.problem, s.truth, 1, 43);
  EXPECT_NE(record_to_json(a.records[0]), record_to_json(c.records[0]));
}

TEST(Dataset, ExpertsAreFeasibleAndReproducible) {
  const Instance s = setup("cartpole");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 6, 3);
  for (const auto& rec : d.records) {
    EXPECT_TRUE((rec.U.array() >= s.spec.u_lower[0]).all());
    EXPECT_TRUE((rec.U.array() <= s.spec.u_upper[0]).all());
    EXPECT_TRUE((rec.x_init.array() >= s.spec.init_low.array()).all());
    EXPECT_TRUE((rec.x_init.array() <= s.spec.init_high.array()).all());
    const IlqrResult r = ilqr_solve(s.problem, rec.x_init, s.truth);
    EXPECT_LE(max_abs(r.traj.u - rec.U), 1e-8);
  }
}

TEST(Dataset, JsonLinesRoundTrip) {
  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 5, 9);
  const auto path = std::filesystem::temp_directory_path() / "ilqrgrad_roundtrip.jsonl";
  write_jsonl(d, path.string());
  const auto back = read_jsonl(path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(back.records.size(), d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    EXPECT_EQ(back.records[i].U, d.records[i].U);
    EXPECT_EQ(back.records[i].X, d.records[i].X);
    EXPECT_EQ(back.records[i].x_init, d.records[i].x_init);
    EXPECT_EQ(back.records[i].seed, d.records[i].seed);
  }
  EXPECT_EQ(back.model_id, "pendulum");
  EXPECT_THROW(record_from_json("{\"x_init\": [1]}"), ConfigError);
  EXPECT_THROW(record_from_json("not json"), ConfigError);
}

TEST(Imitation, ZeroAtTruthAndPositiveElsewhere) {
  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 6, 1);
  const auto at_truth = imitation_loss(s.problem, s.truth, d, d.split.train,
                                       ParamBlock::kDynamics, false);
  EXPECT_LE(at_truth.loss, 1e-12);
  Params off = s.truth;
  off.dynamics[0] *= 1.2;
  EXPECT_GT(imitation_loss(s.problem, off, d, d.split.train, ParamBlock::kDynamics, false).loss,
            0.0);
}

TEST(Imitation, GradientMatchesReconvergedDifferences) {
  for (const char* id : {"pendulum", "cartpole"}) {
    const Instance s = setup(id, 10);
    const auto d = generate_dataset(s.spec, s.problem, s.truth, 5, 2);
    for (ParamBlock block : {ParamBlock::kDynamics, ParamBlock::kCost}) {
      // Non-uniform, so scaling all weights together cannot leave the optimum fixed.
      Vec perturbed = s.truth.select(block);
      for (int j = 0; j < perturbed.size(); ++j) perturbed[j] = perturbed[j] * (1.1 + 0.05 * j) + 0.05;
      const Params theta = s.truth.with(block, perturbed);
      ImitationOptions io;
      io.grad.ilqr.fp_tol = 1e-11;
      const LossEval e = imitation_loss(s.problem, theta, d, d.split.train, block, true, io);
      const Vec th = theta.select(block);
      Vec fd(th.size());
      for (int j = 0; j < th.size(); ++j) {
        const double h = 1e-5 * std::max(1.0, std::abs(th[j]));
        Vec a = th, b = th;
        a[j] += h;
        b[j] -= h;
        fd[j] = (imitation_loss(s.problem, theta.with(block, a), d, d.split.train, block, false, io).loss -
                 imitation_loss(s.problem, theta.with(block, b), d, d.split.train, block, false, io).loss) /
                (2 * h);
      }
      EXPECT_LE(relative_error(e.grad, fd, 1e-10), 1e-3) << id;
    }
  }
}

TEST(Train, ZeroLearningRateKeepsThetaAndLossConstant) {
  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 10, 4);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 3;
  const Params init = s.truth.with(ParamBlock::kDynamics, 1.5 * s.truth.dynamics);
  const TrainResult r = train(s.problem, d, init, s.truth, cfg);
  ASSERT_EQ(r.history.size(), 4u);
  for (const auto& h : r.history) {
    EXPECT_EQ(h.theta, r.history.front().theta);
    EXPECT_EQ(h.train_loss, r.history.front().train_loss);
  }
}

TEST(Train, CostModeAlternatesWeightsAndGoal) {
  for (int epoch = 1; epoch <= 10; ++epoch) {
    const auto mask = cost_update_mask(epoch, 10, 6);
    EXPECT_EQ(mask, (std::vector<bool>{true, true, true, false, false, false}));
  }
  for (int epoch = 11; epoch <= 20; ++epoch) {
    const auto mask = cost_update_mask(epoch, 10, 6);
    EXPECT_EQ(mask, (std::vector<bool>{false, false, false, true, true, true}));
  }
  EXPECT_EQ(cost_update_mask(21, 10, 6)[0], true);

  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 10, 5);
  TrainConfig cfg;
  cfg.mode = LearnMode::kCost;
  cfg.epochs = 4;
  cfg.alternation_period = 2;
  const Params init = s.truth.with(ParamBlock::kCost, 1.2 * s.truth.cost);
  const TrainResult r = train(s.problem, d, init, s.truth, cfg);
  ASSERT_EQ(r.history.size(), 5u);
  const auto changed = [&](int e, int lo, int hi) {
    return (r.history[e].theta.segment(lo, hi - lo) -
            r.history[e - 1].theta.segment(lo, hi - lo)).cwiseAbs().maxCoeff() > 0.0;
  };
  EXPECT_TRUE(changed(1, 0, 3));
  EXPECT_FALSE(changed(1, 3, 6));
  EXPECT_FALSE(changed(3, 0, 3));
  EXPECT_TRUE(changed(3, 3, 6));
}

TEST(Train, DeterministicAndImproving) {
  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 15, 6);
  TrainConfig cfg;
  cfg.epochs = 15;
  const Params init = s.truth.with(ParamBlock::kDynamics, 1.5 * s.truth.dynamics);
  const TrainResult a = train(s.problem, d, init, s.truth, cfg);
  const TrainResult b = train(s.problem, d, init, s.truth, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].theta, b.history[i].theta);
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
  }
  EXPECT_LT(a.history.back().train_loss, a.history.front().train_loss);
  EXPECT_FALSE(a.diverged);
}

TEST(RmsProp, StepMatchesDefinition) {
  RmsProp opt{0.01, 0.5, 1e-8, Vec::Zero(2)};
  Vec theta{{1.0, 2.0}};
  opt.step(theta, Vec{{2.0, -4.0}}, {true, false});
  EXPECT_DOUBLE_EQ(opt.mean_square[0], 2.0);
  EXPECT_DOUBLE_EQ(theta[0], 1.0 - 0.01 * 2.0 / (std::sqrt(2.0) + 1e-8));
  EXPECT_EQ(theta[1], 2.0);
  EXPECT_EQ(opt.mean_square[1], 0.0);
}

TEST(Sysid, PendulumRecoversIdentifiableCombinations) {
  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 10, 7);
  const Vec init = s.truth.dynamics.cwiseProduct(Vec{{1.05, 0.97, 1.03}});
  const SysidResult r = sysid_fit(s.problem, d, d.split.train, init);
  EXPECT_TRUE(r.under_determined);
  EXPECT_EQ(r.rank, 2);
  const Vec& t = r.theta;
  const double gl = t[2] / t[1], ml2 = t[0] * t[1] * t[1];
  EXPECT_NEAR(gl / 9.81, 1.0, 1e-6);
  EXPECT_NEAR(ml2, 1.0, 1e-6);
}

TEST(Sysid, CartpoleRecoversAllParameters) {
  const Instance s = setup("cartpole");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 10, 8);
  const Vec init = s.truth.dynamics.cwiseProduct(Vec{{1.05, 0.95, 1.03, 0.98}});
  const SysidResult r = sysid_fit(s.problem, d, d.split.train, init);
  EXPECT_FALSE(r.under_determined);
  EXPECT_LE(relative_error(r.theta, s.truth.dynamics), 1e-6);
}

TEST(Sysid, TruthIsStationary) {
  const Instance s = setup("cartpole");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 5, 9);
  EXPECT_LE(sysid_objective(s.problem, d, d.split.train, s.truth.dynamics), 1e-28);
  const SysidResult r = sysid_fit(s.problem, d, d.split.train, s.truth.dynamics);
  EXPECT_EQ(r.theta, s.truth.dynamics);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Sysid, TooFewTransitionsAreFlagged) {
  const Instance s = setup("cartpole", 2);
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 1, 10);
  const std::vector<int> one{0};
  const SysidResult r = sysid_fit(s.problem, d, one, 1.1 * s.truth.dynamics);
  EXPECT_TRUE(r.under_determined);
  EXPECT_LT(r.rank, 4);
}

TEST(Sysid, ImitationLossNoWorseThanDxTraining) {
  const Instance s = setup("pendulum");
  const auto d = generate_dataset(s.spec, s.problem, s.truth, 15, 11);
  const Params init = s.truth.with(ParamBlock::kDynamics, 1.5 * s.truth.dynamics);
  TrainConfig cfg;
  cfg.epochs = 30;
  const TrainResult dx = train(s.problem, d, init, s.truth, cfg);
  const SysidResult id = sysid_fit(s.problem, d, d.split.train, init.dynamics);
  const double sysid_loss =
      imitation_loss(s.problem, s.truth.with(ParamBlock::kDynamics, id.theta), d, d.split.test,
                     ParamBlock::kDynamics, false)
          .loss;
  EXPECT_LE(sysid_loss, 10.0 * dx.test_loss);
}

TEST(Metrics, ModelLossAndBadValues) {
  const Vec truth{{1.0, 1.0, 9.81}};
  EXPECT_EQ(model_loss(truth, truth), 0.0);
  EXPECT_DOUBLE_EQ(model_loss(Vec{{2.0, 1.0, 9.81}}, truth), 1.0 / 3.0);
  std::vector<Vec> trials(5, truth);
  EXPECT_EQ(bad_value_ratio(trials, {0, 1, 2}), 0.0);
  trials[3][1] = -0.2;
  EXPECT_DOUBLE_EQ(bad_value_ratio(trials, {0, 1, 2}), 1.0 / 15.0);
  const Metrics m = compute_metrics({truth, 2.0 * truth}, {0.5, 0.1}, truth, trials, {0, 1, 2});
  EXPECT_EQ(m.model_loss[0], 0.0);
  EXPECT_GT(m.model_loss[1], 0.0);
  EXPECT_DOUBLE_EQ(m.bad_value_ratio, 1.0 / 15.0);
  EXPECT_THROW(model_loss(Vec::Zero(2), truth), ConfigError);
}

}  // namespace
}  // namespace ilqrgrad
