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

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "ilqrgrad/baselines.hpp"
#include "ilqrgrad/learning.hpp"

namespace ilqrgrad::cli {

using nlohmann::json;

namespace {

struct Setup {
  ModelSpec spec;
  Problem problem;
  Params truth;
};

Setup setup(const RunConfig& cfg) {
  Setup s{make_model_spec(cfg.model_id), {}, {}};
  s.problem = Problem::from_spec(s.spec, cfg.horizon > 0 ? cfg.horizon : s.spec.default_horizon);
  s.truth = Params{s.spec.dyn_params, s.spec.cost_params};
  return s;
}

IlqrOptions ilqr_options(const RunConfig& cfg) {
  IlqrOptions o;
  o.fp_tol = cfg.fp_tol;
  o.max_iter = cfg.max_iter;
  return o;
}

std::vector<std::string> param_names(const Problem& problem, ParamBlock block) {
  std::vector<std::string> names;
  if (block != ParamBlock::kCost) names = problem.dynamics->param_names();
  if (block != ParamBlock::kDynamics) {
    const auto c = problem.cost->param_names();
    names.insert(names.end(), c.begin(), c.end());
  }
  return names;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

/// Writes the provenance header and body to the configured path or `out`.
void emit_csv(const RunConfig& cfg, std::uint64_t seed, const std::string& body,
              std::ostream& out) {
  const std::string text = output_header(cfg, seed) + body;
  if (cfg.output_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output_path);
  if (!f) throw ConfigError("cannot write '" + cfg.output_path + "'");
  f << text;
}

void emit_summary(const RunConfig& cfg, std::uint64_t seed, json summary, std::ostream& log) {
  summary["version"] = ILQRGRAD_VERSION;
  summary["config"] = to_json(cfg);
  summary["config_hash"] = config_hash(cfg);
  summary["seed"] = seed;
  if (cfg.output_path.empty()) {
    log << summary.dump(2) << "\n";
    return;
  }
  const std::string path = summary_path(cfg.output_path);
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << summary.dump(2) << "\n";
}

Vec column_error(const TrajectorySensitivities& a, const TrajectorySensitivities& b) {
  const int p = static_cast<int>(a.dX.cols());
  Vec err(p);
  for (int j = 0; j < p; ++j) {
    Vec ca(a.dX.rows() + a.dU.rows()), cb(ca.size());
    ca << a.dX.col(j), a.dU.col(j);
    cb << b.dX.col(j), b.dU.col(j);
    err[j] = relative_error(ca, cb, 1e-8);
  }
  return err;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

ExpertDataset load_or_generate(const RunConfig& cfg, const Setup& s, std::uint64_t seed) {
  if (!cfg.dataset_path.empty()) {
    ExpertDataset d = read_jsonl(cfg.dataset_path);
    if (d.model_id != s.spec.id)
      throw ConfigError("dataset model '" + d.model_id + "' does not match '" + s.spec.id + "'");
    return d;
  }
  DatasetOptions o;
  o.ilqr = ilqr_options(cfg);
  return generate_dataset(s.spec, s.problem, s.truth, records_for_train_size(cfg.train_size),
                          seed, o);
}

}  // namespace

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Setup s = setup(cfg);
  const ParamBlock block = parse_param_block(cfg.block);
  const DiffMode mode = parse_diff_mode(cfg.mode.empty() ? "full" : cfg.mode);
  const auto names = param_names(s.problem, block);

  GradOptions go;
  go.ilqr = ilqr_options(cfg);
  go.block = block;
  go.assembly.mode = mode;
  FiniteDiffOptions fo;
  fo.ilqr = go.ilqr;
  fo.h = cfg.fd_step;

  std::ostringstream body;
  body << "seed,parameter,implicit_vs_fd,implicit_vs_unrolled,status\n";
  double worst = 0.0;
  int failures = 0;
  json cases = json::array();
  for (std::uint64_t seed : cfg.seeds) {
    std::mt19937_64 rng(seed);
    const Vec x0 = sample_initial_state(s.spec, rng);
    try {
      const GradResult g = grad_trajectory(s.problem, x0, s.truth, go);
      const TrajectorySensitivities fd =
          finite_diff_sensitivities(s.problem, x0, s.truth, block, fo);
      const UnrolledResult un = unrolled_sensitivities(s.problem, x0, s.truth, block,
                                                       g.ilqr.iterations + 10, go.ilqr);
      const Vec e_fd = column_error(g.sens, fd);
      const Vec e_un = column_error(g.sens, un.sens);
      for (int j = 0; j < e_fd.size(); ++j) {
        body << seed << ',' << names[j] << ',' << num(e_fd[j]) << ',' << num(e_un[j]) << ",ok\n";
        worst = std::max(worst, e_fd[j]);
      }
      cases.push_back({{"seed", seed},
                       {"iterations", g.ilqr.iterations},
                       {"max_implicit_vs_fd", e_fd.maxCoeff()},
                       {"max_implicit_vs_unrolled", e_un.maxCoeff()},
                       {"condition_estimate", g.sens.condition_estimate},
                       {"warning", g.sens.warning}});
    } catch (const SolverError& e) {
      ++failures;
      body << seed << ",,,,solver-failure\n";
      log << "seed " << seed << ": " << e.what() << "\n";
      cases.push_back({{"seed", seed}, {"error", e.what()}});
    } catch (const NumericError& e) {
      ++failures;
      body << seed << ",,,,solver-failure\n";
      log << "seed " << seed << ": " << e.what() << "\n";
      cases.push_back({{"seed", seed}, {"error", e.what()}});
    }
  }
  emit_csv(cfg, cfg.seeds.front(), body.str(), out);
  const bool within = worst <= cfg.tolerance;
  emit_summary(cfg, cfg.seeds.front(),
               {{"max_implicit_vs_fd", worst},
                {"tolerance", cfg.tolerance},
                {"within_tolerance", within},
                {"solver_failures", failures},
                {"cases", cases}},
               log);
  if (!within) {
    log << "gradcheck: max relative error " << worst << " exceeds " << cfg.tolerance << "\n";
    return kToleranceFailure;
  }
  return failures > 0 ? kSolverFailure : kOk;
}

int cmd_benchmark(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  using clock = std::chrono::steady_clock;
  const ModelSpec spec = make_model_spec(cfg.model_id);
  const Params truth{spec.dyn_params, spec.cost_params};
  const ParamBlock block = parse_param_block(cfg.block);
  const std::uint64_t seed = cfg.seeds.front();

  std::ostringstream body;
  body << "horizon,N,implicit_backward_ms,unrolled_ms,ratio\n";
  json rows = json::array();
  const int saved_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  try {
    for (int T : cfg.horizons) {
      const Problem problem = Problem::from_spec(spec, T);
      std::mt19937_64 rng(seed);
      const Vec x0 = sample_initial_state(spec, rng);
      for (int N : cfg.iteration_counts) {
        IlqrOptions io = ilqr_options(cfg);
        io.forced_iterations = N;
        const IlqrResult res = ilqr_solve(problem, x0, truth, io);
        if (!res.converged)
          throw SolverError("benchmark: iLQR not converged after " + std::to_string(N) +
                            " forced iterations at T = " + std::to_string(T));
        std::vector<double> implicit_ms, unrolled_ms;
        for (int rep = 0; rep <= cfg.repetitions; ++rep) {
          const auto t0 = clock::now();
          implicit_backward(problem, x0, truth, res, block);
          const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
          const UnrolledResult un = unrolled_sensitivities(problem, x0, truth, block, N, io);
          if (rep == 0) continue;  // warm-up
          implicit_ms.push_back(ms);
          unrolled_ms.push_back(un.derivative_seconds * 1e3);
        }
        const double mi = median(implicit_ms), mu = median(unrolled_ms);
        body << T << ',' << N << ',' << num(mi) << ',' << num(mu) << ',' << num(mu / mi) << "\n";
        rows.push_back({{"horizon", T},
                        {"N", N},
                        {"implicit_backward_ms", mi},
                        {"unrolled_ms", mu},
                        {"ratio", mu / mi}});
        log << "T=" << T << " N=" << N << " implicit " << mi << " ms, unrolled " << mu
            << " ms\n";
      }
    }
  } catch (...) {
    omp_set_num_threads(saved_threads);
    throw;
  }
  omp_set_num_threads(saved_threads);
  emit_csv(cfg, seed, body.str(), out);
  emit_summary(cfg, seed, {{"rows", rows}}, log);
  return kOk;
}

int cmd_dataset(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Setup s = setup(cfg);
  const std::uint64_t seed = cfg.seeds.front();
  DatasetOptions o;
  o.ilqr = ilqr_options(cfg);
  const ExpertDataset d = generate_dataset(
      s.spec, s.problem, s.truth, records_for_train_size(cfg.train_size), seed, o);
  if (cfg.output_path.empty()) {
    for (const auto& rec : d.records) out << record_to_json(rec) << "\n";
  } else {
    write_jsonl(d, cfg.output_path);
  }
  log << "wrote " << d.records.size() << " records (" << d.split.train.size() << " train, "
      << d.split.validation.size() << " validation, " << d.split.test.size() << " test)\n";
  return kOk;
}

int cmd_imitate(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Setup s = setup(cfg);
  TrainConfig tc;
  tc.mode = parse_learn_mode(cfg.mode.empty() ? "dx" : cfg.mode);
  if (tc.mode == LearnMode::kSysid) throw ConfigError("use the sysid subcommand for sysid");
  tc.learning_rate = cfg.learning_rate;
  tc.lr_decay = cfg.lr_decay;
  tc.epochs = cfg.epochs;
  tc.alternation_period = cfg.alternation_period;
  tc.imitation.grad.ilqr = ilqr_options(cfg);
  const ParamBlock block = learned_block(tc.mode);
  const auto names = param_names(s.problem, block);
  const Vec truth_theta = s.truth.select(block);

  std::ostringstream body;
  body << "trial_seed,epoch,imitation_loss,validation_loss,model_loss";
  for (const auto& n : names) body << ",theta_" << n;
  body << "\n";

  json trials = json::array();
  std::vector<Vec> checkpoints;
  for (std::uint64_t seed : cfg.seeds) {
    const ExpertDataset data = load_or_generate(cfg, s, seed);
    const Params init = s.truth.with(block, cfg.init_scale * truth_theta);
    const TrainResult r = train(s.problem, data, init, s.truth, tc);
    for (const auto& h : r.history) {
      body << seed << ',' << h.epoch << ',' << num(h.train_loss) << ','
           << num(h.validation_loss) << ',' << num(h.model_loss);
      for (int i = 0; i < h.theta.size(); ++i) body << ',' << num(h.theta[i]);
      body << "\n";
    }
    checkpoints.push_back(r.best_theta);
    json t{{"seed", seed},
           {"best_epoch", r.best_epoch},
           {"best_validation_loss", r.best_validation_loss},
           {"test_loss", r.test_loss},
           {"best_theta", vec_json(r.best_theta)},
           {"model_loss_best", model_loss(r.best_theta, truth_theta)},
           {"diverged", r.diverged},
           {"stop_reason", r.stop_reason}};
    if (!r.history.empty()) {
      t["initial_loss"] = r.history.front().train_loss;
      t["final_loss"] = r.history.back().train_loss;
      t["model_loss_initial"] = r.history.front().model_loss;
    }
    trials.push_back(t);
    log << "seed " << seed << ": best epoch " << r.best_epoch << ", test loss " << r.test_loss
        << "\n";
  }
  // Physical entries that must stay nonnegative: all dynamics parameters, or
  // the cost weights.
  std::vector<int> physical;
  const int p = static_cast<int>(truth_theta.size());
  for (int i = 0; i < (tc.mode == LearnMode::kCost ? p / 2 : p); ++i) physical.push_back(i);

  emit_csv(cfg, cfg.seeds.front(), body.str(), out);
  emit_summary(cfg, cfg.seeds.front(),
               {{"mode", to_string(tc.mode)},
                {"parameters", names},
                {"theta_true", vec_json(truth_theta)},
                {"bad_value_ratio", bad_value_ratio(checkpoints, physical)},
                {"trials", trials}},
               log);
  return kOk;
}

int cmd_sysid(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  const Setup s = setup(cfg);
  const auto names = param_names(s.problem, ParamBlock::kDynamics);
  std::ostringstream body;
  body << "trial_seed,iteration,objective\n";
  json trials = json::array();
  std::vector<Vec> checkpoints;
  SysidOptions so;
  so.max_iter = cfg.max_iter;
  ImitationOptions io;
  io.grad.ilqr = ilqr_options(cfg);
  for (std::uint64_t seed : cfg.seeds) {
    const ExpertDataset data = load_or_generate(cfg, s, seed);
    const SysidResult r =
        sysid_fit(s.problem, data, data.split.train, cfg.init_scale * s.truth.dynamics, so);
    for (std::size_t i = 0; i < r.history.size(); ++i)
      body << seed << ',' << i << ',' << num(r.history[i]) << "\n";
    checkpoints.push_back(r.theta);
    const auto& eval_set = data.split.test.empty() ? data.split.train : data.split.test;
    json t{{"seed", seed},
           {"theta", vec_json(r.theta)},
           {"objective", r.objective},
           {"iterations", r.iterations},
           {"rank", r.rank},
           {"under_determined", r.under_determined},
           {"model_loss", model_loss(r.theta, s.truth.dynamics)}};
    try {
      t["imitation_loss"] = imitation_loss(s.problem, s.truth.with(ParamBlock::kDynamics, r.theta),
                                           data, eval_set, ParamBlock::kDynamics, false, io)
                                .loss;
    } catch (const SolverError& e) {
      t["imitation_error"] = e.what();
    }
    if (r.under_determined)
      log << "seed " << seed << ": transitions determine only " << r.rank << " of "
          << names.size() << " parameters\n";
    trials.push_back(t);
  }
  std::vector<int> physical(names.size());
  for (std::size_t i = 0; i < physical.size(); ++i) physical[i] = static_cast<int>(i);
  emit_csv(cfg, cfg.seeds.front(), body.str(), out);
  emit_summary(cfg, cfg.seeds.front(),
               {{"parameters", names},
                {"theta_true", vec_json(s.truth.dynamics)},
                {"bad_value_ratio", bad_value_ratio(checkpoints, physical)},
                {"trials", trials}},
               log);
  return kOk;
}

}  // namespace ilqrgrad::cli
