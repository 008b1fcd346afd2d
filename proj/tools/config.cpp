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

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "ilqrgrad/types.hpp"

namespace ilqrgrad::cli {

using nlohmann::json;

json to_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"model_id", c.model_id},
              {"horizon", c.horizon},
              {"fp_tol", c.fp_tol},
              {"max_iter", c.max_iter},
              {"mode", c.mode},
              {"block", c.block},
              {"seeds", c.seeds},
              {"output_path", c.output_path},
              {"iteration_counts", c.iteration_counts},
              {"horizons", c.horizons},
              {"train_size", c.train_size},
              {"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"lr_decay", c.lr_decay},
              {"init_scale", c.init_scale},
              {"alternation_period", c.alternation_period},
              {"repetitions", c.repetitions},
              {"tolerance", c.tolerance},
              {"fd_step", c.fd_step},
              {"dataset_path", c.dataset_path}};
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: '") + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig merge_config(RunConfig base, const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  const json known = to_json(base);
  for (const auto& item : j.items())
    if (!known.contains(item.key())) throw ConfigError("config: unknown key '" + item.key() + "'");
  take(j, "command", base.command);
  take(j, "model_id", base.model_id);
  take(j, "horizon", base.horizon);
  take(j, "fp_tol", base.fp_tol);
  take(j, "max_iter", base.max_iter);
  take(j, "mode", base.mode);
  take(j, "block", base.block);
  take(j, "seeds", base.seeds);
  take(j, "output_path", base.output_path);
  take(j, "iteration_counts", base.iteration_counts);
  take(j, "horizons", base.horizons);
  take(j, "train_size", base.train_size);
  take(j, "epochs", base.epochs);
  take(j, "learning_rate", base.learning_rate);
  take(j, "lr_decay", base.lr_decay);
  take(j, "init_scale", base.init_scale);
  take(j, "alternation_period", base.alternation_period);
  take(j, "repetitions", base.repetitions);
  take(j, "tolerance", base.tolerance);
  take(j, "fd_step", base.fd_step);
  take(j, "dataset_path", base.dataset_path);
  return base;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  require(c.horizon >= 0, "horizon must be positive (0 selects the model default)");
  require(c.fp_tol > 0.0, "fp_tol must be positive");
  require(c.max_iter >= 1, "max_iter must be at least 1");
  require(!c.seeds.empty(), "seeds must be nonempty");
  require(!c.iteration_counts.empty(), "iteration_counts must be nonempty");
  for (int n : c.iteration_counts) require(n >= 1, "iteration counts must be at least 1");
  require(!c.horizons.empty(), "horizons must be nonempty");
  for (int h : c.horizons) require(h >= 2, "benchmark horizons must be at least 2");
  require(c.train_size >= 1, "train_size must be positive");
  require(c.epochs >= 0, "epochs must be nonnegative");
  require(c.learning_rate >= 0.0, "learning_rate must be nonnegative");
  require(c.lr_decay > 0.0, "lr_decay must be positive");
  require(c.init_scale > 0.0, "init_scale must be positive");
  require(c.alternation_period >= 1, "alternation_period must be at least 1");
  require(c.repetitions >= 1, "repetitions must be at least 1");
  require(c.tolerance > 0.0, "tolerance must be positive");
  require(c.fd_step > 0.0, "fd_step must be positive");
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(cfg).dump())));
  return buf;
}

std::string output_header(const RunConfig& cfg, std::uint64_t seed) {
  return std::string("# ilqrgrad ") + ILQRGRAD_VERSION + "\n# config " + to_json(cfg).dump() +
         "\n# config_hash " + config_hash(cfg) + "\n# seed " + std::to_string(seed) + "\n";
}

std::string summary_path(const std::string& csv_path) {
  const auto dot = csv_path.find_last_of('.');
  const auto slash = csv_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return csv_path + ".json";
  return csv_path.substr(0, dot) + ".json";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Box-constrained iLQR with implicit trajectory gradients"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(ILQRGRAD_VERSION));

  RunConfig flags;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file; flags override its values");

  struct Bound {
    CLI::Option* opt;
    const char* key;
  };
  std::vector<Bound> bound;
  auto add = [&](CLI::App* sub, const char* flag, const char* key, auto& field,
                 const char* help) { bound.push_back({sub->add_option(flag, field, help), key}); };

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gradcheck", "Compare implicit, finite-difference and unrolled gradients"},
      {"benchmark", "Time implicit backward vs unrolled sensitivities"},
      {"dataset", "Generate an expert dataset (JSON lines)"},
      {"imitate", "Imitation learning of dynamics or cost parameters"},
      {"sysid", "System identification from expert transitions"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs.push_back(sub);
    add(sub, "--model", "model_id", flags.model_id, "pendulum | cartpole | linear-test");
    add(sub, "--horizon,-T", "horizon", flags.horizon, "horizon (0: model default)");
    add(sub, "--fp-tol", "fp_tol", flags.fp_tol, "fixed-point tolerance");
    add(sub, "--max-iter", "max_iter", flags.max_iter, "iLQR iteration cap");
    add(sub, "--seeds", "seeds", flags.seeds, "random seeds / trials");
    add(sub, "--output,-o", "output_path", flags.output_path, "CSV output path");
    if (name == "gradcheck") {
      add(sub, "--mode", "mode", flags.mode, "full | last-layer");
      add(sub, "--block", "block", flags.block, "dynamics | cost | all");
      add(sub, "--tolerance", "tolerance", flags.tolerance, "max allowed relative error");
      add(sub, "--fd-step", "fd_step", flags.fd_step, "finite-difference step (relative)");
    }
    if (name == "benchmark") {
      add(sub, "--iterations,--iteration-counts", "iteration_counts", flags.iteration_counts,
          "forced iLQR iteration counts");
      add(sub, "--horizons", "horizons", flags.horizons, "horizons to time");
      add(sub, "--repetitions", "repetitions", flags.repetitions, "timed repetitions");
    }
    if (name == "dataset" || name == "imitate" || name == "sysid")
      add(sub, "--train-size", "train_size", flags.train_size, "training records");
    if (name == "imitate" || name == "sysid") {
      add(sub, "--dataset", "dataset_path", flags.dataset_path, "existing JSONL dataset");
      add(sub, "--init-scale", "init_scale", flags.init_scale, "initial theta = scale * truth");
    }
    if (name == "imitate") {
      add(sub, "--mode", "mode", flags.mode, "dx | cost");
      add(sub, "--epochs", "epochs", flags.epochs, "training epochs");
      add(sub, "--lr", "learning_rate", flags.learning_rate, "RMSprop learning rate");
      add(sub, "--lr-decay", "lr_decay", flags.lr_decay, "per-epoch learning-rate factor");
      add(sub, "--alternation-period", "alternation_period", flags.alternation_period,
          "cost mode: epochs per weight/goal phase");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("cannot read config file '" + config_file + "'");
      json file;
      try {
        file = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
      }
      cfg = merge_config(cfg, file);
    }
    const json flag_values = to_json(flags);
    json given = json::object();
    for (const auto& b : bound)
      if (b.opt->count() > 0) given[b.key] = flag_values.at(b.key);
    cfg = merge_config(cfg, given);
    for (auto* sub : subs)
      if (sub->parsed()) cfg.command = sub->get_name();
    validate(cfg);

    if (cfg.command == "gradcheck") return cmd_gradcheck(cfg, out, err);
    if (cfg.command == "benchmark") return cmd_benchmark(cfg, out, err);
    if (cfg.command == "dataset") return cmd_dataset(cfg, out, err);
    if (cfg.command == "imitate") return cmd_imitate(cfg, out, err);
    return cmd_sysid(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const NumericError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace ilqrgrad::cli
