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
#include <exception>
#include <fstream>
#include <random>

#include "ilqrgrad/learning.hpp"
#include "json.hpp"

namespace ilqrgrad {

namespace {

using nlohmann::json;

std::uint64_t record_seed(std::uint64_t seed, int index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Uniform in [0, 1) from the top 53 bits; stable across standard libraries.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

json matrix_rows(const Mat& m) {
  json rows = json::array();
  for (int t = 0; t < m.cols(); ++t) {
    json row = json::array();
    for (int i = 0; i < m.rows(); ++i) row.push_back(m(i, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_rows(const json& rows, int T) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != T)
    throw ConfigError("dataset record: sequence length does not match T");
  const int dim = T > 0 ? static_cast<int>(rows[0].size()) : 0;
  Mat m(dim, T);
  for (int t = 0; t < T; ++t) {
    if (static_cast<int>(rows[t].size()) != dim)
      throw ConfigError("dataset record: ragged sequence");
    for (int i = 0; i < dim; ++i) m(i, t) = rows[t][i].get<double>();
  }
  return m;
}

}  // namespace

Vec sample_initial_state(const ModelSpec& spec, std::mt19937_64& rng) {
  const int n = static_cast<int>(spec.init_low.size());
  if (spec.init_high.size() != n)
    throw ConfigError("model '" + spec.id + "' has a malformed sampling box");
  Vec x(n);
  for (int i = 0; i < n; ++i)
    x[i] = spec.init_low[i] + (spec.init_high[i] - spec.init_low[i]) * unit_uniform(rng);
  return x;
}

DatasetSplit make_split(int count) {
  if (count < 1) throw ConfigError("dataset split needs at least one record");
  const int held = static_cast<int>(std::lround(count / 5.0));
  DatasetSplit s;
  const int train = count - 2 * held;
  for (int i = 0; i < count; ++i) {
    if (i < train)
      s.train.push_back(i);
    else if (i < train + held)
      s.validation.push_back(i);
    else
      s.test.push_back(i);
  }
  return s;
}

int records_for_train_size(int train_size) {
  if (train_size < 1) throw ConfigError("train size must be positive");
  for (int count = train_size;; ++count)
    if (count - 2 * std::lround(count / 5.0) >= train_size) return count;
}

ExpertDataset generate_dataset(const ModelSpec& spec, const Problem& problem,
                               const Params& theta_true, int count, std::uint64_t seed,
                               const DatasetOptions& opts) {
  if (count < 1) throw ConfigError("dataset size must be positive");
  const int n = problem.state_dim();
  if (spec.init_low.size() != n || spec.init_high.size() != n)
    throw ConfigError("model '" + spec.id + "' has no initial-state sampling box");

  ExpertDataset data;
  data.model_id = spec.id;
  data.records.resize(count);
  std::vector<std::string> failures(count);

#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < count; ++r) {
    ExpertRecord& rec = data.records[r];
    rec.seed = record_seed(seed, r);
    rec.model_id = spec.id;
    rec.T = problem.horizon;
    std::mt19937_64 rng(rec.seed);
    bool done = false;
    std::string last;
    for (int attempt = 0; attempt < opts.max_attempts_per_record && !done; ++attempt) {
      const Vec x = sample_initial_state(spec, rng);
      try {
        IlqrResult res = ilqr_solve(problem, x, theta_true, opts.ilqr);
        if (!res.converged) {
          last = "residual " + std::to_string(res.residual) + " after " +
                 std::to_string(res.iterations) + " iterations";
          continue;
        }
        rec.x_init = x;
        rec.U = res.traj.u;
        rec.X = res.traj.x;
        done = true;
      } catch (const std::exception& e) {
        last = e.what();
      }
    }
    if (!done) failures[r] = last;
  }
  for (int r = 0; r < count; ++r)
    if (!failures[r].empty())
      throw SolverError("dataset generation: record " + std::to_string(r) + " failed " +
                        std::to_string(opts.max_attempts_per_record) +
                        " draws; last: " + failures[r]);
  data.split = make_split(count);
  return data;
}

std::string record_to_json(const ExpertRecord& rec) {
  json j;
  j["x_init"] = std::vector<double>(rec.x_init.data(), rec.x_init.data() + rec.x_init.size());
  j["U"] = matrix_rows(rec.U);
  j["X"] = matrix_rows(rec.X);
  j["T"] = rec.T;
  j["model_id"] = rec.model_id;
  j["seed"] = rec.seed;
  return j.dump();
}

ExpertRecord record_from_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("dataset record is not valid JSON: ") + e.what());
  }
  for (const char* key : {"x_init", "U", "T", "model_id"})
    if (!j.contains(key)) throw ConfigError(std::string("dataset record lacks '") + key + "'");
  ExpertRecord rec;
  const auto x = j["x_init"].get<std::vector<double>>();
  rec.x_init = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
  rec.T = j["T"].get<int>();
  rec.U = matrix_from_rows(j["U"], rec.T);
  if (j.contains("X")) rec.X = matrix_from_rows(j["X"], rec.T);
  rec.model_id = j["model_id"].get<std::string>();
  rec.seed = j.value("seed", std::uint64_t{0});
  return rec;
}

void write_jsonl(const ExpertDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset to '" + path + "'");
  for (const auto& rec : data.records) out << record_to_json(rec) << '\n';
}

ExpertDataset read_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read dataset '" + path + "'");
  ExpertDataset data;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    data.records.push_back(record_from_json(line));
    if (data.model_id.empty()) data.model_id = data.records.back().model_id;
    if (data.records.back().model_id != data.model_id)
      throw ConfigError("dataset mixes models '" + data.model_id + "' and '" +
                        data.records.back().model_id + "'");
  }
  if (data.records.empty()) throw ConfigError("dataset '" + path + "' is empty");
  data.split = make_split(static_cast<int>(data.records.size()));
  return data;
}

}  // namespace ilqrgrad
