// Copyright 2026 The vertexdfl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VERTEXDFL_EXPERIMENT_HPP_
#define VERTEXDFL_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vertexdfl/benchgen.hpp"
#include "vertexdfl/ilp.hpp"
#include "vertexdfl/io.hpp"
#include "vertexdfl/train.hpp"

namespace vertexdfl {

// Environment variable naming the default output root.
inline constexpr const char* kOutEnvVar = "VERTEXDFL_OUT";

struct BenchmarkConfig {
  BenchmarkKind kind = BenchmarkKind::kRandomLp;
  int n_structural = 150;  // random_lp
  int m = 50;              // random_lp
  int items = 300;         // knapsack
  int dims = 3;            // knapsack
  int grid = 5;            // shortest_path
  int features = 5;        // synthetic feature dimension
  int deg = 8;
  double noise = 0.0;
  std::string csv;          // knapsack item values from a feature table
  double value_scale = 1.0;
  std::optional<DatasetSizes> sizes;  // overrides the experiment sizes

  static BenchmarkConfig from_json(const Json& j);
  Json to_json() const;
  std::string tag() const;  // directory name
};

// One trainable method: a loss plus its margin.
struct Method {
  LossKind loss = LossKind::kLava;
  double epsilon = 0.1;

  static Method parse(const std::string& name);
  std::string name() const;  // lava, lava_eps0, lava_epsinf, lava_eps<x>, mse, spo+
};

struct ExperimentConfig {
  BenchmarkConfig benchmark;
  std::vector<BenchmarkConfig> benchmarks;  // reproduce; empty selects the three defaults
  DatasetSizes sizes;
  Method method;
  std::vector<std::string> methods;  // reproduce; empty selects per table
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  int jobs = 1;
  std::string out;
  IlpOptions ilp;
  AdjacencyOptions adjacency;

  // Unknown keys and invalid values raise kConfig naming the key.
  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
  void validate() const;
  // --out, then the config file, then $VERTEXDFL_OUT, then "runs".
  std::filesystem::path out_root() const;
  DatasetSizes sizes_for(const BenchmarkConfig& bench) const;
};

std::vector<BenchmarkConfig> default_benchmarks();

struct RunPaths {
  std::filesystem::path dir;
  std::filesystem::path lp() const { return dir / "lp.json"; }
  std::filesystem::path dataset() const { return dir / "dataset.jsonl"; }
  std::filesystem::path manifest() const { return dir / "manifest.json"; }
  std::filesystem::path adjacency() const { return dir / "adjacency.json"; }
  std::filesystem::path precompute() const { return dir / "precompute.json"; }
  std::filesystem::path method_dir(const std::string& method) const { return dir / method; }
};

RunPaths run_paths(const ExperimentConfig& config, const BenchmarkConfig& bench,
                   std::uint64_t seed);

// Identity of a generated dataset: benchmark parameters, sizes and seed.
std::string data_hash(const ExperimentConfig& config, const BenchmarkConfig& bench,
                      std::uint64_t seed);

Benchmark build_benchmark(const BenchmarkConfig& bench, std::uint64_t seed);

struct LoadedRun {
  Benchmark benchmark;
  Dataset data;
  std::string data_hash;
};

// Writes lp.json, dataset.jsonl and manifest.json.
LoadedRun cmd_generate(const ExperimentConfig& config, const BenchmarkConfig& bench,
                       std::uint64_t seed);
LoadedRun load_run(const RunPaths& paths);

// Fills adjacency.json for train and val instances, resuming from a
// partial file written by an earlier run on the same data.
AdjacencyStore cmd_precompute(const ExperimentConfig& config, const BenchmarkConfig& bench,
                              std::uint64_t seed);

TrainReport cmd_train(const ExperimentConfig& config, const BenchmarkConfig& bench,
                      std::uint64_t seed, const Method& method);

struct ResultsRow {
  std::string benchmark;
  std::string method;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double precompute_s = 0.0;
  double train_s = 0.0;
  std::uint64_t solver_calls = 0;
};

inline constexpr const char* kResultsHeader =
    "benchmark,method,seed,regret,precompute_s,train_s,solver_calls";
std::string to_csv_line(const ResultsRow& row);
std::vector<ResultsRow> read_results(const std::filesystem::path& path);
// Rewrites the file sorted by (benchmark, method, seed), replacing any row
// with the same key.
void upsert_results(const std::filesystem::path& path, const std::vector<ResultsRow>& rows);

ResultsRow cmd_evaluate(const ExperimentConfig& config, const BenchmarkConfig& bench,
                        std::uint64_t seed, const Method& method);

struct CellStat {
  std::string benchmark;
  std::string method;
  int runs = 0;
  double mean = 0.0;
  double standard_error = 0.0;  // sample stddev / sqrt(runs); 0 for one run
};

// Mean and standard error of a per-row value, grouped by (benchmark, method).
std::vector<CellStat> aggregate(const std::vector<ResultsRow>& rows,
                                double (*value)(const ResultsRow&));

struct ReproduceSummary {
  std::vector<ResultsRow> rows;
  std::vector<std::string> failures;  // "benchmark/method/seed: message"
  std::filesystem::path table_path;
};

// Runs every (benchmark, method, seed) cell for table 1, 2 or 3 and writes
// results.csv plus table<k>.md under the output root.
ReproduceSummary cmd_reproduce(const ExperimentConfig& config, int table);

}  // namespace vertexdfl

#endif  // VERTEXDFL_EXPERIMENT_HPP_
