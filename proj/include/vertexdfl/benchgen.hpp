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

#ifndef VERTEXDFL_BENCHGEN_HPP_
#define VERTEXDFL_BENCHGEN_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vertexdfl/common.hpp"
#include "vertexdfl/ilp.hpp"
#include "vertexdfl/lp.hpp"
#include "vertexdfl/simplex.hpp"

namespace vertexdfl {

enum class BenchmarkKind { kRandomLp, kKnapsack, kShortestPath };

std::string_view to_string(BenchmarkKind kind);
BenchmarkKind benchmark_kind_from_string(std::string_view text);

// An LP plus the variables that are binary in the original problem (empty
// for pure LPs). Adjacency and training always use the LP relaxation.
struct Benchmark {
  BenchmarkKind kind = BenchmarkKind::kRandomLp;
  StandardFormLP lp;
  std::vector<int> binary_indices;

  bool is_integer() const { return !binary_indices.empty(); }
};

// Independent RNG stream for one instance id, so serial and parallel
// generation draw identical numbers.
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream);

// max c'z s.t. Az <= b, z >= 0 with A ~ U[0,1], b = A z0 (z0 ~ U[0,1]) and
// min(50, m) entries of b raised by U[0, 0.2]. Redundant rows are resampled.
StandardFormLP gen_random_lp(int n_structural, int m, std::uint64_t seed);

// Row i of the inequality system is implied by the others (and z >= 0).
bool is_redundant_row(const Matrix& A_ineq, const Vector& b_ineq, int row);

// Multi-dimensional knapsack relaxation: integer weights U{1..10}, capacity
// 10% of each row's weight sum, explicit z <= 1 rows.
Benchmark gen_knapsack(int items, int dims, std::uint64_t seed);

// Unit flow from the bottom-left to the top-right node of a k x k grid with
// right and up edges. One conservation row is dropped as redundant.
Benchmark gen_shortest_path_grid(int k = 5);

struct FeatureMap {
  Matrix B;  // 0/1 entries, cost dimension x feature dimension
  int deg = 8;
  double noise_halfwidth = 0.0;
};

FeatureMap gen_feature_map(int n_costs, int n_features, int deg, double noise_halfwidth,
                           std::uint64_t seed);

// c_j = (1 + ((Bx)_j / 5 + 3)^deg) / 3.5^deg * eps_j, eps_j ~ U[1-e, 1+e].
// rng may be null when noise_halfwidth is zero.
Vector polynomial_mapping(const FeatureMap& map, const Vector& x, std::mt19937_64* rng = nullptr);

struct FeatureTable {
  std::vector<std::string> feature_names;
  std::string target_name;
  Matrix X;  // rows x features
  Vector y;
  std::size_t dropped_rows = 0;
};

// Numeric CSV with a header row. Rows with an empty or NA cell are dropped
// and counted; any other non-numeric cell is a kParse error naming the line.
FeatureTable load_csv_features(const std::filesystem::path& path,
                               const std::vector<std::string>& feature_columns,
                               const std::string& target_column);

// Zero mean, unit variance using statistics of train_rows only.
void standardize(FeatureTable& table, std::span<const int> train_rows);

// Column names of the California housing table.
const std::vector<std::string>& housing_feature_columns();
const std::string& housing_target_column();

struct DataInstance {
  int id = 0;
  Vector x;  // features; row-major items x p for item-wise sources
  std::optional<Vector> c;  // true cost, structural length, user sense
  Vector z_star;            // LP(-relaxation) optimal vertex, full length
  Basis basis;
  double optimal_value = 0.0;  // c'z_star
  std::optional<Vector> z_integer;  // integer optimum (binary benchmarks, test split)
  double integer_optimal_value = 0.0;
};

struct Split {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;
};

struct Dataset {
  std::vector<DataInstance> instances;  // instances[i].id == i
  Split split;
  int feature_dim = 0;       // p
  int rows_per_instance = 1;  // > 1: one feature row per item, shared model
};

struct DatasetSizes {
  int train = 800;
  int val = 200;
  int test = 400;
  int total() const { return train + val + test; }
};

// Items drawn from a feature table; each instance samples its items from
// the table rows reserved for its split.
struct ItemTableSource {
  FeatureTable table;
  double value_scale = 1.0;
};

using ValueSource = std::variant<FeatureMap, ItemTableSource>;

Dataset gen_dataset(const Benchmark& benchmark, const ValueSource& source, DatasetSizes sizes,
                    std::uint64_t seed, int jobs = 1, IlpOptions ilp = {});

}  // namespace vertexdfl

#endif  // VERTEXDFL_BENCHGEN_HPP_
