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

#include "vertexdfl/benchgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <array>
#include <memory>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "vertexdfl/ilp.hpp"
#include "vertexdfl/parallel.hpp"

namespace vertexdfl {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "nan" || cell == "NaN" || cell == "null";
}

Error with_instance(const Error& e, int id) {
  return Error(e.code(), "instance " + std::to_string(id) + ": " + e.what());
}

}  // namespace

std::string_view to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::kRandomLp: return "random_lp";
    case BenchmarkKind::kKnapsack: return "knapsack";
    case BenchmarkKind::kShortestPath: return "shortest_path";
  }
  return "unknown";
}

BenchmarkKind benchmark_kind_from_string(std::string_view text) {
  if (text == "random_lp") return BenchmarkKind::kRandomLp;
  if (text == "knapsack") return BenchmarkKind::kKnapsack;
  if (text == "shortest_path") return BenchmarkKind::kShortestPath;
  fail(ErrorCode::kConfig, "unknown benchmark kind \"" + std::string(text) + "\"");
}

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x5eedu};
  return std::mt19937_64(seq);
}

bool is_redundant_row(const Matrix& A_ineq, const Vector& b_ineq, int row) {
  const int m = static_cast<int>(A_ineq.rows());
  if (m <= 1) return false;
  Matrix others(m - 1, A_ineq.cols());
  Vector rhs(m - 1);
  for (int i = 0, k = 0; i < m; ++i) {
    if (i == row) continue;
    others.row(k) = A_ineq.row(i);
    rhs(k++) = b_ineq(i);
  }
  const StandardFormLP lp = to_standard_form(others, rhs, Sense::kMax);
  try {
    const BasicFeasibleSolution best = solve_lp(lp, A_ineq.row(row).transpose());
    return best.objective_value <= b_ineq(row) + kTol.feas;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnbounded) return false;
    throw;
  }
}

StandardFormLP gen_random_lp(int n_structural, int m, std::uint64_t seed) {
  if (n_structural <= m || m < 1) {
    fail(ErrorCode::kInvalidArgument, "random LP needs n_structural > m >= 1");
  }
  std::mt19937_64 rng = instance_rng(seed, 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> bump(0.0, 0.2);

  Matrix A(m, n_structural);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n_structural; ++j) A(i, j) = unit(rng);
  }
  Vector interior(n_structural);
  for (int j = 0; j < n_structural; ++j) interior(j) = unit(rng);
  Vector b = A * interior;
  std::vector<int> rows(m);
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);
  const int inflated = std::min(50, m);
  for (int k = 0; k < inflated; ++k) b(rows[k]) += bump(rng);

  for (int attempt = 0;; ++attempt) {
    std::vector<int> redundant;
    for (int i = 0; i < m; ++i) {
      if (is_redundant_row(A, b, i)) redundant.push_back(i);
    }
    if (redundant.empty()) break;
    if (attempt == 10) {
      fail(ErrorCode::kRankDeficient, "redundant constraints persisted after 10 resamples");
    }
    for (int i : redundant) {
      spdlog::warn("random LP row {} is redundant; resampling", i);
      for (int j = 0; j < n_structural; ++j) A(i, j) = unit(rng);
      b(i) = A.row(i).dot(interior) + bump(rng);
    }
  }
  return to_standard_form(A, b, Sense::kMax);
}

Benchmark gen_knapsack(int items, int dims, std::uint64_t seed) {
  if (items < 1 || dims < 1) fail(ErrorCode::kInvalidArgument, "knapsack needs items, dims >= 1");
  std::mt19937_64 rng = instance_rng(seed, 0);
  std::uniform_int_distribution<int> weight(1, 10);
  Matrix A = Matrix::Zero(dims + items, items);
  Vector b(dims + items);
  for (int d = 0; d < dims; ++d) {
    for (int i = 0; i < items; ++i) A(d, i) = weight(rng);
    b(d) = 0.1 * A.row(d).sum();
  }
  A.bottomRows(items).setIdentity();
  b.tail(items).setOnes();
  Benchmark bench;
  bench.kind = BenchmarkKind::kKnapsack;
  bench.lp = to_standard_form(A, b, Sense::kMax);
  bench.binary_indices.resize(items);
  std::iota(bench.binary_indices.begin(), bench.binary_indices.end(), 0);
  return bench;
}

Benchmark gen_shortest_path_grid(int k) {
  if (k < 2) fail(ErrorCode::kInvalidArgument, "grid size must be >= 2");
  const auto node = [k](int i, int j) { return i * k + j; };
  std::vector<std::pair<int, int>> edges;
  std::vector<std::string> names;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i + 1 < k) {
        edges.emplace_back(node(i, j), node(i + 1, j));
        names.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")->(" +
                        std::to_string(i + 1) + "," + std::to_string(j) + ")");
      }
      if (j + 1 < k) {
        edges.emplace_back(node(i, j), node(i, j + 1));
        names.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")->(" +
                        std::to_string(i) + "," + std::to_string(j + 1) + ")");
      }
    }
  }
  const int nodes = k * k;
  Matrix A = Matrix::Zero(nodes, edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    A(edges[e].first, e) = 1.0;    // out of the tail
    A(edges[e].second, e) = -1.0;  // into the head
  }
  Vector b = Vector::Zero(nodes);
  b(node(0, 0)) = 1.0;
  b(node(k - 1, k - 1)) = -1.0;
  Benchmark bench;
  bench.kind = BenchmarkKind::kShortestPath;
  bench.lp = make_equality_lp(A, b, static_cast<int>(edges.size()), Sense::kMin, names);
  return bench;
}

FeatureMap gen_feature_map(int n_costs, int n_features, int deg, double noise_halfwidth,
                           std::uint64_t seed) {
  std::mt19937_64 rng = instance_rng(seed, 1);
  std::bernoulli_distribution coin(0.5);
  FeatureMap map;
  map.B.resize(n_costs, n_features);
  for (int i = 0; i < n_costs; ++i) {
    for (int j = 0; j < n_features; ++j) map.B(i, j) = coin(rng) ? 1.0 : 0.0;
  }
  map.deg = deg;
  map.noise_halfwidth = noise_halfwidth;
  return map;
}

Vector polynomial_mapping(const FeatureMap& map, const Vector& x, std::mt19937_64* rng) {
  if (x.size() != map.B.cols()) fail(ErrorCode::kInvalidArgument, "feature length mismatch");
  const Vector projected = map.B * x;
  const double scale = std::pow(3.5, map.deg);
  Vector c(projected.size());
  std::uniform_real_distribution<double> noise(1.0 - map.noise_halfwidth,
                                               1.0 + map.noise_halfwidth);
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    c(j) = (1.0 + std::pow(projected(j) / 5.0 + 3.0, map.deg)) / scale;
    if (map.noise_halfwidth > 0.0) {
      if (rng == nullptr) fail(ErrorCode::kInvalidArgument, "noisy mapping needs an RNG");
      c(j) *= noise(*rng);
    }
  }
  return c;
}

FeatureTable load_csv_features(const std::filesystem::path& path,
                               const std::vector<std::string>& feature_columns,
                               const std::string& target_column) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, path.string() + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);
  std::unordered_map<std::string, int> column_of;
  for (std::size_t i = 0; i < header.size(); ++i) column_of[header[i]] = static_cast<int>(i);
  std::vector<int> wanted;
  for (const std::string& name : feature_columns) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) fail(ErrorCode::kParse, "missing column \"" + name + "\"");
    wanted.push_back(it->second);
  }
  const auto target = column_of.find(target_column);
  if (target == column_of.end()) {
    fail(ErrorCode::kParse, "missing target column \"" + target_column + "\"");
  }
  wanted.push_back(target->second);

  FeatureTable table;
  table.feature_names = feature_columns;
  table.target_name = target_column;
  std::vector<std::vector<double>> rows;
  for (int line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv_line(line);
    std::vector<double> values;
    bool missing = false;
    for (int col : wanted) {
      if (col >= static_cast<int>(cells.size()) || is_missing(cells[col])) {
        missing = true;
        break;
      }
      const std::string& cell = cells[col];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) +
                                    ": non-numeric cell \"" + cell + "\" in column \"" +
                                    header[col] + "\"");
      }
      values.push_back(v);
    }
    if (missing) {
      ++table.dropped_rows;
      continue;
    }
    rows.push_back(std::move(values));
  }
  const int p = static_cast<int>(feature_columns.size());
  table.X.resize(rows.size(), p);
  table.y.resize(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < p; ++j) table.X(r, j) = rows[r][j];
    table.y(r) = rows[r][p];
  }
  if (table.dropped_rows > 0) {
    spdlog::warn("{}: dropped {} row(s) with missing values", path.string(), table.dropped_rows);
  }
  return table;
}

void standardize(FeatureTable& table, std::span<const int> train_rows) {
  if (train_rows.empty()) fail(ErrorCode::kInvalidArgument, "standardize needs training rows");
  const Eigen::Index p = table.X.cols();
  Vector mean = Vector::Zero(p);
  for (int r : train_rows) mean += table.X.row(r).transpose();
  mean /= static_cast<double>(train_rows.size());
  Vector var = Vector::Zero(p);
  for (int r : train_rows) var += (table.X.row(r).transpose() - mean).cwiseAbs2();
  var /= static_cast<double>(train_rows.size());
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = var(j) > 0.0 ? std::sqrt(var(j)) : 1.0;
    table.X.col(j) = (table.X.col(j).array() - mean(j)) / sd;
  }
}

const std::vector<std::string>& housing_feature_columns() {
  static const std::vector<std::string> columns = {"MedInc",   "HouseAge",   "AveRooms",
                                                   "AveBedrms", "Population", "AveOccup",
                                                   "Latitude", "Longitude"};
  return columns;
}

const std::string& housing_target_column() {
  static const std::string target = "MedHouseVal";
  return target;
}

Dataset gen_dataset(const Benchmark& benchmark, const ValueSource& source, DatasetSizes sizes,
                    std::uint64_t seed, int jobs, IlpOptions ilp_options) {
  const StandardFormLP& lp = benchmark.lp;
  const int total = sizes.total();
  if (sizes.train < 1 || sizes.val < 1 || sizes.test < 1) {
    fail(ErrorCode::kInvalidArgument, "every split needs at least one instance");
  }
  Dataset data;
  data.instances.resize(total);

  // Split assignment is a seeded permutation of instance ids.
  {
    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng = instance_rng(seed, ~0ull);
    std::shuffle(order.begin(), order.end(), rng);
    data.split.train.assign(order.begin(), order.begin() + sizes.train);
    data.split.val.assign(order.begin() + sizes.train, order.begin() + sizes.train + sizes.val);
    data.split.test.assign(order.begin() + sizes.train + sizes.val, order.end());
    for (auto* part : {&data.split.train, &data.split.val, &data.split.test}) {
      std::sort(part->begin(), part->end());
    }
  }

  std::vector<int> pool_of(total, 0);
  for (int id : data.split.val) pool_of[id] = 1;
  for (int id : data.split.test) pool_of[id] = 2;

  // Item-wise sources: standardize on the training pool, then each instance
  // samples its items from its own split's pool.
  std::optional<FeatureTable> table;
  std::array<std::vector<int>, 3> pools;
  double value_scale = 1.0;
  if (const auto* items = std::get_if<ItemTableSource>(&source)) {
    table = items->table;
    value_scale = items->value_scale;
    const int rows = static_cast<int>(table->X.rows());
    std::vector<int> order(rows);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng = instance_rng(seed, ~1ull);
    std::shuffle(order.begin(), order.end(), rng);
    const int train_rows = rows * sizes.train / total;
    const int val_rows = rows * sizes.val / total;
    pools[0].assign(order.begin(), order.begin() + train_rows);
    pools[1].assign(order.begin() + train_rows, order.begin() + train_rows + val_rows);
    pools[2].assign(order.begin() + train_rows + val_rows, order.end());
    for (const auto& pool : pools) {
      if (static_cast<int>(pool.size()) < lp.n_structural) {
        fail(ErrorCode::kInvalidArgument, "feature table too small for " +
                                              std::to_string(lp.n_structural) + " items per split");
      }
    }
    standardize(*table, pools[0]);
    data.feature_dim = static_cast<int>(table->X.cols());
    data.rows_per_instance = lp.n_structural;
  } else {
    data.feature_dim = static_cast<int>(std::get<FeatureMap>(source).B.cols());
  }

  // Every instance starts from the same Phase 1 basis, so the stored optimal
  // basis does not depend on thread scheduling.
  Basis reference;
  {
    SimplexSolver solver(lp);
    reference = solver.solve_internal(Vector::Zero(lp.cols())).basis;
  }

  const int workers = resolve_jobs(jobs);
  std::vector<std::unique_ptr<SimplexSolver>> solvers(workers);
  parallel_for(total, workers, [&](int worker, int id) {
    if (!solvers[worker]) solvers[worker] = std::make_unique<SimplexSolver>(lp);
    SimplexSolver& solver = *solvers[worker];
    DataInstance& inst = data.instances[id];
    inst.id = id;
    std::mt19937_64 rng = instance_rng(seed, static_cast<std::uint64_t>(id) + 1);
    if (table) {
      const std::vector<int>& pool = pools[pool_of[id]];
      std::vector<int> picked(pool.size());
      std::iota(picked.begin(), picked.end(), 0);
      const int items = lp.n_structural;
      for (int i = 0; i < items; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(picked.size()) - 1);
        std::swap(picked[i], picked[pick(rng)]);
      }
      const int p = data.feature_dim;
      inst.x.resize(static_cast<Eigen::Index>(items) * p);
      Vector c(items);
      for (int i = 0; i < items; ++i) {
        const int row = pool[picked[i]];
        inst.x.segment(static_cast<Eigen::Index>(i) * p, p) = table->X.row(row).transpose();
        c(i) = table->y(row) * value_scale;
      }
      inst.c = std::move(c);
    } else {
      const FeatureMap& map = std::get<FeatureMap>(source);
      std::normal_distribution<double> normal(0.0, 1.0);
      inst.x.resize(map.B.cols());
      for (Eigen::Index j = 0; j < inst.x.size(); ++j) inst.x(j) = normal(rng);
      inst.c = polynomial_mapping(map, inst.x, &rng);
    }
    try {
      const BasicFeasibleSolution bfs = solver.solve(*inst.c, reference);
      inst.z_star = bfs.z;
      inst.basis = bfs.basis;
      inst.optimal_value = bfs.objective_value;
      // Integer optima are only needed where decisions are scored.
      if (benchmark.is_integer() && pool_of[id] == 2) {
        IlpResult ilp;
        try {
          ilp = solve_binary_ilp(solver, *inst.c, benchmark.binary_indices, ilp_options);
        } catch (const NodeLimitError& e) {
          if (!e.incumbent()) throw;
          spdlog::warn("instance {}: {}; keeping the incumbent", id, e.what());
          ilp = *e.incumbent();
        }
        inst.z_integer = ilp.z;
        inst.integer_optimal_value = ilp.objective_value;
      }
    } catch (const Error& e) {
      throw with_instance(e, id);
    }
  });
  return data;
}

}  // namespace vertexdfl
