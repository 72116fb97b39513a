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

#include "vertexdfl/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

namespace vertexdfl {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  fail(ErrorCode::kConfig, "config key \"" + key + "\": " + what);
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  if (!j.is_object()) config_error(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) config_error(prefix + key, "unknown key");
  }
}

template <typename T>
void read_value(const Json& j, const char* key, const std::string& prefix, T& out) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  const std::string name = prefix + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) config_error(name, "expected a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) config_error(name, "expected a number");
  } else {
    if (!v.is_number_integer()) config_error(name, "expected an integer");
    if (v.is_number_unsigned()) {
      out = static_cast<T>(v.get<std::uint64_t>());
      return;
    }
    if constexpr (std::is_unsigned_v<T>) {
      if (v.get<std::int64_t>() < 0) config_error(name, "must be >= 0");
    }
  }
  out = v.get<T>();
}

// Numbers, or the strings "inf" / "infinity".
double read_epsilon(const Json& v, const std::string& name) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
  config_error(name, "expected a number or \"inf\"");
}

Json epsilon_json(double eps) { return std::isinf(eps) ? Json("inf") : Json(eps); }

DatasetSizes read_sizes(const Json& j, const std::string& prefix, DatasetSizes sizes) {
  check_keys(j, {"train", "val", "test"}, prefix);
  read_value(j, "train", prefix, sizes.train);
  read_value(j, "val", prefix, sizes.val);
  read_value(j, "test", prefix, sizes.test);
  return sizes;
}

Json sizes_json(const DatasetSizes& s) {
  return Json{{"train", s.train}, {"val", s.val}, {"test", s.test}};
}

std::string format_number(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

std::string mean_se(const CellStat& s, int digits) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(digits);
  out << s.mean << " ± " << s.standard_error;
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------

BenchmarkConfig BenchmarkConfig::from_json(const Json& j) {
  const std::string p = "benchmark.";
  check_keys(j, {"kind", "n_structural", "m", "items", "dims", "grid", "features", "deg", "noise",
                 "csv", "value_scale", "sizes"},
             p);
  BenchmarkConfig c;
  if (!j.contains("kind")) config_error(p + "kind", "required");
  std::string kind;
  read_value(j, "kind", p, kind);
  c.kind = benchmark_kind_from_string(kind);
  read_value(j, "n_structural", p, c.n_structural);
  read_value(j, "m", p, c.m);
  read_value(j, "items", p, c.items);
  read_value(j, "dims", p, c.dims);
  read_value(j, "grid", p, c.grid);
  read_value(j, "features", p, c.features);
  read_value(j, "deg", p, c.deg);
  read_value(j, "noise", p, c.noise);
  read_value(j, "csv", p, c.csv);
  read_value(j, "value_scale", p, c.value_scale);
  if (j.contains("sizes")) c.sizes = read_sizes(j.at("sizes"), p + "sizes.", DatasetSizes{});
  if (c.kind == BenchmarkKind::kRandomLp && !(c.n_structural > c.m && c.m >= 1)) {
    config_error(p + "m", "random_lp needs n_structural > m >= 1");
  }
  if (c.items < 1) config_error(p + "items", "must be >= 1");
  if (c.dims < 1) config_error(p + "dims", "must be >= 1");
  if (c.grid < 2) config_error(p + "grid", "must be >= 2");
  if (c.features < 1) config_error(p + "features", "must be >= 1");
  if (c.deg < 1) config_error(p + "deg", "must be >= 1");
  if (c.noise < 0.0 || c.noise >= 1.0) config_error(p + "noise", "must be in [0, 1)");
  if (!c.csv.empty() && c.kind != BenchmarkKind::kKnapsack) {
    config_error(p + "csv", "feature tables are only used for knapsack values");
  }
  return c;
}

Json BenchmarkConfig::to_json() const {
  Json j{{"kind", std::string(to_string(kind))}};
  switch (kind) {
    case BenchmarkKind::kRandomLp:
      j["n_structural"] = n_structural;
      j["m"] = m;
      break;
    case BenchmarkKind::kKnapsack:
      j["items"] = items;
      j["dims"] = dims;
      if (!csv.empty()) {
        j["csv"] = csv;
        j["value_scale"] = value_scale;
      }
      break;
    case BenchmarkKind::kShortestPath:
      j["grid"] = grid;
      break;
  }
  if (csv.empty()) {
    j["features"] = features;
    j["deg"] = deg;
    j["noise"] = noise;
  }
  if (sizes) j["sizes"] = sizes_json(*sizes);
  return j;
}

std::string BenchmarkConfig::tag() const {
  std::string t(to_string(kind));
  const BenchmarkConfig d;
  switch (kind) {
    case BenchmarkKind::kRandomLp:
      if (n_structural != d.n_structural || m != d.m) {
        t += "_n" + std::to_string(n_structural) + "_m" + std::to_string(m);
      }
      break;
    case BenchmarkKind::kKnapsack:
      if (items != d.items || dims != d.dims) {
        t += "_" + std::to_string(dims) + "x" + std::to_string(items);
      }
      if (!csv.empty()) t += "_csv";
      break;
    case BenchmarkKind::kShortestPath:
      if (grid != d.grid) t += "_" + std::to_string(grid) + "x" + std::to_string(grid);
      break;
  }
  if (csv.empty()) {
    if (deg != d.deg) t += "_deg" + std::to_string(deg);
    if (features != d.features) t += "_p" + std::to_string(features);
    if (noise != d.noise) t += "_noise" + format_number(noise);
  }
  return t;
}

std::vector<BenchmarkConfig> default_benchmarks() {
  BenchmarkConfig lp;
  lp.kind = BenchmarkKind::kRandomLp;
  BenchmarkConfig knapsack;
  knapsack.kind = BenchmarkKind::kKnapsack;
  BenchmarkConfig path;
  path.kind = BenchmarkKind::kShortestPath;
  return {lp, knapsack, path};
}

// ---------------------------------------------------------------------------

Method Method::parse(const std::string& name) {
  Method m;
  if (name == "mse") {
    m.loss = LossKind::kMse;
  } else if (name == "spo+" || name == "spo_plus") {
    m.loss = LossKind::kSpoPlus;
  } else if (name == "lava") {
    m.loss = LossKind::kLava;
  } else if (name.rfind("lava_eps", 0) == 0) {
    m.loss = LossKind::kLava;
    const std::string value = name.substr(8);
    if (value == "inf") {
      m.epsilon = std::numeric_limits<double>::infinity();
    } else {
      try {
        std::size_t used = 0;
        m.epsilon = std::stod(value, &used);
        if (used != value.size() || m.epsilon < 0.0) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        fail(ErrorCode::kConfig, "unknown method \"" + name + "\"");
      }
    }
  } else {
    fail(ErrorCode::kConfig, "unknown method \"" + name + "\"");
  }
  return m;
}

std::string Method::name() const {
  switch (loss) {
    case LossKind::kMse: return "mse";
    case LossKind::kSpoPlus: return "spo+";
    case LossKind::kLava: break;
  }
  if (epsilon == 0.1) return "lava";
  if (std::isinf(epsilon)) return "lava_epsinf";
  return "lava_eps" + format_number(epsilon);
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  check_keys(j, {"benchmark", "benchmarks", "sizes", "method", "epsilon", "methods", "train",
                 "seeds", "seed", "jobs", "out", "ilp", "adjacency"},
             "");
  ExperimentConfig c;
  if (j.contains("benchmark")) c.benchmark = BenchmarkConfig::from_json(j.at("benchmark"));
  if (j.contains("benchmarks")) {
    if (!j.at("benchmarks").is_array()) config_error("benchmarks", "expected an array");
    for (const Json& b : j.at("benchmarks")) c.benchmarks.push_back(BenchmarkConfig::from_json(b));
  } else if (j.contains("benchmark")) {
    c.benchmarks = {c.benchmark};  // reproduce runs the one named benchmark
  }
  if (j.contains("sizes")) c.sizes = read_sizes(j.at("sizes"), "sizes.", c.sizes);
  if (j.contains("method")) {
    std::string name;
    read_value(j, "method", "", name);
    c.method = Method::parse(name);
  }
  if (j.contains("epsilon")) c.method.epsilon = read_epsilon(j.at("epsilon"), "epsilon");
  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) config_error("methods", "expected an array");
    for (const Json& m : j.at("methods")) {
      if (!m.is_string()) config_error("methods", "expected method names");
      Method::parse(m.get<std::string>());
      c.methods.push_back(m.get<std::string>());
    }
  }
  if (j.contains("train")) {
    const Json& t = j.at("train");
    const std::string p = "train.";
    check_keys(t, {"lr", "batch_size", "val_check_every", "patience_checks",
                   "improvement_threshold", "time_cap_seconds", "max_epochs"},
               p);
    read_value(t, "lr", p, c.train.lr);
    read_value(t, "batch_size", p, c.train.batch_size);
    read_value(t, "val_check_every", p, c.train.val_check_every);
    read_value(t, "patience_checks", p, c.train.patience_checks);
    read_value(t, "improvement_threshold", p, c.train.improvement_threshold);
    read_value(t, "time_cap_seconds", p, c.train.time_cap_seconds);
    read_value(t, "max_epochs", p, c.train.max_epochs);
  }
  if (j.contains("seeds")) {
    if (!j.at("seeds").is_array() || j.at("seeds").empty()) {
      config_error("seeds", "expected a non-empty array");
    }
    c.seeds.clear();
    for (const Json& s : j.at("seeds")) {
      if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
        config_error("seeds", "expected non-negative integers");
      }
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("seed")) {
    std::uint64_t seed = 0;
    read_value(j, "seed", "", seed);
    c.seeds = {seed};
  }
  read_value(j, "jobs", "", c.jobs);
  read_value(j, "out", "", c.out);
  if (j.contains("ilp")) {
    const Json& t = j.at("ilp");
    check_keys(t, {"node_limit", "relative_gap", "integrality_tol"}, "ilp.");
    read_value(t, "node_limit", "ilp.", c.ilp.node_limit);
    read_value(t, "relative_gap", "ilp.", c.ilp.relative_gap);
    read_value(t, "integrality_tol", "ilp.", c.ilp.integrality_tol);
  }
  if (j.contains("adjacency")) {
    const Json& t = j.at("adjacency");
    check_keys(t, {"max_bases"}, "adjacency.");
    read_value(t, "max_bases", "adjacency.", c.adjacency.max_bases);
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  const auto positive = [](int v, const char* key) {
    if (v < 1) config_error(key, "must be >= 1");
  };
  positive(sizes.train, "sizes.train");
  positive(sizes.val, "sizes.val");
  positive(sizes.test, "sizes.test");
  if (method.epsilon < 0.0) config_error("epsilon", "must be >= 0");
  if (jobs < 0) config_error("jobs", "must be >= 0");
  if (seeds.empty()) config_error("seeds", "must not be empty");
  if (ilp.relative_gap < 0.0) config_error("ilp.relative_gap", "must be >= 0");
  if (ilp.node_limit < 1) config_error("ilp.node_limit", "must be >= 1");
  TrainConfig t = train;
  t.epsilon = method.epsilon;
  t.validate();
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["benchmark"] = benchmark.to_json();
  // Always written: an empty list means the defaults, which a lone
  // "benchmark" key would otherwise narrow on reload.
  j["benchmarks"] = Json::array();
  for (const auto& b : benchmarks) j["benchmarks"].push_back(b.to_json());
  j["sizes"] = sizes_json(sizes);
  j["method"] = method.name();
  j["epsilon"] = epsilon_json(method.epsilon);
  if (!methods.empty()) j["methods"] = methods;
  j["train"] = Json{{"lr", train.lr},
                    {"batch_size", train.batch_size},
                    {"val_check_every", train.val_check_every},
                    {"patience_checks", train.patience_checks},
                    {"improvement_threshold", train.improvement_threshold},
                    {"time_cap_seconds", train.time_cap_seconds},
                    {"max_epochs", train.max_epochs}};
  j["seeds"] = seeds;
  j["jobs"] = jobs;
  if (!out.empty()) j["out"] = out;
  j["ilp"] = Json{{"node_limit", ilp.node_limit},
                  {"relative_gap", ilp.relative_gap},
                  {"integrality_tol", ilp.integrality_tol}};
  j["adjacency"] = Json{{"max_bases", adjacency.max_bases}};
  return j;
}

std::filesystem::path ExperimentConfig::out_root() const {
  if (!out.empty()) return out;
  if (const char* env = std::getenv(kOutEnvVar); env != nullptr && *env != '\0') return env;
  return "runs";
}

DatasetSizes ExperimentConfig::sizes_for(const BenchmarkConfig& bench) const {
  return bench.sizes ? *bench.sizes : sizes;
}

RunPaths run_paths(const ExperimentConfig& config, const BenchmarkConfig& bench,
                   std::uint64_t seed) {
  return {config.out_root() / bench.tag() / ("seed" + std::to_string(seed))};
}

std::string data_hash(const ExperimentConfig& config, const BenchmarkConfig& bench,
                      std::uint64_t seed) {
  Json identity{{"format", 1},
                {"benchmark", bench.to_json()},
                {"sizes", sizes_json(config.sizes_for(bench))},
                {"seed", seed}};
  identity["benchmark"].erase("sizes");
  if (!bench.csv.empty()) identity["csv_hash"] = fnv1a_hex(read_file(bench.csv));
  return fnv1a_hex(identity.dump());
}

Benchmark build_benchmark(const BenchmarkConfig& bench, std::uint64_t seed) {
  switch (bench.kind) {
    case BenchmarkKind::kRandomLp: {
      Benchmark b;
      b.kind = BenchmarkKind::kRandomLp;
      b.lp = gen_random_lp(bench.n_structural, bench.m, seed);
      return b;
    }
    case BenchmarkKind::kKnapsack:
      return gen_knapsack(bench.items, bench.dims, seed);
    case BenchmarkKind::kShortestPath:
      return gen_shortest_path_grid(bench.grid);
  }
  fail(ErrorCode::kConfig, "unknown benchmark kind");
}

// ---------------------------------------------------------------------------

LoadedRun cmd_generate(const ExperimentConfig& config, const BenchmarkConfig& bench,
                       std::uint64_t seed) {
  const RunPaths paths = run_paths(config, bench, seed);
  const auto start = Clock::now();
  LoadedRun run;
  run.benchmark = build_benchmark(bench, seed);
  run.data_hash = data_hash(config, bench, seed);
  const DatasetSizes sizes = config.sizes_for(bench);
  if (!bench.csv.empty()) {
    ItemTableSource source{load_csv_features(bench.csv, housing_feature_columns(),
                                             housing_target_column()),
                           bench.value_scale};
    run.data = gen_dataset(run.benchmark, source, sizes, seed, config.jobs, config.ilp);
  } else {
    const FeatureMap map = gen_feature_map(run.benchmark.lp.n_structural, bench.features,
                                           bench.deg, bench.noise, seed);
    run.data = gen_dataset(run.benchmark, map, sizes, seed, config.jobs, config.ilp);
  }
  const double seconds = seconds_since(start);

  const std::string lp_text = lp_to_json(run.benchmark.lp).dump();
  const std::string data_text = dataset_to_jsonl(run.data);
  Json manifest{{"data_hash", run.data_hash},
                {"seed", seed},
                {"benchmark", bench.to_json()},
                {"sizes", sizes_json(sizes)},
                {"split", Json{{"train", run.data.split.train},
                               {"val", run.data.split.val},
                               {"test", run.data.split.test}}},
                {"feature_dim", run.data.feature_dim},
                {"rows_per_instance", run.data.rows_per_instance},
                {"binary_indices", run.benchmark.binary_indices},
                {"files", Json{{"lp.json", fnv1a_hex(lp_text)},
                               {"dataset.jsonl", fnv1a_hex(data_text)}}}};
  write_file_atomic(paths.lp(), lp_text);
  write_file_atomic(paths.dataset(), data_text);
  write_file_atomic(paths.manifest(), manifest.dump(2));
  spdlog::info("generated {} ({} instances) in {:.2f}s", paths.dir.string(),
               run.data.instances.size(), seconds);
  return run;
}

LoadedRun load_run(const RunPaths& paths) {
  if (!std::filesystem::exists(paths.manifest())) {
    fail(ErrorCode::kIo, "no dataset at " + paths.dir.string() + "; run generate first");
  }
  const Json manifest = read_json(paths.manifest());
  const std::string lp_text = read_file(paths.lp());
  const std::string data_text = read_file(paths.dataset());
  const Json& files = manifest.at("files");
  if (files.at("lp.json") != fnv1a_hex(lp_text) ||
      files.at("dataset.jsonl") != fnv1a_hex(data_text)) {
    fail(ErrorCode::kIo, paths.dir.string() + ": files do not match the manifest hashes");
  }
  LoadedRun run;
  run.data_hash = manifest.at("data_hash").get<std::string>();
  const BenchmarkConfig bench = BenchmarkConfig::from_json(manifest.at("benchmark"));
  run.benchmark.kind = bench.kind;
  run.benchmark.lp = lp_from_json(Json::parse(lp_text));
  run.benchmark.binary_indices = manifest.at("binary_indices").get<std::vector<int>>();
  run.data.instances = instances_from_jsonl(data_text, run.benchmark.lp);
  const Json& split = manifest.at("split");
  run.data.split.train = split.at("train").get<std::vector<int>>();
  run.data.split.val = split.at("val").get<std::vector<int>>();
  run.data.split.test = split.at("test").get<std::vector<int>>();
  run.data.feature_dim = manifest.at("feature_dim").get<int>();
  run.data.rows_per_instance = manifest.at("rows_per_instance").get<int>();
  return run;
}

namespace {

// Returns the stored adjacency for this data, or nullopt when absent or
// computed for different data.
std::optional<AdjacencyStore> load_adjacency(const RunPaths& paths, const std::string& hash,
                                             bool* complete) {
  if (!std::filesystem::exists(paths.precompute()) || !std::filesystem::exists(paths.adjacency())) {
    return std::nullopt;
  }
  const Json meta = read_json(paths.precompute());
  if (meta.value("data_hash", "") != hash) return std::nullopt;
  AdjacencyStore store = read_adjacency_file(paths.adjacency());
  store.precompute_seconds = meta.value("precompute_seconds", 0.0);
  if (complete != nullptr) *complete = meta.value("complete", false);
  return store;
}

void save_adjacency(const RunPaths& paths, const std::string& hash, const AdjacencyStore& store,
                    bool complete) {
  Json meta{{"data_hash", hash},
            {"precompute_seconds", store.precompute_seconds},
            {"instances", store.entries.size()},
            {"complete", complete}};
  if (!store.entries.empty()) {
    std::uint64_t visited_max = 0;
    double visited_sum = 0.0;
    double adjacent_sum = 0.0;
    int sigma_min = std::numeric_limits<int>::max();
    int sigma_max = 0;
    for (const auto& [id, set] : store.entries) {
      visited_max = std::max(visited_max, set.bases_visited);
      visited_sum += static_cast<double>(set.bases_visited);
      adjacent_sum += static_cast<double>(set.adjacent.rows());
      sigma_min = std::min(sigma_min, set.sigma);
      sigma_max = std::max(sigma_max, set.sigma);
    }
    const double count = static_cast<double>(store.entries.size());
    meta["bases_visited_mean"] = visited_sum / count;
    meta["bases_visited_max"] = visited_max;
    meta["adjacent_mean"] = adjacent_sum / count;
    meta["sigma_min"] = sigma_min;
    meta["sigma_max"] = sigma_max;
  }
  write_adjacency_file(paths.adjacency(), store);
  write_file_atomic(paths.precompute(), meta.dump(2));
}

}  // namespace

AdjacencyStore cmd_precompute(const ExperimentConfig& config, const BenchmarkConfig& bench,
                              std::uint64_t seed) {
  const RunPaths paths = run_paths(config, bench, seed);
  const LoadedRun run = load_run(paths);
  bool complete = false;
  AdjacencyStore store = load_adjacency(paths, run.data_hash, &complete).value_or(AdjacencyStore{});
  std::vector<int> todo;
  for (const auto* part : {&run.data.split.train, &run.data.split.val}) {
    for (int id : *part) {
      if (!store.contains(id)) todo.push_back(id);
    }
  }
  if (todo.empty() && complete) {
    spdlog::info("adjacency for {} is complete; nothing to do", paths.dir.string());
    return store;
  }
  if (!store.entries.empty()) {
    spdlog::info("resuming adjacency for {}: {} done, {} left", paths.dir.string(),
                 store.entries.size(), todo.size());
  }
  // Work in chunks and save now and then so an interrupted run resumes.
  const std::size_t chunk = 64;
  auto last_save = Clock::now();
  for (std::size_t first = 0; first < todo.size(); first += chunk) {
    const std::size_t last = std::min(todo.size(), first + chunk);
    precompute_adjacency(run.benchmark.lp, run.data,
                         std::span<const int>(todo.data() + first, last - first), store,
                         config.adjacency, config.jobs);
    if (last < todo.size() && seconds_since(last_save) > 30.0) {
      save_adjacency(paths, run.data_hash, store, false);
      last_save = Clock::now();
    }
  }
  save_adjacency(paths, run.data_hash, store, true);
  spdlog::info("adjacency for {}: {} instances, {:.2f}s", paths.dir.string(), store.entries.size(),
               store.precompute_seconds);
  return store;
}

TrainReport cmd_train(const ExperimentConfig& config, const BenchmarkConfig& bench,
                      std::uint64_t seed, const Method& method) {
  const RunPaths paths = run_paths(config, bench, seed);
  const LoadedRun run = load_run(paths);
  std::optional<AdjacencyStore> store;
  if (method.loss == LossKind::kLava) {
    bool complete = false;
    store = load_adjacency(paths, run.data_hash, &complete);
    if (!store || !complete) {
      fail(ErrorCode::kMissingAdjacency, "adjacency for " + paths.dir.string() +
                                             " is missing or incomplete; run precompute first");
    }
  }
  TrainConfig tc = config.train;
  tc.loss = method.loss;
  tc.epsilon = method.epsilon;
  tc.seed = seed;
  tc.jobs = config.jobs;
  const TrainReport report = train(run.benchmark, run.data, store ? &*store : nullptr, tc);

  const std::filesystem::path dir = paths.method_dir(method.name());
  Json meta{{"data_hash", run.data_hash},
            {"method", method.name()},
            {"epsilon", epsilon_json(method.epsilon)},
            {"seed", seed},
            {"benchmark", bench.to_json()},
            {"best_epoch", report.best_epoch},
            {"best_val_regret", report.best_val_regret},
            {"config", config.to_json()}};
  write_file_atomic(dir / "checkpoint.json", checkpoint_to_json(report.best, meta).dump());
  Json curve = Json::array();
  std::string curve_csv = "epoch,train_seconds,train_loss,val_regret,prediction_norm\n";
  for (const CurvePoint& p : report.curve) {
    curve.push_back(Json{{"epoch", p.epoch},
                         {"train_seconds", p.train_seconds},
                         {"train_loss", p.train_loss},
                         {"val_regret", p.val_regret},
                         {"prediction_norm", p.prediction_norm}});
    curve_csv += std::to_string(p.epoch) + "," + format_number(p.train_seconds) + "," +
                 format_number(p.train_loss) + "," + format_number(p.val_regret) + "," +
                 format_number(p.prediction_norm) + "\n";
  }
  Json summary{{"data_hash", run.data_hash},
               {"method", method.name()},
               {"seed", seed},
               {"best_epoch", report.best_epoch},
               {"best_val_regret", report.best_val_regret},
               {"precompute_seconds", report.precompute_seconds},
               {"train_seconds", report.train_seconds},
               {"train_seconds_to_best", report.train_seconds_to_best},
               {"lp_solve_calls", report.lp_solve_calls},
               {"ilp_solve_calls", report.ilp_solve_calls},
               {"epochs", report.epochs},
               {"time_cap_hit", report.time_cap_hit},
               {"stop_reason", report.stop_reason},
               {"curve", curve}};
  write_file_atomic(dir / "report.json", summary.dump(2));
  write_file_atomic(dir / "curve.csv", curve_csv);
  spdlog::info("trained {} on {}: best val regret {:.4f} at epoch {}, {:.2f}s", method.name(),
               paths.dir.string(), report.best_val_regret, report.best_epoch,
               report.train_seconds);
  return report;
}

// ---------------------------------------------------------------------------

std::string to_csv_line(const ResultsRow& r) {
  return r.benchmark + "," + r.method + "," + std::to_string(r.seed) + "," +
         format_number(r.regret) + "," + format_number(r.precompute_s) + "," +
         format_number(r.train_s) + "," + std::to_string(r.solver_calls);
}

std::vector<ResultsRow> read_results(const std::filesystem::path& path) {
  std::vector<ResultsRow> rows;
  if (!std::filesystem::exists(path)) return rows;
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    fail(ErrorCode::kParse, path.string() + ": unexpected results header");
  }
  for (int line_no = 2; std::getline(in, line); ++line_no) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": expected 7 cells");
    }
    try {
      rows.push_back({cells[0], cells[1], std::stoull(cells[2]), std::stod(cells[3]),
                      std::stod(cells[4]), std::stod(cells[5]), std::stoull(cells[6])});
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
  }
  return rows;
}

void upsert_results(const std::filesystem::path& path, const std::vector<ResultsRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::uint64_t>, ResultsRow> merged;
  for (const ResultsRow& r : read_results(path)) merged[{r.benchmark, r.method, r.seed}] = r;
  for (const ResultsRow& r : rows) merged[{r.benchmark, r.method, r.seed}] = r;
  std::string text = std::string(kResultsHeader) + "\n";
  for (const auto& [key, r] : merged) text += to_csv_line(r) + "\n";
  write_file_atomic(path, text);
}

ResultsRow cmd_evaluate(const ExperimentConfig& config, const BenchmarkConfig& bench,
                        std::uint64_t seed, const Method& method) {
  const RunPaths paths = run_paths(config, bench, seed);
  const LoadedRun run = load_run(paths);
  const std::filesystem::path dir = paths.method_dir(method.name());
  if (!std::filesystem::exists(dir / "checkpoint.json")) {
    fail(ErrorCode::kIo, "no checkpoint in " + dir.string() + "; run train first");
  }
  Json meta;
  const LinearModel model = checkpoint_from_json(read_json(dir / "checkpoint.json"), &meta);
  if (meta.value("data_hash", "") != run.data_hash) {
    fail(ErrorCode::kContractViolation,
         "checkpoint " + dir.string() + " was trained on different data");
  }
  const Json report = read_json(dir / "report.json");
  const EvalResult ev = evaluate(model, run.benchmark, run.data, run.data.split.test,
                                 run.benchmark.is_integer(), config.jobs, nullptr, config.ilp);
  ResultsRow row;
  row.benchmark = bench.tag();
  row.method = method.name();
  row.seed = seed;
  row.regret = ev.normalized_regret;
  row.precompute_s = method.loss == LossKind::kLava ? report.at("precompute_seconds").get<double>()
                                                    : 0.0;
  row.train_s = report.at("train_seconds").get<double>();
  row.solver_calls = report.at("lp_solve_calls").get<std::uint64_t>() +
                     report.at("ilp_solve_calls").get<std::uint64_t>();
  Json per_instance = Json::array();
  for (std::size_t k = 0; k < ev.ids.size(); ++k) {
    per_instance.push_back(Json{{"id", ev.ids[k]},
                                {"regret", ev.outcomes[k].regret},
                                {"achieved", ev.outcomes[k].achieved}});
  }
  write_file_atomic(dir / "eval.json",
                    Json{{"normalized_regret", ev.normalized_regret},
                         {"integer", run.benchmark.is_integer()},
                         {"node_limit_hits", ev.node_limit_hits},
                         {"instances", per_instance}}
                        .dump(2));
  upsert_results(config.out_root() / "results.csv", {row});
  spdlog::info("{} {} seed {}: normalized regret {:.4f}", row.benchmark, row.method, seed,
               row.regret);
  return row;
}

std::vector<CellStat> aggregate(const std::vector<ResultsRow>& rows,
                                double (*value)(const ResultsRow&)) {
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (const ResultsRow& r : rows) groups[{r.benchmark, r.method}].push_back(value(r));
  std::vector<CellStat> out;
  for (const auto& [key, values] : groups) {
    CellStat s;
    s.benchmark = key.first;
    s.method = key.second;
    s.runs = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.runs;
    if (s.runs > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.standard_error = std::sqrt(ss / (s.runs - 1)) / std::sqrt(static_cast<double>(s.runs));
    }
    out.push_back(s);
  }
  return out;
}

ReproduceSummary cmd_reproduce(const ExperimentConfig& config, int table) {
  if (table < 1 || table > 3) fail(ErrorCode::kConfig, "table must be 1, 2 or 3");
  const std::vector<BenchmarkConfig> benches =
      config.benchmarks.empty() ? default_benchmarks() : config.benchmarks;
  std::vector<std::string> method_names = config.methods;
  if (method_names.empty()) {
    method_names = table == 3 ? std::vector<std::string>{"lava_eps0", "lava", "lava_epsinf"}
                              : std::vector<std::string>{"mse", "spo+", "lava"};
  }
  std::vector<Method> methods;
  for (const auto& name : method_names) methods.push_back(Method::parse(name));
  const bool any_lava = std::any_of(methods.begin(), methods.end(),
                                    [](const Method& m) { return m.loss == LossKind::kLava; });

  ReproduceSummary summary;
  std::string curves = "benchmark,method,seed,epoch,train_seconds,val_regret\n";
  for (const BenchmarkConfig& bench : benches) {
    for (std::uint64_t seed : config.seeds) {
      const RunPaths paths = run_paths(config, bench, seed);
      try {
        const std::string hash = data_hash(config, bench, seed);
        bool fresh = std::filesystem::exists(paths.manifest()) &&
                     read_json(paths.manifest()).value("data_hash", "") == hash;
        if (!fresh) cmd_generate(config, bench, seed);
        if (any_lava) cmd_precompute(config, bench, seed);
      } catch (const Error& e) {
        for (const Method& m : methods) {
          summary.failures.push_back(bench.tag() + "/" + m.name() + "/" + std::to_string(seed) +
                                     ": " + e.what());
        }
        spdlog::error("{} seed {}: {}", bench.tag(), seed, e.what());
        continue;
      }
      for (const Method& m : methods) {
        try {
          const TrainReport report = cmd_train(config, bench, seed, m);
          for (const CurvePoint& p : report.curve) {
            curves += bench.tag() + "," + m.name() + "," + std::to_string(seed) + "," +
                      std::to_string(p.epoch) + "," + format_number(p.train_seconds) + "," +
                      format_number(p.val_regret) + "\n";
          }
          summary.rows.push_back(cmd_evaluate(config, bench, seed, m));
        } catch (const Error& e) {
          summary.failures.push_back(bench.tag() + "/" + m.name() + "/" + std::to_string(seed) +
                                     ": " + e.what());
          spdlog::error("{} {} seed {}: {}", bench.tag(), m.name(), seed, e.what());
        }
      }
    }
  }
  std::sort(summary.rows.begin(), summary.rows.end(), [](const ResultsRow& a, const ResultsRow& b) {
    return std::tie(a.benchmark, a.method, a.seed) < std::tie(b.benchmark, b.method, b.seed);
  });

  const auto regret = [](const ResultsRow& r) { return r.regret; };
  const auto total_time = [](const ResultsRow& r) { return r.precompute_s + r.train_s; };
  const auto precompute = [](const ResultsRow& r) { return r.precompute_s; };
  const auto train_time = [](const ResultsRow& r) { return r.train_s; };
  std::ostringstream md;
  const auto cell_table = [&](const std::vector<CellStat>& stats, int digits) {
    md << "| benchmark |";
    for (const Method& m : methods) md << " " << m.name() << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < methods.size(); ++i) md << "---|";
    md << "\n";
    for (const BenchmarkConfig& bench : benches) {
      md << "| " << bench.tag() << " |";
      for (const Method& m : methods) {
        const auto it = std::find_if(stats.begin(), stats.end(), [&](const CellStat& s) {
          return s.benchmark == bench.tag() && s.method == m.name();
        });
        md << " " << (it == stats.end() ? std::string("n/a") : mean_se(*it, digits)) << " |";
      }
      md << "\n";
    }
  };
  if (table == 2) {
    md << "Training time in seconds (precompute + train), mean ± standard error\n\n";
    cell_table(aggregate(summary.rows, total_time), 2);
    md << "\nPrecompute seconds\n\n";
    cell_table(aggregate(summary.rows, precompute), 2);
    md << "\nTrain seconds\n\n";
    cell_table(aggregate(summary.rows, train_time), 2);
  } else {
    md << "Normalized test regret, mean ± standard error over " << config.seeds.size()
       << " seeds\n\n";
    cell_table(aggregate(summary.rows, regret), 3);
  }
  md << "\nDataset sizes (train/val/test):";
  for (const BenchmarkConfig& bench : benches) {
    const DatasetSizes s = config.sizes_for(bench);
    md << " " << bench.tag() << " " << s.train << "/" << s.val << "/" << s.test << ";";
  }
  md << "\n";
  if (!summary.failures.empty()) {
    md << "\nFailed cells:\n";
    for (const auto& f : summary.failures) md << "- " << f << "\n";
  }
  const std::filesystem::path root = config.out_root();
  summary.table_path = root / ("table" + std::to_string(table) + ".md");
  write_file_atomic(summary.table_path, md.str());
  write_file_atomic(root / ("curves_table" + std::to_string(table) + ".csv"), curves);
  return summary;
}

}  // namespace vertexdfl
