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

// Command-line driver: generate | precompute | train | evaluate | reproduce.
// Exit codes: 0 ok, 1 runtime failure, 2 config error.

#include <cstdio>
#include <iostream>
#include <optional>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "vertexdfl/experiment.hpp"

namespace {

using namespace vertexdfl;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<std::string> benchmark;
  std::optional<std::string> epsilon;
  int table = 1;
  std::string log_level = "info";
};

// Flags override the file, which overrides the defaults.
ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) {
    Json j;
    try {
      j = Json::parse(read_file(f.config));
    } catch (const Json::parse_error& e) {
      fail(ErrorCode::kConfig, f.config + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::kConfig, e.what());
    }
    c = ExperimentConfig::from_json(j);
  }
  if (f.benchmark) {
    Json b = c.benchmark.to_json();
    b["kind"] = *f.benchmark;
    c.benchmark = BenchmarkConfig::from_json(b);
    c.benchmarks = {c.benchmark};
  }
  if (f.seed) c.seeds = {*f.seed};
  if (f.jobs) c.jobs = *f.jobs;
  if (f.out) c.out = *f.out;
  if (f.method) c.method = Method::parse(*f.method);
  if (f.epsilon) {
    if (*f.epsilon == "inf") {
      c.method.epsilon = std::numeric_limits<double>::infinity();
    } else {
      try {
        c.method.epsilon = std::stod(*f.epsilon);
      } catch (const std::exception&) {
        fail(ErrorCode::kConfig, "--epsilon: expected a number or inf");
      }
    }
  }
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision-focused learning with vertex adjacency losses"};
  app.require_subcommand(1, 1);
  Flags f;
  const auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "run a single seed");
    sub->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
    sub->add_option("--out", f.out, std::string("output root (default $") + kOutEnvVar + " or runs)");
    sub->add_option("--benchmark", f.benchmark, "random_lp | knapsack | shortest_path");
    sub->add_option("--log-level", f.log_level, "trace | debug | info | warn | error");
  };
  const auto with_method = [&f](CLI::App* sub) {
    sub->add_option("--method", f.method, "lava | lava_eps0 | lava_epsinf | mse | spo+");
    sub->add_option("--epsilon", f.epsilon, "LAVA margin (number or inf)");
  };
  CLI::App* generate = app.add_subcommand("generate", "build an LP and its dataset");
  CLI::App* precompute = app.add_subcommand("precompute", "enumerate adjacent vertices");
  CLI::App* train_cmd = app.add_subcommand("train", "fit a cost model");
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score a checkpoint on the test split");
  CLI::App* reproduce = app.add_subcommand("reproduce", "run a full results table");
  for (CLI::App* sub : {generate, precompute, train_cmd, evaluate_cmd, reproduce}) common(sub);
  with_method(train_cmd);
  with_method(evaluate_cmd);
  reproduce->add_option("--table", f.table, "1 regret, 2 timing, 3 margin ablation")
      ->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  spdlog::set_level(spdlog::level::from_str(f.log_level));

  try {
    const ExperimentConfig config = resolve(f);
    if (reproduce->parsed()) {
      const ReproduceSummary s = cmd_reproduce(config, f.table);
      std::cout << "wrote " << s.table_path.string() << " (" << s.rows.size() << " runs, "
                << s.failures.size() << " failed)\n";
      return s.rows.empty() && !s.failures.empty() ? kExitRuntime : kExitOk;
    }
    for (std::uint64_t seed : config.seeds) {
      if (generate->parsed()) {
        cmd_generate(config, config.benchmark, seed);
      } else if (precompute->parsed()) {
        cmd_precompute(config, config.benchmark, seed);
      } else if (train_cmd->parsed()) {
        cmd_train(config, config.benchmark, seed, config.method);
      } else {
        const ResultsRow row = cmd_evaluate(config, config.benchmark, seed, config.method);
        std::cout << to_csv_line(row) << "\n";
      }
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::kConfig ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
