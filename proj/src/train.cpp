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

#include "vertexdfl/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

#include <spdlog/spdlog.h>

#include "vertexdfl/ilp.hpp"
#include "vertexdfl/losses.hpp"
#include "vertexdfl/parallel.hpp"

namespace vertexdfl {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const Vector& true_cost(const DataInstance& inst) {
  if (!inst.c) {
    fail(ErrorCode::kInvalidArgument,
         "instance " + std::to_string(inst.id) + " has no true cost vector");
  }
  return *inst.c;
}

}  // namespace

std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kLava: return "lava";
    case LossKind::kMse: return "mse";
    case LossKind::kSpoPlus: return "spo+";
  }
  return "unknown";
}

LossKind loss_kind_from_string(std::string_view text) {
  if (text == "lava") return LossKind::kLava;
  if (text == "mse") return LossKind::kMse;
  if (text == "spo+" || text == "spo_plus" || text == "spoplus") return LossKind::kSpoPlus;
  fail(ErrorCode::kConfig, "unknown loss \"" + std::string(text) + "\"");
}

void TrainConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kConfig, what);
  };
  require(lr > 0.0 && std::isfinite(lr), "lr must be positive");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(val_check_every >= 1, "val_check_every must be >= 1");
  require(patience_checks >= 1, "patience_checks must be >= 1");
  require(improvement_threshold >= 0.0 && improvement_threshold < 1.0,
          "improvement_threshold must be in [0, 1)");
  require(time_cap_seconds > 0.0, "time_cap_seconds must be positive");
  require(max_epochs >= 1, "max_epochs must be >= 1");
  require(epsilon >= 0.0, "epsilon must be >= 0");
}

LinearModel initial_model(const Benchmark& benchmark, const Dataset& data, std::uint64_t seed) {
  if (data.rows_per_instance > 1) {
    return LinearModel::uniform_init_itemwise(data.rows_per_instance, data.feature_dim, seed);
  }
  return LinearModel::uniform_init(benchmark.lp.n_structural, data.feature_dim, seed);
}

EvalResult evaluate(const LinearModel& model, const Benchmark& benchmark, const Dataset& data,
                    std::span<const int> ids, bool integer, int jobs, SolveStats* stats,
                    IlpOptions ilp) {
  if (ids.empty()) fail(ErrorCode::kInvalidArgument, "evaluation split is empty");
  const StandardFormLP& lp = benchmark.lp;
  EvalResult result;
  result.ids.assign(ids.begin(), ids.end());
  result.outcomes.resize(ids.size());
  const int workers = resolve_jobs(jobs);
  std::vector<std::unique_ptr<SimplexSolver>> solvers(workers);
  std::vector<std::uint64_t> hits(ids.size(), 0);
  const auto solve_integer = [&](SimplexSolver& solver, const Vector& cost, int id,
                                 std::uint64_t& hit) {
    try {
      return solve_binary_ilp(solver, cost, benchmark.binary_indices, ilp);
    } catch (const NodeLimitError& e) {
      if (!e.incumbent()) throw;
      spdlog::warn("instance {}: {}; scoring the incumbent", id, e.what());
      hit = 1;
      return *e.incumbent();
    }
  };
  parallel_for(static_cast<int>(ids.size()), workers, [&](int worker, int k) {
    if (!solvers[worker]) solvers[worker] = std::make_unique<SimplexSolver>(lp, stats);
    SimplexSolver& solver = *solvers[worker];
    const DataInstance& inst = data.instances.at(ids[k]);
    const Vector& c = true_cost(inst);
    const Vector c_hat = predict(model, inst.x);
    try {
      // Starting every instance from its own stored basis keeps results
      // independent of how instances are spread over workers.
      const BasicFeasibleSolution relaxed = solver.solve(c_hat, inst.basis);
      if (integer && benchmark.is_integer()) {
        double optimum = inst.integer_optimal_value;
        if (!inst.z_integer) {
          solver.solve(c, inst.basis);
          optimum = solve_integer(solver, c, inst.id, hits[k]).objective_value;
          solver.solve(c_hat, inst.basis);
        }
        const IlpResult decision = solve_integer(solver, c_hat, inst.id, hits[k]);
        result.outcomes[k] = decision_regret(lp, c, decision.z, optimum);
      } else {
        result.outcomes[k] = decision_regret(lp, c, relaxed.z, inst.optimal_value);
      }
    } catch (const Error& e) {
      throw Error(e.code(), "instance " + std::to_string(inst.id) + ": " + e.what());
    }
  });
  result.node_limit_hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  result.normalized_regret = normalized_regret(result.outcomes);
  return result;
}

TrainReport train(const Benchmark& benchmark, const Dataset& data, const AdjacencyStore* store,
                  const TrainConfig& config) {
  config.validate();
  const StandardFormLP& lp = benchmark.lp;
  const std::vector<int>& train_ids = data.split.train;
  if (train_ids.empty()) fail(ErrorCode::kInvalidArgument, "training split is empty");
  if (data.split.val.empty()) fail(ErrorCode::kInvalidArgument, "validation split is empty");
  const int ns = lp.n_structural;

  // LAVA works on precomputed rows (z* - z_adj) over the structural columns;
  // slack costs are zero so nothing else enters c_hat'z.
  std::vector<Matrix> differences;
  if (config.loss == LossKind::kLava) {
    if (store == nullptr) {
      fail(ErrorCode::kMissingAdjacency, "LAVA training needs adjacency data; run precompute");
    }
    differences.resize(data.instances.size());
    for (int id : train_ids) {
      const AdjacencySet& adj = store->at(id);
      const Vector z = data.instances[id].z_star.head(ns);
      Matrix diff(adj.adjacent.rows(), ns);
      for (Eigen::Index k = 0; k < adj.adjacent.rows(); ++k) {
        diff.row(k) = z.transpose() - adj.adjacent.row(k).head(ns);
      }
      differences[id] = std::move(diff);
    }
  } else {
    for (int id : train_ids) true_cost(data.instances[id]);
  }
  const EpsilonMargin margin(config.epsilon);

  TrainReport report;
  report.precompute_seconds = store != nullptr ? store->precompute_seconds : 0.0;
  LinearModel model = initial_model(benchmark, data, config.seed);
  AdamState adam = AdamState::for_model(model, config.lr);
  LinearModel grad = LinearModel::zeros_like(model);
  SolveStats train_stats;
  SimplexSolver solver(lp, &train_stats);
  std::mt19937_64 rng = instance_rng(config.seed, 0x747261696eull);
  std::vector<int> order = train_ids;

  const auto validate_model = [&](const LinearModel& m) {
    return evaluate(m, benchmark, data, data.split.val, false, config.jobs).normalized_regret;
  };

  report.best = model;
  report.best_val_regret = validate_model(model);
  report.curve.push_back({0, 0.0, 0.0, report.best_val_regret, 0.0});
  double reference = report.best_val_regret;
  int stale_checks = 0;
  report.stop_reason = "max_epochs";

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    double norm_sum = 0.0;
    std::size_t seen = 0;
    bool capped = false;
    for (std::size_t first = 0; first < order.size() && !capped; first += config.batch_size) {
      const std::size_t last = std::min(order.size(), first + config.batch_size);
      grad.W.setZero();
      grad.bias.setZero();
      for (std::size_t b = first; b < last; ++b) {
        const DataInstance& inst = data.instances[order[b]];
        const Vector c_hat = predict(model, inst.x);
        LossValueGrad loss;
        switch (config.loss) {
          case LossKind::kLava:
            loss = lava_loss_from_differences(c_hat, differences[inst.id], margin,
                                              lp.original_sense);
            break;
          case LossKind::kMse:
            loss = mse_loss(c_hat, *inst.c);
            break;
          case LossKind::kSpoPlus:
            // The solver handle carries its last basis from one call to the
            // next, as a reused solver model would.
            loss = spo_plus_loss(solver, c_hat, *inst.c, inst.z_star);
            break;
        }
        if (!std::isfinite(loss.value) || !loss.grad.allFinite()) {
          fail(ErrorCode::kNonFinite, "non-finite loss at instance " + std::to_string(inst.id) +
                                          " in epoch " + std::to_string(epoch));
        }
        loss_sum += loss.value;
        norm_sum += c_hat.norm();
        accumulate_gradient(model, inst.x, loss.grad.head(model.output_dim()), grad);
      }
      const double scale = 1.0 / static_cast<double>(last - first);
      grad.W *= scale;
      grad.bias *= scale;
      adam_step(model, grad, adam);
      seen = last;
      capped = report.train_seconds + seconds_since(epoch_start) >= config.time_cap_seconds;
    }
    report.train_seconds += seconds_since(epoch_start);
    report.epochs = epoch;

    const auto calls = train_stats.snapshot();
    if (config.loss == LossKind::kLava && calls.lp_solve_calls != 0) {
      fail(ErrorCode::kContractViolation, "LAVA training called the LP solver");
    }
    report.lp_solve_calls = calls.lp_solve_calls;
    report.ilp_solve_calls = calls.ilp_solve_calls;

    if (epoch % config.val_check_every == 0 || capped) {
      const double val = validate_model(model);
      const double n_seen = static_cast<double>(seen);
      report.curve.push_back(
          {epoch, report.train_seconds, loss_sum / n_seen, val, norm_sum / n_seen});
      if (val < report.best_val_regret) {
        report.best_val_regret = val;
        report.best = model;
        report.best_epoch = epoch;
        report.train_seconds_to_best = report.train_seconds;
      }
      if (val < reference * (1.0 - config.improvement_threshold)) {
        reference = val;
        stale_checks = 0;
      } else if (++stale_checks >= config.patience_checks) {
        report.stop_reason = "patience";
        break;
      }
    }
    if (capped) {
      report.time_cap_hit = true;
      report.stop_reason = "time_cap";
      break;
    }
  }
  return report;
}

}  // namespace vertexdfl
