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

#ifndef VERTEXDFL_TRAIN_HPP_
#define VERTEXDFL_TRAIN_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vertexdfl/benchgen.hpp"
#include "vertexdfl/losses.hpp"
#include "vertexdfl/model.hpp"
#include "vertexdfl/store.hpp"

namespace vertexdfl {

enum class LossKind { kLava, kMse, kSpoPlus };

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view text);

struct TrainConfig {
  LossKind loss = LossKind::kLava;
  double epsilon = 0.1;  // lava only; may be +inf
  double lr = 0.01;
  int batch_size = 32;
  std::uint64_t seed = 0;
  int val_check_every = 1;  // epochs
  int patience_checks = 3;
  double improvement_threshold = 0.01;  // relative
  double time_cap_seconds = 600.0;
  int max_epochs = 1000;
  int jobs = 1;  // validation workers

  void validate() const;
};

struct CurvePoint {
  int epoch = 0;
  double train_seconds = 0.0;  // cumulative timed training at this check
  double train_loss = 0.0;     // mean over the epoch (0 at epoch 0)
  double val_regret = 0.0;
  // Mean ||c_hat|| over the epoch. The zero vector minimizes LAVA at eps = 0,
  // so a collapse toward it shows up here; nothing prevents it.
  double prediction_norm = 0.0;
};

struct TrainReport {
  LinearModel best;
  int best_epoch = 0;
  double best_val_regret = 0.0;
  std::vector<CurvePoint> curve;
  double precompute_seconds = 0.0;
  double train_seconds = 0.0;          // timed training, validation excluded
  double train_seconds_to_best = 0.0;  // same, up to the best checkpoint
  std::uint64_t lp_solve_calls = 0;    // inside timed training
  std::uint64_t ilp_solve_calls = 0;
  int epochs = 0;
  bool time_cap_hit = false;
  std::string stop_reason;
};

// Item-wise datasets get a shared 1 x p model; otherwise n_structural x p.
LinearModel initial_model(const Benchmark& benchmark, const Dataset& data, std::uint64_t seed);

// Trains on data.split.train and early-stops on data.split.val. LAVA needs
// an adjacency entry for every training instance; MSE and SPO+ need true
// costs. Validation always scores LP decisions.
TrainReport train(const Benchmark& benchmark, const Dataset& data, const AdjacencyStore* store,
                  const TrainConfig& config);

struct EvalResult {
  double normalized_regret = 0.0;
  std::vector<int> ids;
  std::vector<DecisionOutcome> outcomes;  // aligned with ids
  std::uint64_t node_limit_hits = 0;      // integer decisions that used an incumbent
};

// Normalized regret of the model's decisions on the given instances. With
// integer = true (binary benchmarks) decisions and optima come from the
// integer problem, otherwise from the LP.
EvalResult evaluate(const LinearModel& model, const Benchmark& benchmark, const Dataset& data,
                    std::span<const int> ids, bool integer, int jobs = 1,
                    SolveStats* stats = nullptr, IlpOptions ilp = {});

}  // namespace vertexdfl

#endif  // VERTEXDFL_TRAIN_HPP_
