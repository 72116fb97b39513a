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

#include <chrono>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "vertexdfl/model.hpp"
#include "vertexdfl/store.hpp"
#include "vertexdfl/train.hpp"

namespace vertexdfl {
namespace {

using namespace testing;

struct Problem {
  Benchmark benchmark;
  FeatureMap map;
  Dataset data;
  AdjacencyStore store;
};

Problem small_problem(int deg, DatasetSizes sizes = {200, 50, 50}, std::uint64_t seed = 3,
                      int n = 20, int m = 8) {
  Problem p;
  p.benchmark.kind = BenchmarkKind::kRandomLp;
  p.benchmark.lp = gen_random_lp(n, m, seed);
  p.map = gen_feature_map(n, 5, deg, 0.0, seed);
  p.data = gen_dataset(p.benchmark, p.map, sizes, seed);
  std::vector<int> ids = p.data.split.train;
  ids.insert(ids.end(), p.data.split.val.begin(), p.data.split.val.end());
  precompute_adjacency(p.benchmark.lp, p.data, ids, p.store);
  return p;
}

// With deg = 1 the cost is affine in x, so this model reproduces it.
LinearModel exact_affine_model(const FeatureMap& map) {
  LinearModel model;
  model.W = map.B / (5.0 * 3.5);
  model.bias = Vector::Constant(map.B.rows(), 4.0 / 3.5);
  return model;
}

TEST(Model, ZeroWeightsGiveBias) {
  LinearModel model;
  model.W = Matrix::Zero(3, 2);
  model.bias = vec({1, 2, 3});
  EXPECT_EQ(predict(model, vec({5, -7})), vec({1, 2, 3}));
}

TEST(Model, IdentityPicksColumn) {
  LinearModel model;
  model.W = Matrix::Identity(3, 3);
  model.bias = Vector::Zero(3);
  EXPECT_EQ(predict(model, vec({1, 0, 0})), vec({1, 0, 0}));
}

TEST(Model, ItemwiseSharesWeights) {
  LinearModel model = LinearModel::uniform_init_itemwise(3, 2, 1);
  model.W = mat({{2, -1}});
  model.bias = vec({0.5});
  EXPECT_EQ(model.input_dim(), 6);
  EXPECT_EQ(model.output_dim(), 3);
  EXPECT_EQ(predict(model, vec({1, 1, 0, 2, 3, 0})), vec({1.5, -1.5, 6.5}));
}

TEST(Model, InitRange) {
  const LinearModel model = LinearModel::uniform_init(40, 5, 9);
  const double bound = 1.0 / std::sqrt(5.0);
  EXPECT_LE(model.W.cwiseAbs().maxCoeff(), bound);
  EXPECT_LE(model.bias.cwiseAbs().maxCoeff(), bound);
  EXPECT_GT(model.W.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(LinearModel::uniform_init(40, 5, 9).W, model.W);
}

// Chain rule through the model against finite differences in W and bias.
TEST(Model, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 20; ++k) {
    LinearModel model = LinearModel::uniform_init(4, 3, k);
    const Vector x = random_cost(3, rng);
    const Vector target = random_cost(4, rng);
    LinearModel grad = LinearModel::zeros_like(model);
    accumulate_gradient(model, x, mse_loss(predict(model, x), target).grad, grad);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 3; ++j) {
        LinearModel up = model, down = model;
        up.W(i, j) += h;
        down.W(i, j) -= h;
        const double fd = (mse_loss(predict(up, x), target).value -
                           mse_loss(predict(down, x), target).value) / (2 * h);
        ASSERT_NEAR(grad.W(i, j), fd, 1e-5 * std::max(1.0, std::abs(fd)));
      }
      LinearModel up = model, down = model;
      up.bias(i) += h;
      down.bias(i) -= h;
      const double fd = (mse_loss(predict(up, x), target).value -
                         mse_loss(predict(down, x), target).value) / (2 * h);
      ASSERT_NEAR(grad.bias(i), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(Adam, ZeroGradientLeavesParameters) {
  LinearModel model = LinearModel::uniform_init(3, 2, 1);
  const LinearModel before = model;
  AdamState state = AdamState::for_model(model, 0.01);
  adam_step(model, LinearModel::zeros_like(model), state);
  EXPECT_EQ(model.W, before.W);
  EXPECT_EQ(model.bias, before.bias);
  EXPECT_EQ(state.step, 1);
}

TEST(Adam, FirstStepIsLrTimesSign) {
  LinearModel model = LinearModel::zeros_like(LinearModel::uniform_init(1, 2, 1));
  LinearModel g = model;
  g.W << 0.3, -2.0;
  g.bias << 1e-3;
  AdamState state = AdamState::for_model(model, 0.01);
  adam_step(model, g, state);
  EXPECT_NEAR(model.W(0, 0), -0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(model.W(0, 1), 0.01 * 2.0 / (2.0 + 1e-8), 1e-15);
  EXPECT_NEAR(model.bias(0), -0.01 * 1e-3 / (1e-3 + 1e-8), 1e-15);
}

TEST(Adam, ConstantGradientMovesLrPerStep) {
  LinearModel model = LinearModel::zeros_like(LinearModel::uniform_init(1, 1, 1));
  LinearModel g = model;
  g.W << 5.0;
  g.bias << -0.2;
  AdamState state = AdamState::for_model(model, 0.01);
  for (int k = 0; k < 100; ++k) adam_step(model, g, state);
  EXPECT_NEAR(model.W(0, 0), -1.0, 1e-6);
  EXPECT_NEAR(model.bias(0), 1.0, 1e-6);
}

TEST(Adam, NonFiniteGradientRejected) {
  LinearModel model = LinearModel::uniform_init(2, 2, 1);
  const LinearModel before = model;
  LinearModel g = LinearModel::zeros_like(model);
  g.W(1, 0) = std::numeric_limits<double>::quiet_NaN();
  AdamState state = AdamState::for_model(model, 0.01);
  try {
    adam_step(model, g, state);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
  EXPECT_EQ(model.W, before.W);
  EXPECT_EQ(state.step, 0);
}

TEST(Evaluate, ExactModelHasZeroRegret) {
  const Problem p = small_problem(1);
  const EvalResult r = evaluate(exact_affine_model(p.map), p.benchmark, p.data,
                                p.data.split.test, false);
  EXPECT_NEAR(r.normalized_regret, 0.0, 1e-9);
  EXPECT_EQ(r.ids.size(), p.data.split.test.size());
}

TEST(Evaluate, ConstantModelHasPositiveRegret) {
  const Problem p = small_problem(8);
  LinearModel constant = LinearModel::uniform_init(20, 5, 4);
  constant.W.setZero();
  EXPECT_GT(evaluate(constant, p.benchmark, p.data, p.data.split.test, false).normalized_regret,
            0.0);
}

TEST(Evaluate, TwoInstanceFixture) {
  Benchmark b;
  b.lp = triangle();
  Dataset data;
  data.feature_dim = 3;
  const auto add = [&](const Vector& x, const Vector& c) {
    DataInstance inst;
    inst.id = static_cast<int>(data.instances.size());
    inst.x = x;
    inst.c = c;
    const BasicFeasibleSolution opt = solve_lp(b.lp, c);
    inst.z_star = opt.z;
    inst.basis = opt.basis;
    inst.optimal_value = opt.objective_value;
    data.instances.push_back(inst);
  };
  add(vec({3, 2, 1}), vec({1, 2, 3}));  // picks z3: achieved 3, optimum 1
  add(vec({2, 1, 4}), vec({2, 1, 4}));  // optimal: achieved 1
  LinearModel identity;
  identity.W = Matrix::Identity(3, 3);
  identity.bias = Vector::Zero(3);
  const std::vector<int> ids{0, 1};
  const EvalResult r = evaluate(identity, b, data, ids, false);
  EXPECT_NEAR(r.normalized_regret, 2.0 / 4.0, 1e-12);
  EXPECT_NEAR(r.outcomes[0].regret, 2.0, 1e-12);
  EXPECT_NEAR(r.outcomes[1].regret, 0.0, 1e-12);
}

TEST(Train, MseLearnsAffineMapping) {
  const Problem p = small_problem(1);
  TrainConfig config;
  config.loss = LossKind::kMse;
  config.patience_checks = 1000;
  config.max_epochs = 200;
  const TrainReport r = train(p.benchmark, p.data, nullptr, config);
  EXPECT_LT(r.best_val_regret, 0.01);
  EXPECT_LT(r.best_val_regret, r.curve.front().val_regret);
}

TEST(Train, LavaSolvesASingleInstance) {
  Problem p = small_problem(8, {20, 5, 5});
  p.data.split.train = {p.data.split.train.front()};
  p.data.split.val = p.data.split.train;
  TrainConfig config;
  config.epsilon = 0.0;
  config.patience_checks = 1000;
  config.max_epochs = 500;
  const TrainReport r = train(p.benchmark, p.data, &p.store, config);
  EXPECT_NEAR(r.best_val_regret, 0.0, kTol.obj);
  const DataInstance& inst = p.data.instances[p.data.split.train.front()];
  const Vector c_hat = internal_cost(p.benchmark.lp, predict(r.best, inst.x));
  const AdjacencySet& set = p.store.at(inst.id);
  EXPECT_LE(lava_loss(c_hat, inst.z_star, set.adjacent, EpsilonMargin(0.0)).value, 1e-12);
}

TEST(Train, LavaNeverCallsTheSolver) {
  const Problem p = small_problem(8);
  TrainConfig config;
  const TrainReport r = train(p.benchmark, p.data, &p.store, config);
  EXPECT_EQ(r.lp_solve_calls, 0u);
  EXPECT_EQ(r.ilp_solve_calls, 0u);
  EXPECT_GT(r.epochs, 0);
}

TEST(Train, SpoPlusSolvesOncePerInstance) {
  const Problem p = small_problem(8);
  TrainConfig config;
  config.loss = LossKind::kSpoPlus;
  const TrainReport r = train(p.benchmark, p.data, nullptr, config);
  EXPECT_EQ(r.lp_solve_calls, static_cast<std::uint64_t>(r.epochs) * p.data.split.train.size());
}

TEST(Train, MissingAdjacency) {
  Problem p = small_problem(8, {20, 5, 5});
  p.store.entries.erase(p.data.split.train.back());
  try {
    train(p.benchmark, p.data, &p.store, TrainConfig{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingAdjacency);
  }
}

TEST(Train, TimeCap) {
  const Problem p = small_problem(8, {1500, 50, 10}, 5, 60, 25);
  TrainConfig config;
  config.loss = LossKind::kSpoPlus;
  config.time_cap_seconds = 1.0;
  config.patience_checks = 1000;
  const auto start = std::chrono::steady_clock::now();
  const TrainReport r = train(p.benchmark, p.data, nullptr, config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_TRUE(r.time_cap_hit);
  EXPECT_EQ(r.stop_reason, "time_cap");
  EXPECT_GE(r.train_seconds, 1.0);
  EXPECT_LT(r.train_seconds, 1.5);
  EXPECT_LT(wall, 10.0);
}

TEST(Train, DeterministicCurves) {
  const Problem p = small_problem(8);
  TrainConfig config;
  config.seed = 4;
  const TrainReport a = train(p.benchmark, p.data, &p.store, config);
  const TrainReport b = train(p.benchmark, p.data, &p.store, config);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t k = 0; k < a.curve.size(); ++k) {
    EXPECT_EQ(a.curve[k].val_regret, b.curve[k].val_regret);
    EXPECT_EQ(a.curve[k].train_loss, b.curve[k].train_loss);
  }
  EXPECT_EQ(a.best.W, b.best.W);
}

// The returned model is the best checkpoint, and training stops at the first
// check that completes the patience window.
TEST(Train, CheckpointAndEarlyStoppingContract) {
  for (LossKind loss : {LossKind::kLava, LossKind::kMse}) {
    const Problem p = small_problem(8);
    TrainConfig config;
    config.loss = loss;
    const TrainReport r = train(p.benchmark, p.data, &p.store, config);
    double best = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    double reference = r.curve.front().val_regret;
    int stale = 0;
    int expected_stop = -1;
    for (const CurvePoint& c : r.curve) {
      if (c.val_regret < best) {
        best = c.val_regret;
        best_epoch = c.epoch;
      }
      if (c.epoch == 0 || expected_stop >= 0) continue;
      if (c.val_regret < reference * (1 - config.improvement_threshold)) {
        reference = c.val_regret;
        stale = 0;
      } else if (++stale == config.patience_checks) {
        expected_stop = c.epoch;
      }
    }
    EXPECT_EQ(r.best_epoch, best_epoch);
    EXPECT_EQ(r.best_val_regret, best);
    EXPECT_NEAR(evaluate(r.best, p.benchmark, p.data, p.data.split.val, false).normalized_regret,
                best, 1e-12);
    ASSERT_EQ(r.stop_reason, "patience");
    EXPECT_EQ(r.epochs, expected_stop);
  }
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  c.lr = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.patience_checks = 0;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.time_cap_seconds = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = TrainConfig{};
  c.epsilon = std::numeric_limits<double>::infinity();
  EXPECT_NO_THROW(c.validate());
}

TEST(LossKindTest, Names) {
  EXPECT_EQ(loss_kind_from_string("spo+"), LossKind::kSpoPlus);
  EXPECT_EQ(to_string(LossKind::kLava), "lava");
  EXPECT_THROW(loss_kind_from_string("pfyl"), Error);
}

}  // namespace
}  // namespace vertexdfl
