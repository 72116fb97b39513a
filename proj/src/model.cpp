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

#include "vertexdfl/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vertexdfl/benchgen.hpp"

namespace vertexdfl {
namespace {

LinearModel uniform(int rows, int p, int items, std::uint64_t seed) {
  if (rows < 1 || p < 1) fail(ErrorCode::kInvalidArgument, "model dimensions must be positive");
  std::mt19937_64 rng = instance_rng(seed, 0x6d6f64656cull);
  const double bound = 1.0 / std::sqrt(static_cast<double>(p));
  std::uniform_real_distribution<double> dist(-bound, bound);
  LinearModel model;
  model.items = items;
  model.W.resize(rows, p);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < p; ++j) model.W(i, j) = dist(rng);
  }
  model.bias.resize(rows);
  for (int i = 0; i < rows; ++i) model.bias(i) = dist(rng);
  return model;
}

using ItemRows = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

}  // namespace

LinearModel LinearModel::uniform_init(int n_out, int p, std::uint64_t seed) {
  return uniform(n_out, p, 0, seed);
}

LinearModel LinearModel::uniform_init_itemwise(int items, int p, std::uint64_t seed) {
  if (items < 1) fail(ErrorCode::kInvalidArgument, "item-wise model needs items >= 1");
  return uniform(1, p, items, seed);
}

LinearModel LinearModel::zeros_like(const LinearModel& other) {
  LinearModel zero;
  zero.items = other.items;
  zero.W = Matrix::Zero(other.W.rows(), other.W.cols());
  zero.bias = Vector::Zero(other.bias.size());
  return zero;
}

Vector predict(const LinearModel& model, const Vector& x) {
  if (x.size() != model.input_dim()) {
    fail(ErrorCode::kInvalidArgument, "feature vector has length " + std::to_string(x.size()) +
                                          ", model expects " + std::to_string(model.input_dim()));
  }
  if (model.items > 0) {
    const ItemRows rows(x.data(), model.items, model.feature_dim());
    return (rows * model.W.row(0).transpose()).array() + model.bias(0);
  }
  return model.W * x + model.bias;
}

void accumulate_gradient(const LinearModel& model, const Vector& x, const Vector& grad_c_hat,
                         LinearModel& grad) {
  if (grad_c_hat.size() != model.output_dim()) {
    fail(ErrorCode::kInvalidArgument, "cost gradient length does not match the model");
  }
  if (model.items > 0) {
    const ItemRows rows(x.data(), model.items, model.feature_dim());
    grad.W.row(0).noalias() += (rows.transpose() * grad_c_hat).transpose();
    grad.bias(0) += grad_c_hat.sum();
    return;
  }
  grad.W.noalias() += grad_c_hat * x.transpose();
  grad.bias += grad_c_hat;
}

AdamState AdamState::for_model(const LinearModel& model, double lr) {
  if (!(lr > 0.0)) fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  AdamState state;
  state.m_W = Matrix::Zero(model.W.rows(), model.W.cols());
  state.v_W = state.m_W;
  state.m_bias = Vector::Zero(model.bias.size());
  state.v_bias = state.m_bias;
  state.lr = lr;
  return state;
}

void adam_step(LinearModel& params, const LinearModel& grads, AdamState& state) {
  if (grads.W.rows() != params.W.rows() || grads.W.cols() != params.W.cols() ||
      grads.bias.size() != params.bias.size() || state.m_W.rows() != params.W.rows() ||
      state.m_W.cols() != params.W.cols() || state.m_bias.size() != params.bias.size()) {
    fail(ErrorCode::kInvalidArgument, "Adam shapes do not agree");
  }
  if (!grads.all_finite()) fail(ErrorCode::kNonFinite, "non-finite gradient");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
    p.array() -= state.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps);
  };
  update(params.W, grads.W, state.m_W, state.v_W);
  update(params.bias, grads.bias, state.m_bias, state.v_bias);
}

}  // namespace vertexdfl
