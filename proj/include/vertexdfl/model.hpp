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

#ifndef VERTEXDFL_MODEL_HPP_
#define VERTEXDFL_MODEL_HPP_

#include <cstdint>

#include "vertexdfl/common.hpp"

namespace vertexdfl {

// c_hat = W x + bias. In item-wise mode (items > 0) W is 1 x p and x holds
// one p-row per item (row-major), so the same weights score every item.
struct LinearModel {
  Matrix W;
  Vector bias;
  int items = 0;

  // W, bias ~ U[-1/sqrt(p), 1/sqrt(p)].
  static LinearModel uniform_init(int n_out, int p, std::uint64_t seed);
  static LinearModel uniform_init_itemwise(int items, int p, std::uint64_t seed);
  static LinearModel zeros_like(const LinearModel& other);

  int feature_dim() const { return static_cast<int>(W.cols()); }
  // Length of x expected by predict.
  int input_dim() const { return items > 0 ? items * feature_dim() : feature_dim(); }
  int output_dim() const { return items > 0 ? items : static_cast<int>(W.rows()); }
  bool all_finite() const { return W.allFinite() && bias.allFinite(); }
};

Vector predict(const LinearModel& model, const Vector& x);

// grad += d(loss)/d(params) given d(loss)/d(c_hat) at input x.
void accumulate_gradient(const LinearModel& model, const Vector& x, const Vector& grad_c_hat,
                         LinearModel& grad);

struct AdamState {
  Matrix m_W, v_W;
  Vector m_bias, v_bias;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double lr = 0.01;
  double eps = 1e-8;

  static AdamState for_model(const LinearModel& model, double lr);
};

// Bias-corrected Adam update. Throws kNonFinite (parameters untouched) if
// any gradient entry is not finite.
void adam_step(LinearModel& params, const LinearModel& grads, AdamState& state);

}  // namespace vertexdfl

#endif  // VERTEXDFL_MODEL_HPP_
