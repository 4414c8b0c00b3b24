// Copyright 2026 The avc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "avc/tensor.hpp"

namespace avc {

struct AdamOptions {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // L2 coupled into the gradient
};

template <typename Scalar>
struct AdamState {
  AdamOptions options;
  std::vector<Vec<Scalar>> m;
  std::vector<Vec<Scalar>> v;
  long step = 0;
};

// One Adam update with bias correction over params (same order every call).
// Weight decay is added to the gradient before the moment update. Gradients
// are cleared afterwards.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, std::span<const Tensor<Scalar>> params) {
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const auto& p : params) {
      state.m.push_back(Vec<Scalar>::Zero(p.numel()));
      state.v.push_back(Vec<Scalar>::Zero(p.numel()));
    }
  }
  if (state.m.size() != params.size()) {
    throw ContractError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                        " parameters, got " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw ContractError("adam_step: parameter #" + std::to_string(i) + " " + to_string(params[i].shape()) +
                          " has no gradient");
    }
    if (state.m[i].size() != params[i].numel()) {
      throw ContractError("adam_step: moment shape mismatch for parameter #" + std::to_string(i));
    }
  }

  const auto& o = state.options;
  ++state.step;
  const Scalar b1 = static_cast<Scalar>(o.beta1);
  const Scalar b2 = static_cast<Scalar>(o.beta2);
  const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(o.beta1, static_cast<double>(state.step)));
  const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(o.beta2, static_cast<double>(state.step)));
  const Scalar lr = static_cast<Scalar>(o.lr);
  const Scalar eps = static_cast<Scalar>(o.eps);
  const Scalar wd = static_cast<Scalar>(o.weight_decay);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<Scalar> p = params[i];
    auto w = p.mutable_value().array();
    const auto g = (p.grad().array() + wd * w).eval();
    auto m = state.m[i].array();
    auto v = state.v[i].array();
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * (g * g);
    w = w - lr * (m / c1) / ((v / c2).sqrt() + eps);
    p.clear_grad();
  }
}

}  // namespace avc
