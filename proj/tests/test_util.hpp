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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "avc/gradcheck.hpp"
#include "avc/image.hpp"
#include "avc/ops.hpp"
#include "avc/rng.hpp"

namespace avc::testing {

inline Tensor<double> random_tensor(const Shape& shape, std::uint64_t seed, bool requires_grad = true,
                                    double lo = -1.0, double hi = 1.0) {
  SplitMix64 rng(seed);
  Vec<double> v(numel(shape));
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
  return Tensor<double>(shape, std::move(v), requires_grad);
}

// Worst element-wise relative error of an op's gradients, using the loss
// sum(w * op(inputs)) with fixed random w so that the loss is linear in the
// op's output.
inline double op_gradient_error(const std::function<Tensor<double>()>& op,
                                const std::vector<std::pair<std::string, Tensor<double>>>& inputs,
                                std::uint64_t seed = 99, double step = 1e-4) {
  const Tensor<double> probe = op();
  const Tensor<double> weights = random_tensor(probe.shape(), seed, false);
  const auto entries =
      gradcheck<double>([&] { return sum(mul(op(), weights)); }, inputs, step);
  double worst = 0;
  for (const auto& e : entries) worst = std::max(worst, e.max_rel_error);
  return worst;
}

inline Image random_image(int width, int height, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Image img(width, height);
  for (auto& c : img.channels) {
    for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = static_cast<float>(rng.uniform());
  }
  return img;
}

}  // namespace avc::testing
