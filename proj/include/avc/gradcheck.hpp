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

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "avc/tensor.hpp"

namespace avc {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0;
  Index worst_index = -1;
  double norm_rel_error = 0;  // |analytic - numeric|_2 / max(|analytic|_2, |numeric|_2)
  Index checked = 0;
  Index refined = 0;  // elements re-measured with a smaller step near a kink
  double analytic_norm = 0;
};

// Compares reverse-mode gradients of a scalar loss against central
// differences, element by element. Each element's error is
// |analytic - numeric| / max(|analytic|, |numeric|, floor_ratio * max|numeric|),
// so entries that are tiny relative to the rest of the tensor are judged on
// the tensor's scale.
//
// ReLU and max-pool make the loss piecewise smooth. When the forward and
// backward one-sided differences disagree, a kink lies inside the stencil and
// the element is retried with a step ten times smaller (up to two times).
template <typename Scalar>
std::vector<GradCheckEntry> gradcheck(const std::function<Tensor<Scalar>()>& loss_fn,
                                      const std::vector<std::pair<std::string, Tensor<Scalar>>>& inputs,
                                      double step = 1e-6, double floor_ratio = 1e-3) {
  for (const auto& [name, t] : inputs) t.clear_grad();
  const Tensor<Scalar> loss = loss_fn();
  const double base = static_cast<double>(loss.item());
  backward(loss);

  std::vector<GradCheckEntry> out;
  for (const auto& [name, t] : inputs) {
    const Vec<Scalar> analytic = t.has_grad() ? t.grad() : Vec<Scalar>::Zero(t.numel());
    Vec<Scalar> numeric(t.numel());
    Index refined = 0;
    auto& value = t.node()->value;
    for (Index i = 0; i < t.numel(); ++i) {
      const Scalar saved = value[i];
      double h = step;
      for (int attempt = 0;; ++attempt) {
        value[i] = saved + static_cast<Scalar>(h);
        const double up = static_cast<double>(loss_fn().item());
        value[i] = saved - static_cast<Scalar>(h);
        const double down = static_cast<double>(loss_fn().item());
        value[i] = saved;
        numeric[i] = static_cast<Scalar>((up - down) / (2 * h));
        const double fwd = (up - base) / h, bwd = (base - down) / h;
        const double noise = 1e-13 * std::abs(base) / h;
        if (attempt == 2 || std::abs(fwd - bwd) <= 1e-4 * std::max(std::abs(fwd), std::abs(bwd)) + noise) break;
        h /= 10;
        if (attempt == 0) ++refined;
      }
    }
    GradCheckEntry e{name, 0.0, -1, 0.0, t.numel(), refined, static_cast<double>(analytic.norm())};
    const double scale = std::max(static_cast<double>(analytic.norm()), static_cast<double>(numeric.norm()));
    e.norm_rel_error = scale > 0 ? static_cast<double>((analytic - numeric).norm()) / scale : 0.0;
    const double floor = floor_ratio * static_cast<double>(numeric.cwiseAbs().maxCoeff());
    for (Index i = 0; i < t.numel(); ++i) {
      const double a = static_cast<double>(analytic[i]), n = static_cast<double>(numeric[i]);
      const double denom = std::max({std::abs(a), std::abs(n), floor});
      const double rel = denom > 0 ? std::abs(a - n) / denom : 0.0;
      if (rel > e.max_rel_error || e.worst_index < 0) {
        e.max_rel_error = rel;
        e.worst_index = i;
      }
    }
    out.push_back(e);
    t.clear_grad();
  }
  return out;
}

}  // namespace avc
