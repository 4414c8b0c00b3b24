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

#include <cstdint>
#include <vector>

#include "avc/config.hpp"
#include "avc/gradcheck.hpp"

namespace avc {

// Desk-scale model used for end-to-end gradient checks: every width <= 16.
ModelConfig desk_model_config(std::uint64_t seed);

struct ModelGradCheck {
  std::vector<GradCheckEntry> entries;
  double worst_norm_rel_error = 0;
  double worst_max_rel_error = 0;
};

// Full audiovisual model in double precision on a 32x32 synthetic scene with
// its log-mel patch. Biases, the density head and the modulation layers are
// jittered away from their initial values first so the check runs at a generic
// point rather than on ReLU kinks, a zero head and the identity modulation.
ModelGradCheck model_gradcheck(std::uint64_t seed, double step = 1e-6);

}  // namespace avc
