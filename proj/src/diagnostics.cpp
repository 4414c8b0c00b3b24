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

#include "avc/diagnostics.hpp"

#include <algorithm>

#include "avc/model.hpp"
#include "avc/synth.hpp"

namespace avc {

ModelConfig desk_model_config(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.base_width = 0.25;
  cfg.seed = seed;
  return cfg;
}

ModelGradCheck model_gradcheck(std::uint64_t seed, double step) {
  SceneSpec spec;
  spec.width = 32;
  spec.height = 32;
  spec.max_count = 5;
  spec.seed = seed;
  const Sample sample = make_sample(generate_scene(spec, 0));

  AvcModel<double> model(desk_model_config(seed));
  SplitMix64 rng(mix_seed(seed, 0x6C0DEULL));
  for (const auto& [name, t] : model.named_parameters()) {
    const bool moved = name.rfind("film.", 0) == 0 || name.rfind("head.", 0) == 0 ||
                       name.find(".bias") != std::string::npos;
    if (!moved) continue;
    Vec<double>& v = t.node()->value;
    for (Index i = 0; i < v.size(); ++i) v[i] += rng.uniform(-0.1, 0.1);
  }

  const Tensor<double> image = image_to_tensor<double>(sample.image);
  const Tensor<double> patch = patch_to_tensor<double>(sample.patch);
  const Tensor<double> target = density_to_tensor<double>(sample.density);
  ModelGradCheck out;
  out.entries = gradcheck<double>([&] { return sse_loss(model.forward(image, patch), target); },
                                  model.named_parameters(), step);
  for (const auto& e : out.entries) {
    out.worst_norm_rel_error = std::max(out.worst_norm_rel_error, e.norm_rel_error);
    out.worst_max_rel_error = std::max(out.worst_max_rel_error, e.max_rel_error);
  }
  return out;
}

}  // namespace avc
