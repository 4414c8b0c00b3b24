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
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "avc/audio.hpp"
#include "avc/config.hpp"
#include "avc/density.hpp"
#include "avc/image.hpp"
#include "avc/ops.hpp"
#include "avc/rng.hpp"
#include "avc/serialize.hpp"

namespace avc {

// Feature-wise modulation for one fusion block.
template <typename Scalar>
struct FilmParams {
  Tensor<Scalar> gamma;
  Tensor<Scalar> beta;
  int block = 0;
};

template <typename Scalar>
Tensor<Scalar> image_to_tensor(const Image& img) {
  const Index h = img.height(), w = img.width();
  Vec<Scalar> v(3 * h * w);
  for (int c = 0; c < 3; ++c) {
    v.segment(c * h * w, h * w) =
        Eigen::Map<const Vec<float>>(img.channels[c].data(), h * w).template cast<Scalar>();
  }
  return Tensor<Scalar>({3, h, w}, std::move(v));
}

template <typename Scalar>
Tensor<Scalar> patch_to_tensor(const LogMelPatch& patch) {
  Vec<Scalar> v = Eigen::Map<const Vec<double>>(patch.data(), patch.size()).template cast<Scalar>();
  return Tensor<Scalar>({1, patch.rows(), patch.cols()}, std::move(v));
}

template <typename Scalar>
Tensor<Scalar> density_to_tensor(const DensityMap& map) {
  Vec<Scalar> v = Eigen::Map<const Vec<double>>(map.data(), map.size()).template cast<Scalar>();
  return Tensor<Scalar>({1, map.rows(), map.cols()}, std::move(v));
}

// Audiovisual counting network: VGG-style visual frontend, VGG-like audio
// CNN, six dilated fusion blocks modulated by audio-driven (gamma, beta), a
// 1x1 density head and x8 bilinear upsampling.
template <typename Scalar>
class AvcModel {
 public:
  using TensorT = Tensor<Scalar>;

  explicit AvcModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    build();
  }

  const ModelConfig& config() const { return cfg_; }

  // [3,H,W] -> [C,H/8,W/8].
  TensorT visual_forward(const TensorT& image) const {
    if (image.rank() != 3 || image.dim(0) != 3 || image.dim(1) % 8 != 0 || image.dim(2) % 8 != 0) {
      throw DimensionError("visual_forward: expected [3,H,W] with H and W divisible by 8, got " +
                           to_string(image.shape()));
    }
    return run_stack(image, visual_, cfg_.visual_layers);
  }

  // [1,96,64] log-mel patch -> [C,Wa,Ha].
  TensorT audio_forward(const TensorT& patch) const {
    if (patch.shape() != Shape{1, audio::kPatchFrames, audio::kMelBands}) {
      throw DimensionError("audio_forward: expected [1,96,64] patch, got " + to_string(patch.shape()));
    }
    if (!cfg_.audio_enabled) throw ContractError("audio_forward on a model built without audio");
    return run_stack(patch, audio_, cfg_.audio_layers);
  }

  FilmParams<Scalar> film_params(const TensorT& audio_features, int block) const {
    if (block < 0 || block >= 6) throw ContractError("film_params: block index must be in 0..5");
    return film_from_pooled(global_avg_pool(audio_features), block);
  }

  // Identity modulation used by the vision-only variant.
  FilmParams<Scalar> identity_film(int block) const {
    const Index c = cfg_.backend_channels(block);
    return {TensorT::constant({c}, Scalar(1)), TensorT::zeros({c}), block};
  }

  // relu(gamma * dilated_conv(v) + beta).
  TensorT fusion_block(const TensorT& v, const FilmParams<Scalar>& film, int block) const {
    const auto& conv = backend_.at(static_cast<std::size_t>(block));
    return relu(elementwise_affine(conv2d(v, conv.weight, conv.bias, 2, 2), film.gamma, film.beta));
  }

  // Output of the last fusion block, [C,H/8,W/8]. `patch` is required iff
  // audio is enabled.
  TensorT backend_forward(const TensorT& image, const std::optional<TensorT>& patch) const {
    if (cfg_.audio_enabled && !patch) throw ContractError("model_forward: audio enabled but no clip given");
    TensorT v = visual_forward(image);
    std::optional<TensorT> pooled;
    if (cfg_.audio_enabled) pooled = global_avg_pool(audio_forward(*patch));
    for (int l = 0; l < 6; ++l) {
      const FilmParams<Scalar> film = pooled ? film_from_pooled(*pooled, l) : identity_film(l);
      v = fusion_block(v, film, l);
    }
    return v;
  }

  // Density map [1,H,W].
  TensorT forward(const TensorT& image, const std::optional<TensorT>& patch) const {
    return upsample_bilinear(conv2d(backend_forward(image, patch), head_.weight, head_.bias), 8);
  }

  TensorT forward(const Image& image, const std::optional<LogMelPatch>& patch) const {
    std::optional<TensorT> p;
    if (patch) p = patch_to_tensor<Scalar>(*patch);
    return forward(image_to_tensor<Scalar>(image), p);
  }

  // All parameters in a fixed order, with their names.
  const std::vector<std::pair<std::string, TensorT>>& named_parameters() const { return params_; }

  std::vector<TensorT> parameters() const {
    std::vector<TensorT> out;
    for (const auto& [name, t] : params_) out.push_back(t);
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : params_) n += static_cast<std::size_t>(t.numel());
    return n;
  }

  Checkpoint checkpoint() const {
    Checkpoint ckpt;
    for (const auto& [name, t] : params_) ckpt.emplace_back(name, to_stored(t));
    return ckpt;
  }

  void load(const Checkpoint& ckpt) {
    std::map<std::string, const StoredTensor*> by_name;
    for (const auto& [name, t] : ckpt) by_name[name] = &t;
    for (auto& [name, t] : params_) {
      const auto it = by_name.find(name);
      if (it == by_name.end()) throw FormatError("checkpoint is missing parameter " + name);
      TensorT loaded = from_stored<Scalar>(*it->second);
      if (loaded.shape() != t.shape()) {
        throw DimensionError("checkpoint parameter " + name + " has shape " + to_string(loaded.shape()) +
                             ", model expects " + to_string(t.shape()));
      }
      t.mutable_value() = loaded.value();
    }
    if (by_name.size() != params_.size()) throw FormatError("checkpoint holds parameters this model does not have");
  }

 private:
  struct Linear {
    TensorT weight;
    TensorT bias;
  };

  TensorT run_stack(TensorT x, const std::vector<Linear>& convs, const std::vector<int>& layers) const {
    std::size_t conv = 0;
    for (int layer : layers) {
      if (layer == kPool) {
        x = max_pool2(x);
      } else {
        const auto& c = convs[conv++];
        x = relu(conv2d(x, c.weight, c.bias, 1, 1));
      }
    }
    return x;
  }

  TensorT apply_fc(const TensorT& x, const std::vector<Linear>& stack) const {
    TensorT h = x;
    for (std::size_t i = 0; i < stack.size(); ++i) {
      h = fully_connected(h, stack[i].weight, stack[i].bias);
      if (i + 1 < stack.size()) h = relu(h);
    }
    return h;
  }

  FilmParams<Scalar> film_from_pooled(const TensorT& pooled, int block) const {
    const Index c = cfg_.backend_channels(block);
    const std::size_t idx = cfg_.film_shared ? 0 : static_cast<std::size_t>(block);
    TensorT gamma = apply_fc(pooled, film_gamma_.at(idx));
    TensorT beta = apply_fc(pooled, film_beta_.at(idx));
    if (cfg_.film_shared) {
      gamma = slice_front(gamma, c);
      beta = slice_front(beta, c);
    }
    return {gamma, beta, block};
  }

  TensorT& add_param(const std::string& name, Shape shape, double bound) {
    SplitMix64 rng(mix_seed(cfg_.seed, hash_name(name)));
    Vec<Scalar> v(avc::numel(shape));
    for (Index i = 0; i < v.size(); ++i) v[i] = static_cast<Scalar>(rng.uniform(-bound, bound));
    params_.emplace_back(name, TensorT(std::move(shape), std::move(v), true));
    return params_.back().second;
  }

  // He-uniform weights (variance 2 / fan_in) scaled by `gain`, constant bias.
  Linear add_conv(const std::string& name, Index cout, Index cin, Index k, double gain = 1.0,
                  double bias = kReluBias) {
    const double bound = gain * std::sqrt(6.0 / static_cast<double>(cin * k * k));
    Linear l;
    l.weight = add_param(name + ".weight", {cout, cin, k, k}, bound);
    l.bias = add_param(name + ".bias", {cout}, 0.0);
    l.bias.mutable_value().setConstant(static_cast<Scalar>(bias));
    return l;
  }

  // FC stack producing gamma or beta; the last layer starts at weight 0 and
  // bias `init` so the modulation begins as the identity.
  std::vector<Linear> add_film(const std::string& name, Index in, Index out, Scalar init) {
    std::vector<Linear> stack;
    Index width = in;
    if (cfg_.film_hidden > 0) {
      const double bound = std::sqrt(6.0 / static_cast<double>(in));
      Linear l;
      l.weight = add_param(name + ".hidden.weight", {cfg_.film_hidden, in}, bound);
      l.bias = add_param(name + ".hidden.bias", {cfg_.film_hidden}, 0.0);
      stack.push_back(l);
      width = cfg_.film_hidden;
    }
    Linear last;
    last.weight = add_param(name + ".weight", {out, width}, 0.0);
    last.bias = add_param(name + ".bias", {out}, 0.0);
    last.bias.mutable_value().setConstant(init);
    stack.push_back(last);
    return stack;
  }

  void build() {
    Index ch = 3;
    for (int layer : cfg_.visual_layers) {
      if (layer == kPool) continue;
      const Index w = cfg_.scaled(layer);
      visual_.push_back(add_conv("visual.conv" + std::to_string(visual_.size()), w, ch, 3));
      ch = w;
    }
    for (int l = 0; l < 6; ++l) {
      const Index w = cfg_.backend_channels(l);
      backend_.push_back(add_conv("backend.block" + std::to_string(l), w, ch, 3));
      ch = w;
    }
    // Zero head: a fresh model predicts an empty map. Starting from a random
    // head the first updates overshoot the count and drive the last backend
    // block's ReLUs off for good.
    head_ = add_conv("head", 1, ch, 1, 0.0, 0.0);

    if (!cfg_.audio_enabled) return;
    Index ach = 1;
    for (int layer : cfg_.audio_layers) {
      if (layer == kPool) continue;
      const Index w = cfg_.scaled(layer);
      audio_.push_back(add_conv("audio.conv" + std::to_string(audio_.size()), w, ach, 3));
      ach = w;
    }
    if (cfg_.film_shared) {
      Index widest = 0;
      for (int l = 0; l < 6; ++l) widest = std::max<Index>(widest, cfg_.backend_channels(l));
      film_gamma_.push_back(add_film("film.gamma", ach, widest, Scalar(1)));
      film_beta_.push_back(add_film("film.beta", ach, widest, Scalar(0)));
    } else {
      for (int l = 0; l < 6; ++l) {
        const Index w = cfg_.backend_channels(l);
        film_gamma_.push_back(add_film("film.gamma" + std::to_string(l), ach, w, Scalar(1)));
        film_beta_.push_back(add_film("film.beta" + std::to_string(l), ach, w, Scalar(0)));
      }
    }
  }

  // Small positive bias on every ReLU conv. With zero biases a black image
  // gives exactly zero pre-activations in every block, where the ReLU passes
  // no gradient and only the head bias can learn.
  static constexpr double kReluBias = 0.01;

  ModelConfig cfg_;
  std::vector<std::pair<std::string, TensorT>> params_;
  std::vector<Linear> visual_;
  std::vector<Linear> audio_;
  std::vector<Linear> backend_;
  Linear head_;
  std::vector<std::vector<Linear>> film_gamma_;
  std::vector<std::vector<Linear>> film_beta_;
};

}  // namespace avc
