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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "avc/adam.hpp"
#include "avc/audio.hpp"
#include "avc/corruption.hpp"
#include "avc/density.hpp"
#include "avc/image.hpp"
#include "avc/model.hpp"

namespace avc {

// One labelled scene, with its density target and log-mel patch precomputed.
struct Sample {
  Image image;
  DensityMap density;
  LogMelPatch patch;
  double count = 0;
};

using Dataset = std::vector<Sample>;

struct TrainConfig {
  double lr = 1e-5;
  double lr_decay = 0.99;  // multiplicative, per epoch
  double weight_decay = 1e-4;
  int batch_size = 4;
  int max_epochs = 500;
  std::uint64_t seed = 0;
  std::optional<CorruptionSpec> corruption;  // applied to train and val images

  void validate() const;
};

struct CountPair {
  double truth = 0;
  double predicted = 0;
};

struct EvalResult {
  double mae = 0;
  double mse = 0;  // root mean square error
  std::vector<CountPair> per_sample;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double val_mae = 0;
  double val_mse = 0;
};

struct TrainResult {
  Checkpoint best_checkpoint;
  int best_epoch = -1;
  double best_val_mae = std::numeric_limits<double>::infinity();
  std::vector<EpochRecord> history;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MAE and root-mean-square error over per-image counts.
EvalResult compute_metrics(std::span<const CountPair> pairs);

// Density target matching an image that may have been resized by low_res;
// total mass is preserved.
DensityMap resample_density(const DensityMap& map, int width, int height);

// Corrupted image for a sample; `stream` selects the per-sample seed.
Image corrupted_image(const Image& img, const std::optional<CorruptionSpec>& spec, std::uint64_t stream);

void write_history_csv(const std::filesystem::path& path, std::span<const EpochRecord> history);
std::string history_csv(std::span<const EpochRecord> history);
void write_eval_csv(const std::filesystem::path& path, const EvalResult& result);

template <typename Scalar>
double predict_count(const AvcModel<Scalar>& model, const Image& image, const LogMelPatch& patch) {
  std::optional<LogMelPatch> p;
  if (model.config().audio_enabled) p = patch;
  return static_cast<double>(model.forward(image, p).value().sum());
}

// Counts every sample (optionally corrupted with per-sample seeds derived from
// the spec seed and the sample index) and reports Eq.-style MAE / RMSE.
template <typename Scalar>
EvalResult evaluate(const AvcModel<Scalar>& model, const Dataset& data,
                    const std::optional<CorruptionSpec>& corruption = std::nullopt) {
  if (data.empty()) throw InputError("evaluate: empty dataset");
  std::vector<CountPair> pairs;
  pairs.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Image img = corrupted_image(data[i].image, corruption, i);
    pairs.push_back({data[i].count, predict_count(model, img, data[i].patch)});
  }
  return compute_metrics(pairs);
}

namespace detail {

inline std::uint64_t train_stream(std::uint64_t epoch, std::uint64_t index) {
  return mix_seed(0x7A11ULL + epoch, index) | (1ULL << 63);
}

template <typename Scalar>
double grad_norm(std::span<const Tensor<Scalar>> params) {
  double s = 0;
  for (const auto& p : params) {
    if (p.has_grad()) s += static_cast<double>(p.grad().squaredNorm());
  }
  return std::sqrt(s);
}

}  // namespace detail

using EpochCallback = std::function<void(const EpochRecord&)>;

// Adam on the per-image sum of squared density errors, averaged over each
// batch. The learning rate decays once per epoch; after every epoch the model
// is validated and the checkpoint with the lowest validation MAE is kept.
template <typename Scalar>
TrainResult train(AvcModel<Scalar>& model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (train_set.empty() || val_set.empty()) throw InputError("train: training and validation sets must be nonempty");

  const std::vector<Tensor<Scalar>> params = model.parameters();
  AdamState<Scalar> adam;
  adam.options.lr = cfg.lr;
  adam.options.weight_decay = cfg.weight_decay;

  SplitMix64 shuffle_rng(mix_seed(cfg.seed, 0x5F1FULL));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    adam.options.lr = cfg.lr * std::pow(cfg.lr_decay, epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(shuffle_rng() % i)]);
    }

    double epoch_loss = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const Scalar inv = Scalar(1) / static_cast<Scalar>(end - start);
      double batch_loss = 0;
      for (std::size_t j = start; j < end; ++j) {
        const Sample& s = train_set[order[j]];
        const Image img = corrupted_image(s.image, cfg.corruption, detail::train_stream(epoch, order[j]));
        const DensityMap target = resample_density(s.density, img.width(), img.height());
        std::optional<LogMelPatch> patch;
        if (model.config().audio_enabled) patch = s.patch;
        const Tensor<Scalar> pred = model.forward(img, patch);
        const Tensor<Scalar> loss = sse_loss(pred, density_to_tensor<Scalar>(target));
        const double lv = static_cast<double>(loss.item());
        if (!std::isfinite(lv)) {
          std::ostringstream os;
          os << "non-finite loss at epoch " << epoch << ", batch " << batch << ", sample " << order[j]
             << "; accumulated grad norm " << detail::grad_norm<Scalar>(params);
          throw TrainingDiverged(os.str());
        }
        batch_loss += lv;
        backward(scale(loss, inv));
      }
      adam_step<Scalar>(adam, params);
      epoch_loss += batch_loss;
    }

    const EvalResult val = evaluate(model, val_set, cfg.corruption);
    EpochRecord rec{epoch + 1, adam.options.lr, epoch_loss / static_cast<double>(order.size()), val.mae, val.mse};
    result.history.push_back(rec);
    if (val.mae < result.best_val_mae) {
      result.best_val_mae = val.mae;
      result.best_epoch = epoch + 1;
      result.best_checkpoint = model.checkpoint();
    }
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace avc
