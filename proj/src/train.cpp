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

#include "avc/train.hpp"

#include <fstream>
#include <iomanip>

namespace avc {

void TrainConfig::validate() const {
  if (!(lr > 0)) throw SpecError("learning rate must be positive");
  if (!(lr_decay > 0 && lr_decay <= 1)) throw SpecError("lr_decay must lie in (0,1]");
  if (!(weight_decay >= 0)) throw SpecError("weight decay must be >= 0");
  if (batch_size < 1) throw SpecError("batch size must be >= 1");
  if (max_epochs < 1) throw SpecError("max_epochs must be >= 1");
  if (corruption) corruption->validate();
}

EvalResult compute_metrics(std::span<const CountPair> pairs) {
  if (pairs.empty()) throw InputError("compute_metrics: no samples");
  EvalResult r;
  double abs_sum = 0, sq_sum = 0;
  for (const auto& p : pairs) {
    const double e = std::abs(p.truth - p.predicted);
    abs_sum += e;
    sq_sum += e * e;
  }
  const auto n = static_cast<double>(pairs.size());
  r.mae = abs_sum / n;
  r.mse = std::sqrt(sq_sum / n);
  r.per_sample.assign(pairs.begin(), pairs.end());
  return r;
}

DensityMap resample_density(const DensityMap& map, int width, int height) {
  if (map.cols() == width && map.rows() == height) return map;
  if (width > map.cols() || height > map.rows() || width < 1 || height < 1) {
    throw DimensionError("resample_density: can only shrink a density map");
  }
  auto sum_matrix = [](Index n, Index m) {
    // Each source cell's mass is split across the target cells it overlaps.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    const double scale = static_cast<double>(n) / static_cast<double>(m);
    for (Index i = 0; i < m; ++i) {
      const double lo = static_cast<double>(i) * scale, hi = static_cast<double>(i + 1) * scale;
      for (auto j = static_cast<Index>(std::floor(lo)); j < n && static_cast<double>(j) < hi; ++j) {
        const double overlap = std::min<double>(hi, static_cast<double>(j + 1)) - std::max<double>(lo, static_cast<double>(j));
        if (overlap > 0) a(i, j) = overlap;
      }
    }
    return a;
  };
  const Eigen::MatrixXd ry = sum_matrix(map.rows(), height);
  const Eigen::MatrixXd rx = sum_matrix(map.cols(), width);
  return ry * map * rx.transpose();
}

Image corrupted_image(const Image& img, const std::optional<CorruptionSpec>& spec, std::uint64_t stream) {
  if (!spec) return img;
  return apply_corruption(img, spec->for_sample(stream));
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::ostringstream os;
  os << "epoch,lr,train_loss,val_mae,val_mse\n" << std::setprecision(10);
  for (const auto& r : history) {
    os << r.epoch << ',' << r.lr << ',' << r.train_loss << ',' << r.val_mae << ',' << r.val_mse << '\n';
  }
  return os.str();
}

void write_history_csv(const std::filesystem::path& path, std::span<const EpochRecord> history) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << history_csv(history);
  if (!os) throw IoError("failed writing " + path.string());
}

void write_eval_csv(const std::filesystem::path& path, const EvalResult& result) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "index,count,predicted,abs_error\n" << std::setprecision(10);
  for (std::size_t i = 0; i < result.per_sample.size(); ++i) {
    const auto& p = result.per_sample[i];
    os << i << ',' << p.truth << ',' << p.predicted << ',' << std::abs(p.truth - p.predicted) << '\n';
  }
  os << "summary,mae=" << result.mae << ",mse=" << result.mse << ",n=" << result.per_sample.size() << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace avc
