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

#include <Eigen/Core>

#include <filesystem>
#include <optional>

#include "avc/image.hpp"

namespace avc {

inline constexpr int kBrisqueFeatures = 36;

using BrisqueFeatures = Eigen::Matrix<double, kBrisqueFeatures, 1>;

// Mean-subtracted contrast-normalized coefficients of a grayscale plane on
// the 0..255 scale: (I - mu) / (sigma + 1) with a 7x7 Gaussian window.
Eigen::ArrayXXd mscn_coefficients(const Eigen::ArrayXXd& gray);

struct GgdFit {
  double shape = 0;
  double variance = 0;
};

struct AggdFit {
  double shape = 0;
  double mean = 0;
  double left_variance = 0;
  double right_variance = 0;
};

// Moment-matching fits. A zero-variance sample fits to all zeros.
GgdFit fit_ggd(const Eigen::ArrayXd& x);
AggdFit fit_aggd(const Eigen::ArrayXd& x);

// 18 statistics per scale at two scales. Requires min(W,H) >= 32.
BrisqueFeatures brisque_features(const Image& img);

// Linear proxy for the quality regressor: text file with the intercept on the
// first line followed by 36 weights.
struct BrisqueModel {
  double intercept = 0;
  BrisqueFeatures weights = BrisqueFeatures::Zero();

  static BrisqueModel load(const std::filesystem::path& path);
  // Reported as 100 - raw so that higher means better quality.
  double score(const BrisqueFeatures& f) const { return 100.0 - (intercept + weights.dot(f)); }
};

struct QualityReport {
  double psnr = 0;
  BrisqueFeatures brisque_features = BrisqueFeatures::Zero();
  std::optional<double> brisque_score;
};

QualityReport quality_report(const Image& reference, const Image& degraded, const BrisqueModel* model = nullptr);

}  // namespace avc
