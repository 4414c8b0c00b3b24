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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "avc/brisque.hpp"
#include "avc/errors.hpp"
#include "avc/image.hpp"
#include "avc/rng.hpp"
#include "test_util.hpp"

namespace avc {
namespace {

Eigen::ArrayXd gaussian_samples(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::ArrayXd x(n);
  for (auto& v : x) v = normal(rng);
  return x;
}

// Moment matching by a dense grid search over the shape, using tgamma.
double grid_shape(const Eigen::ArrayXd& x) {
  const double rho = x.abs().mean() * x.abs().mean() / x.square().mean();
  double best = 0, best_err = 1e300;
  for (double a = 0.2; a <= 10.0; a += 1e-4) {
    const double r = std::tgamma(2 / a) * std::tgamma(2 / a) / (std::tgamma(1 / a) * std::tgamma(3 / a));
    if (std::abs(r - rho) < best_err) {
      best_err = std::abs(r - rho);
      best = a;
    }
  }
  return best;
}

TEST(Brisque, GgdFitOfGaussianData) {
  const Eigen::ArrayXd x = gaussian_samples(50000, 1);
  const GgdFit fit = fit_ggd(x);
  EXPECT_GE(fit.shape, 1.8);
  EXPECT_LE(fit.shape, 2.2);
  EXPECT_NEAR(fit.shape, grid_shape(x), 2e-4);
  EXPECT_NEAR(fit.variance, x.square().mean(), 1e-12);
}

TEST(Brisque, GgdFitOfLaplacianData) {
  SplitMix64 rng(2);
  Eigen::ArrayXd x(50000);
  for (auto& v : x) v = (rng.uniform() < 0.5 ? -1 : 1) * -std::log(1.0 - rng.uniform());
  EXPECT_NEAR(fit_ggd(x).shape, grid_shape(x), 2e-4);
  EXPECT_NEAR(fit_ggd(x).shape, 1.0, 0.1);
}

TEST(Brisque, AggdOfSymmetricData) {
  const AggdFit a = fit_aggd(gaussian_samples(50000, 3));
  EXPECT_NEAR(a.shape, 2.0, 0.2);
  EXPECT_NEAR(a.mean, 0.0, 0.05);
  EXPECT_NEAR(a.left_variance / a.right_variance, 1.0, 0.05);
}

// Direct 7x7 window sums with clamped borders.
Eigen::ArrayXXd brute_force_mscn(const Eigen::ArrayXXd& g) {
  const double s2 = 2.0 * (7.0 / 6.0) * (7.0 / 6.0);
  double total = 0;
  for (int dy = -3; dy <= 3; ++dy) {
    for (int dx = -3; dx <= 3; ++dx) total += std::exp(-(dx * dx + dy * dy) / s2);
  }
  const Eigen::Index h = g.rows(), w = g.cols();
  Eigen::ArrayXXd out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      double m = 0, m2 = 0;
      for (int dy = -3; dy <= 3; ++dy) {
        for (int dx = -3; dx <= 3; ++dx) {
          const double v = g(std::clamp<Eigen::Index>(y + dy, 0, h - 1), std::clamp<Eigen::Index>(x + dx, 0, w - 1));
          const double k = std::exp(-(dx * dx + dy * dy) / s2) / total;
          m += k * v;
          m2 += k * v * v;
        }
      }
      out(y, x) = (g(y, x) - m) / (std::sqrt(std::abs(m2 - m * m)) + 1.0);
    }
  }
  return out;
}

TEST(Brisque, MscnMatchesDirectWindowSums) {
  SplitMix64 rng(4);
  Eigen::ArrayXXd g(40, 56);
  for (auto& v : g.reshaped()) v = 255.0 * rng.uniform();
  EXPECT_TRUE(mscn_coefficients(g).isApprox(brute_force_mscn(g), 1e-10));
}

TEST(Brisque, NoiseImageMscnIsLightTailed) {
  // Each coefficient is normalised by a window that contains itself, which
  // bounds |mscn| and pushes the fitted shape of white noise to about 3.
  SplitMix64 rng(5);
  std::normal_distribution<double> normal(0.5, 0.08);
  Image img(128, 128);
  for (Eigen::Index i = 0; i < img.channels[0].size(); ++i) {
    const float v = static_cast<float>(std::clamp(normal(rng), 0.0, 1.0));
    for (auto& c : img.channels) c.data()[i] = v;
  }
  const BrisqueFeatures f = brisque_features(img);
  const Eigen::ArrayXXd m = brute_force_mscn(luma(img).cast<double>() * 255.0);
  EXPECT_NEAR(f[0], grid_shape(m.reshaped()), 1e-3);
  EXPECT_GT(f[0], 2.5);
  EXPECT_LT(f[0], 3.5);
}

TEST(Brisque, ConstantImageGivesZeroFeatures) {
  const Image img(40, 40, 0.6f);
  const Eigen::ArrayXXd m = mscn_coefficients(Eigen::ArrayXXd::Constant(40, 40, 153.0));
  EXPECT_TRUE((m.abs() < 1e-9).all());
  EXPECT_TRUE(brisque_features(img).isZero());
}

TEST(Brisque, FeatureVectorIsFiniteWith36Entries) {
  const BrisqueFeatures f = brisque_features(testing::random_image(64, 48, 5));
  EXPECT_EQ(f.size(), 36);
  EXPECT_TRUE(f.allFinite());
}

TEST(Brisque, SmallImageIsAnInputError) {
  EXPECT_THROW(brisque_features(Image(31, 64)), InputError);
}

TEST(Brisque, LinearModelScore) {
  const auto path = std::filesystem::temp_directory_path() / "avc_brisque_model.txt";
  {
    std::ofstream os(path);
    os << "10\n";
    for (int i = 0; i < 36; ++i) os << (i == 0 ? 2.0 : 0.0) << "\n";
  }
  const BrisqueModel m = BrisqueModel::load(path);
  BrisqueFeatures f = BrisqueFeatures::Zero();
  f[0] = 3;
  EXPECT_DOUBLE_EQ(m.score(f), 100.0 - 16.0);
  const QualityReport q = quality_report(Image(40, 40, 0.5f), Image(40, 40, 0.5f), &m);
  EXPECT_TRUE(std::isinf(q.psnr));
  ASSERT_TRUE(q.brisque_score.has_value());
  EXPECT_DOUBLE_EQ(*q.brisque_score, 90.0);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace avc
