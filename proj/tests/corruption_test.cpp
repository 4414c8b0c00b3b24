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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "avc/corruption.hpp"
#include "avc/errors.hpp"
#include "test_util.hpp"

namespace avc {
namespace {

using testing::random_image;

double mean_of(const Image& img) {
  double s = 0;
  for (const auto& c : img.channels) s += c.cast<double>().sum();
  return s / (3.0 * img.width() * img.height());
}

Image shifted(const Image& img, float delta) {
  Image out = img;
  for (auto& c : out.channels) c += delta;
  return out;
}

TEST(Darken, ZeroBrightnessIsBlack) {
  const Image out = darken(random_image(16, 8, 1), 0.0, 3, true).image;
  for (const auto& c : out.channels) EXPECT_TRUE((c == 0.0f).all());
}

TEST(Darken, DeterministicUnitBrightnessIsIdentity) {
  const Image img = random_image(16, 8, 2);
  const DarkenResult r = darken(img, 1.0, 3, true);
  EXPECT_TRUE(r.image == img);
  EXPECT_EQ(r.rate, 1.0);
}

TEST(Darken, HalfOfConstant) {
  const Image out = darken(Image(4, 4, 0.8f), 0.5, 0, true).image;
  for (const auto& c : out.channels) EXPECT_TRUE(c.isApproxToConstant(0.4f, 1e-7f));
}

TEST(Darken, RandomRateIsBelowR) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DarkenResult r = darken(Image(2, 2, 1.0f), 0.3, seed, false);
    EXPECT_GE(r.rate, 0.0);
    EXPECT_LE(r.rate, 0.3);
    EXPECT_FLOAT_EQ(r.image.channels[0](0, 0), static_cast<float>(r.rate));
  }
}

TEST(Darken, ComposesMultiplicatively) {
  const Image img = random_image(16, 16, 4);
  const Image twice = darken(darken(img, 0.5, 0, true).image, 0.25, 0, true).image;
  const Image once = darken(img, 0.125, 0, true).image;
  EXPECT_TRUE(twice == once);
}

TEST(Darken, OutOfRangeIsASpecError) {
  EXPECT_THROW(darken(Image(2, 2), 1.5, 0, true), SpecError);
  EXPECT_THROW(darken(Image(2, 2), -0.1, 0, false), SpecError);
}

TEST(Noise, ZeroSigmaIsIdentity) {
  const Image img = random_image(8, 8, 5);
  EXPECT_TRUE(add_noise(img, std::nullopt, 0.0, 1) == img);
}

TEST(Noise, FixedSigmaReproducesItsStd) {
  const Image img(256, 256, 0.5f);
  const Image out = add_noise(img, std::nullopt, 25.0 / 255.0, 7);
  double s = 0, ss = 0;
  long n = 0;
  for (const auto& c : out.channels) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double d = c.data()[i] - 0.5;
      s += d;
      ss += d * d;
      ++n;
    }
  }
  const double sd = std::sqrt(ss / n - (s / n) * (s / n));
  EXPECT_NEAR(sd, 25.0 / 255.0, 0.05 * 25.0 / 255.0);
}

TEST(Noise, OutputIsClamped) {
  const Image out = add_noise(Image(64, 64, 0.95f), std::nullopt, 0.3, 8);
  for (const auto& c : out.channels) {
    EXPECT_GE(c.minCoeff(), 0.0f);
    EXPECT_LE(c.maxCoeff(), 1.0f);
  }
}

TEST(Noise, NeedsALevel) {
  EXPECT_THROW(add_noise(Image(2, 2), std::nullopt, std::nullopt, 0), SpecError);
}

TEST(Noise, RandomVarianceIsUniform) {
  // One-sample Kolmogorov-Smirnov test of sigma^2 against U(0, (B/255)^2).
  constexpr int n = 10000;
  const double top = (50.0 / 255.0) * (50.0 / 255.0);
  SplitMix64 rng(2024);
  std::vector<double> v(n);
  for (double& x : v) {
    const double s = sample_noise_sigma(50.0, rng);
    x = s * s / top;
  }
  std::sort(v.begin(), v.end());
  double d = 0;
  for (int i = 0; i < n; ++i) d = std::max({d, (i + 1.0) / n - v[i], v[i] - static_cast<double>(i) / n});
  EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));  // alpha = 0.01
}

TEST(Occlude, ZeroRateIsIdentity) {
  const Image img = random_image(20, 10, 9);
  const OcclusionResult r = occlude(img, 0.0, 1);
  EXPECT_TRUE(r.image == img);
  EXPECT_EQ(r.rect.area(), 0);
}

TEST(Occlude, RectangleDims) {
  const Rect r = occlusion_rect_size(1024, 576, 0.25);
  EXPECT_EQ(r.width, 512);
  EXPECT_EQ(r.height, 288);
  const OcclusionResult o = occlude(Image(1024, 576, 0.5f), 0.25, 3);
  long black = 0;
  for (Eigen::Index i = 0; i < o.image.channels[0].size(); ++i) {
    black += o.image.channels[0].data()[i] == 0.0f && o.image.channels[1].data()[i] == 0.0f &&
             o.image.channels[2].data()[i] == 0.0f;
  }
  EXPECT_EQ(black, 147456);
  for (int w : {7, 64, 256, 1000}) {
    for (int h : {5, 48, 144}) {
      for (double rate : {0.0, 0.01, 0.3, 0.5, 0.81, 1.0}) {
        const Rect s = occlusion_rect_size(w, h, rate);
        EXPECT_EQ(s.width, static_cast<int>(w * std::sqrt(rate)));
        EXPECT_EQ(s.height, static_cast<int>(h * std::sqrt(rate)));
      }
    }
  }
}

TEST(Occlude, FullRateBlanksEverything) {
  const OcclusionResult o = occlude(random_image(33, 17, 10), 1.0, 4);
  for (const auto& c : o.image.channels) EXPECT_TRUE((c == 0.0f).all());
}

TEST(Occlude, OnlyTheRectangleChanges) {
  const Image img = shifted(random_image(64, 40, 11), 0.01f);  // no zero pixels
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const OcclusionResult o = occlude(img, 0.3, seed);
    const Rect& r = o.rect;
    ASSERT_GE(r.x, 0);
    ASSERT_GE(r.y, 0);
    ASSERT_LE(r.x + r.width, 64);
    ASSERT_LE(r.y + r.height, 40);
    long changed = 0;
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 64; ++x) {
        const bool inside = x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height;
        const bool differs = o.image.channels[0](y, x) != img.channels[0](y, x);
        EXPECT_EQ(differs, inside);
        changed += differs;
      }
    }
    EXPECT_EQ(changed, r.area());
  }
}

TEST(LowRes, SameSizeIsIdentity) {
  const Image img = random_image(12, 8, 12);
  EXPECT_TRUE(low_res(img, {12, 8}) == img);
}

TEST(LowRes, AveragesBlocks) {
  Image img(2, 2);
  img.channels[0] << 0, 0, 1, 1;
  EXPECT_FLOAT_EQ(low_res(img, {1, 1}).channels[0](0, 0), 0.5f);
}

TEST(LowRes, DimsAndMean) {
  const Image img = random_image(1024, 576, 13);
  const Image out = low_res(img, {128, 72});
  EXPECT_EQ(out.width(), 128);
  EXPECT_EQ(out.height(), 72);
  EXPECT_NEAR(mean_of(out), mean_of(img), 1e-6);
  const Image odd = random_image(50, 30, 14);
  EXPECT_NEAR(mean_of(low_res(odd, {17, 11})), mean_of(odd), 1e-6);
}

TEST(LowRes, UpscalingIsASpecError) {
  EXPECT_THROW(low_res(Image(4, 4), {8, 4}), SpecError);
}

TEST(Enhance, ConstantStaysConstant) {
  const Image out = enhance(Image(20, 20, 0.3f));
  const float v = out.channels[0](0, 0);
  for (const auto& c : out.channels) EXPECT_TRUE(c.isApproxToConstant(v, 1e-6f));
}

TEST(Enhance, TwoLevelEqualization) {
  Image img(10, 10, 0.2f);
  for (auto& c : img.channels) c.rightCols(5).setConstant(0.8f);
  const Image out = equalize_luma(img);
  for (const auto& c : out.channels) {
    EXPECT_NEAR(c(3, 1), 0.5f, 1e-6);
    EXPECT_NEAR(c(3, 8), 1.0f, 1e-6);
  }
}

TEST(Enhance, BlurOfImpulseIsTheKernel) {
  Image img(31, 31);
  for (auto& c : img.channels) c(15, 15) = 1.0f;
  const Image out = gaussian_blur(img, 11, 2.0);
  double total = 0;
  for (int y = -5; y <= 5; ++y) {
    for (int x = -5; x <= 5; ++x) total += std::exp(-(x * x + y * y) / 8.0);
  }
  for (int y = 0; y < 31; ++y) {
    for (int x = 0; x < 31; ++x) {
      const int dy = y - 15, dx = x - 15;
      const double ref = (std::abs(dx) <= 5 && std::abs(dy) <= 5) ? std::exp(-(dx * dx + dy * dy) / 8.0) / total : 0;
      EXPECT_NEAR(out.channels[1](y, x), ref, 1e-7);
    }
  }
}

TEST(Psnr, ClosedForms) {
  const Image a = shifted(Image(16, 16, 0.0f), 0.3f);
  EXPECT_EQ(psnr(a, a), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(psnr(a, shifted(a, 0.1f)), 20.0, 1e-5);
  EXPECT_NEAR(psnr(a, shifted(a, 0.05f)), 10.0 * std::log10(1.0 / 0.0025), 1e-5);
  EXPECT_THROW(psnr(a, Image(8, 16)), DimensionError);
}

TEST(Psnr, SymmetricAndDecreasingInNoise) {
  const Image img = shifted(darken(random_image(64, 64, 15), 0.6, 0, true).image, 0.2f);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double last = std::numeric_limits<double>::infinity();
    for (double sigma : {0.01, 0.03, 0.06, 0.1}) {
      const Image noisy = add_noise(img, std::nullopt, sigma, seed);
      const double p = psnr(img, noisy);
      EXPECT_EQ(p, psnr(noisy, img));
      EXPECT_LT(p, last) << "seed " << seed << " sigma " << sigma;
      last = p;
    }
  }
}

TEST(ApplyCorruption, ReproducibleFromSeed) {
  CorruptionSpec spec;
  spec.mode = CorruptionMode::darken_noise;
  spec.brightness = 0.4;
  spec.noise_level = 50;
  spec.seed = 77;
  const Image img = random_image(32, 24, 16);
  EXPECT_TRUE(apply_corruption(img, spec) == apply_corruption(img, spec));
  CorruptionSpec other = spec;
  other.seed = 78;
  EXPECT_FALSE(apply_corruption(img, spec) == apply_corruption(img, other));
}

TEST(ApplyCorruption, ValidatesModeFields) {
  CorruptionSpec spec;
  spec.mode = CorruptionMode::low_res;
  EXPECT_THROW(spec.validate(), SpecError);
  spec.mode = CorruptionMode::fixed_noise;
  EXPECT_THROW(spec.validate(), SpecError);
  spec.mode = CorruptionMode::occlude;
  spec.occlusion_rate = 1.2;
  EXPECT_THROW(spec.validate(), SpecError);
  EXPECT_EQ(parse_corruption_mode("occlude"), CorruptionMode::occlude);
  EXPECT_THROW(parse_corruption_mode("blur"), SpecError);
}

}  // namespace
}  // namespace avc
