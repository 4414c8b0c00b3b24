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

#include "avc/density.hpp"
#include "avc/errors.hpp"
#include "avc/rng.hpp"

namespace avc {
namespace {

HeadAnnotations heads(int w, int h, std::vector<HeadPoint> pts) { return {std::move(pts), w, h}; }

// Stamp value at offset (dx,dy) for a head at pixel (cx,cy), by summing the
// in-bounds part of the 15x15 sigma-2 Gaussian directly.
double brute_force_stamp(int cx, int cy, int w, int h, int dx, int dy) {
  double total = 0;
  for (int y = -7; y <= 7; ++y) {
    for (int x = -7; x <= 7; ++x) {
      if (cx + x < 0 || cx + x >= w || cy + y < 0 || cy + y >= h) continue;
      total += std::exp(-(x * x + y * y) / 8.0);
    }
  }
  return std::exp(-(dx * dx + dy * dy) / 8.0) / total;
}

TEST(Density, NoHeadsGivesZeroMap) {
  const DensityMap m = density_from_heads(heads(20, 10, {}));
  EXPECT_EQ(m.rows(), 10);
  EXPECT_EQ(m.cols(), 20);
  EXPECT_TRUE((m.array() == 0).all());
  EXPECT_EQ(count_from_density(m), 0.0);
}

TEST(Density, CenteredHeadHasUnitMassAndPeaksAtHead) {
  const DensityMap m = density_from_heads(heads(64, 64, {{32, 32}}));
  EXPECT_NEAR(m.sum(), 1.0, 1e-12);
  Eigen::Index r = 0, c = 0;
  m.maxCoeff(&r, &c);
  EXPECT_EQ(r, 32);
  EXPECT_EQ(c, 32);
  EXPECT_NEAR(m(32, 32), brute_force_stamp(32, 32, 64, 64, 0, 0), 1e-15);
}

TEST(Density, CornerHeadIsRenormalized) {
  const DensityMap m = density_from_heads(heads(40, 30, {{0, 0}}));
  EXPECT_NEAR(m.sum(), 1.0, 1e-12);
  for (int dy = 0; dy <= 7; ++dy) {
    for (int dx = 0; dx <= 7; ++dx) {
      EXPECT_NEAR(m(dy, dx), brute_force_stamp(0, 0, 40, 30, dx, dy), 1e-15);
    }
  }
}

TEST(Density, SevenHeadsCountSeven) {
  const DensityMap m = density_from_heads(heads(50, 40, {{1, 1}, {10, 20}, {49, 39}, {25, 0}, {0, 39}, {30, 30}, {30.4, 30.6}}));
  EXPECT_NEAR(count_from_density(m), 7.0, 1e-6);
}

TEST(Density, UniformMapCountsOne) {
  const DensityMap m = DensityMap::Constant(9, 16, 1.0 / (9.0 * 16.0));
  EXPECT_NEAR(count_from_density(m), 1.0, 1e-12);
}

TEST(Density, OutOfBoundsNamesTheHead) {
  try {
    density_from_heads(heads(10, 10, {{1, 1}, {2, 2}, {10.5, 3}}));
    FAIL() << "expected AnnotationError";
  } catch (const AnnotationError& e) {
    EXPECT_NE(std::string(e.what()).find("#2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(density_from_heads(heads(10, 10, {{-0.1, 1}})), AnnotationError);
}

TEST(Density, MassConservationOnRandomSets) {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 100), h = 8 + static_cast<int>(rng() % 100);
    HeadAnnotations a{{}, w, h};
    const int n = static_cast<int>(rng() % 301);
    for (int i = 0; i < n; ++i) {
      // Bias a third of the heads onto the border band.
      const bool border = rng() % 3 == 0;
      const double x = border ? (rng() % 2 ? rng.uniform(0, 3) : rng.uniform(w - 3, w)) : rng.uniform(0, w);
      a.points.push_back({std::min(x, w - 1e-9), rng.uniform(0, h)});
    }
    ASSERT_LT(std::abs(count_from_density(density_from_heads(a)) - n), 1e-6) << "trial " << trial;
  }
}

TEST(Density, TranslationCovarianceAwayFromBorders) {
  const DensityMap a = density_from_heads(heads(60, 50, {{20, 15}, {25, 30}}));
  const DensityMap b = density_from_heads(heads(60, 50, {{27, 19}, {32, 34}}));
  EXPECT_TRUE(a.block(0, 0, 46, 53).isApprox(b.block(4, 7, 46, 53), 1e-15));
}

TEST(Density, AddingAHeadNeverDecreasesAPixel) {
  std::vector<HeadPoint> pts{{5, 5}, {12, 3}};
  const DensityMap a = density_from_heads(heads(20, 20, pts));
  pts.push_back({6, 6});
  const DensityMap b = density_from_heads(heads(20, 20, pts));
  EXPECT_TRUE((b.array() >= a.array()).all());
}

TEST(Density, KernelSigmaIsConfigurable) {
  const DensityMap narrow = density_from_heads(heads(64, 64, {{32, 32}}), {15, 1.0});
  const DensityMap wide = density_from_heads(heads(64, 64, {{32, 32}}), {15, 3.0});
  EXPECT_GT(narrow(32, 32), wide(32, 32));
  EXPECT_NEAR(narrow.sum(), 1.0, 1e-12);
}

TEST(Annotations, CsvRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "avc_ann_roundtrip.csv";
  const HeadAnnotations a = heads(30, 20, {{1.25, 2.5}, {29.75, 19.0}});
  write_annotations(path, a);
  const HeadAnnotations b = read_annotations(path, 30, 20);
  ASSERT_EQ(b.points.size(), 2u);
  EXPECT_EQ(b.points[0].x, 1.25);
  EXPECT_EQ(b.points[1].y, 19.0);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace avc
