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
#include <optional>
#include <string>

#include "avc/image.hpp"
#include "avc/rng.hpp"

namespace avc {

enum class CorruptionMode { darken_noise, fixed_noise, occlude, low_res };

std::string to_string(CorruptionMode mode);
CorruptionMode parse_corruption_mode(const std::string& name);

struct Size2 {
  int width = 0;
  int height = 0;
};

// Declarative degradation. Only the fields relevant to `mode` are consulted.
struct CorruptionSpec {
  CorruptionMode mode = CorruptionMode::darken_noise;
  double brightness = 1.0;            // R
  std::optional<double> noise_level;  // B, on the 8-bit scale
  std::optional<double> sigma_fixed;  // fixed noise std on the [0,1] scale
  double occlusion_rate = 0.0;        // O_r
  std::optional<Size2> target;
  std::uint64_t seed = 0;
  bool deterministic = false;  // darken by exactly R instead of R*U(0,1)

  // Validates field ranges and that the mode's fields are present.
  void validate() const;
  // Same spec with a per-sample seed derived from this spec's seed.
  CorruptionSpec for_sample(std::uint64_t index) const;
};

struct DarkenResult {
  Image image;
  double rate = 1.0;  // r actually applied
};

struct Rect {
  int x = 0, y = 0, width = 0, height = 0;
  long area() const { return static_cast<long>(width) * height; }
};

struct OcclusionResult {
  Image image;
  Rect rect;
};

// Multiplies every pixel by r = R (deterministic) or r = R*U(0,1).
DarkenResult darken(const Image& img, double brightness, std::uint64_t seed, bool deterministic);

// sigma = sqrt(U(0,1) * (B/255)^2).
double sample_noise_sigma(double noise_level, SplitMix64& rng);

// Adds i.i.d. zero-mean Gaussian noise (fixed sigma if given, otherwise drawn
// from B) and clamps to [0,1].
Image add_noise(const Image& img, std::optional<double> noise_level, std::optional<double> sigma_fixed,
                std::uint64_t seed);

// Blacks out an int(W*sqrt(O_r)) x int(H*sqrt(O_r)) rectangle placed
// uniformly at random inside the image.
OcclusionResult occlude(const Image& img, double occlusion_rate, std::uint64_t seed);

Rect occlusion_rect_size(int width, int height, double occlusion_rate);

// Area-average downsampling.
Image low_res(const Image& img, Size2 target);

// Separable Gaussian blur with reflect-101 borders.
Image gaussian_blur(const Image& img, int ksize, double sigma);

// Histogram-equalizes BT.601 luma and keeps chroma.
Image equalize_luma(const Image& img);

// 11x11 blur (sigma 2.0) followed by luma equalization.
Image enhance(const Image& img);

// 10*log10(1/MSE) over all channels; +inf for identical images.
double psnr(const Image& a, const Image& b);

Image apply_corruption(const Image& img, const CorruptionSpec& spec);

}  // namespace avc
