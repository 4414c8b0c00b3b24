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

#include "avc/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "avc/errors.hpp"

namespace avc {

std::string to_string(CorruptionMode mode) {
  switch (mode) {
    case CorruptionMode::darken_noise: return "darken_noise";
    case CorruptionMode::fixed_noise: return "fixed_noise";
    case CorruptionMode::occlude: return "occlude";
    case CorruptionMode::low_res: return "low_res";
  }
  return "?";
}

CorruptionMode parse_corruption_mode(const std::string& name) {
  if (name == "darken_noise" || name == "darken") return CorruptionMode::darken_noise;
  if (name == "fixed_noise" || name == "noise") return CorruptionMode::fixed_noise;
  if (name == "occlude") return CorruptionMode::occlude;
  if (name == "low_res") return CorruptionMode::low_res;
  throw SpecError("unknown corruption mode \"" + name + "\"");
}

void CorruptionSpec::validate() const {
  switch (mode) {
    case CorruptionMode::darken_noise:
      if (!(brightness >= 0.0 && brightness <= 1.0)) throw SpecError("brightness R must lie in [0,1]");
      if (noise_level && !(*noise_level >= 0.0)) throw SpecError("noise level B must be >= 0");
      break;
    case CorruptionMode::fixed_noise:
      if (!sigma_fixed && !noise_level) throw SpecError("fixed_noise needs sigma_fixed or B");
      if (sigma_fixed && !(*sigma_fixed >= 0.0)) throw SpecError("sigma_fixed must be >= 0");
      break;
    case CorruptionMode::occlude:
      if (!(occlusion_rate >= 0.0 && occlusion_rate <= 1.0)) throw SpecError("occlusion rate must lie in [0,1]");
      break;
    case CorruptionMode::low_res:
      if (!target || target->width <= 0 || target->height <= 0) throw SpecError("low_res needs a positive target size");
      break;
  }
}

CorruptionSpec CorruptionSpec::for_sample(std::uint64_t index) const {
  CorruptionSpec s = *this;
  s.seed = mix_seed(seed, index);
  return s;
}

namespace {

constexpr std::uint64_t kDarkenStream = 0xD4;
constexpr std::uint64_t kNoiseStream = 0x9A;
constexpr std::uint64_t kOccludeStream = 0x0C;

Image map_planes(const Image& img, auto&& fn) {
  Image out;
  for (int c = 0; c < 3; ++c) out.channels[c] = fn(img.channels[c]);
  return out;
}

// Reflect-101 index into [0, n).
int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// Row-stochastic area-averaging matrix taking n source samples to m.
Eigen::MatrixXf area_matrix(int n, int m) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  const double scale = static_cast<double>(n) / m;
  for (int i = 0; i < m; ++i) {
    const double lo = i * scale, hi = (i + 1) * scale;
    for (int j = static_cast<int>(std::floor(lo)); j < n && j < hi; ++j) {
      const double overlap = std::min<double>(hi, j + 1) - std::max<double>(lo, j);
      if (overlap > 0) a(i, j) = overlap / scale;
    }
  }
  return a.cast<float>();
}

}  // namespace

DarkenResult darken(const Image& img, double brightness, std::uint64_t seed, bool deterministic) {
  if (!(brightness >= 0.0 && brightness <= 1.0)) throw SpecError("brightness R must lie in [0,1]");
  double rate = brightness;
  if (!deterministic) {
    SplitMix64 rng(mix_seed(seed, kDarkenStream));
    rate = brightness * rng.uniform();
  }
  const float r = static_cast<float>(rate);
  return {map_planes(img, [r](const Plane& p) { return Plane(p * r); }), rate};
}

double sample_noise_sigma(double noise_level, SplitMix64& rng) {
  const double b = noise_level / 255.0;
  return std::sqrt(rng.uniform() * b * b);
}

Image add_noise(const Image& img, std::optional<double> noise_level, std::optional<double> sigma_fixed,
                std::uint64_t seed) {
  if (!noise_level && !sigma_fixed) throw SpecError("add_noise needs B or sigma_fixed");
  SplitMix64 rng(mix_seed(seed, kNoiseStream));
  double sigma = 0.0;
  if (sigma_fixed) {
    if (!(*sigma_fixed >= 0.0)) throw SpecError("sigma_fixed must be >= 0");
    sigma = *sigma_fixed;
  } else {
    if (!(*noise_level >= 0.0)) throw SpecError("noise level B must be >= 0");
    sigma = sample_noise_sigma(*noise_level, rng);
  }
  if (sigma == 0.0) return img;
  std::normal_distribution<double> normal(0.0, sigma);
  Image out = img;
  for (auto& plane : out.channels) {
    for (Eigen::Index i = 0; i < plane.size(); ++i) {
      const double v = plane.data()[i] + normal(rng);
      plane.data()[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return out;
}

Rect occlusion_rect_size(int width, int height, double occlusion_rate) {
  if (!(occlusion_rate >= 0.0 && occlusion_rate <= 1.0)) throw SpecError("occlusion rate must lie in [0,1]");
  const double s = std::sqrt(occlusion_rate);
  Rect r;
  r.width = static_cast<int>(width * s);
  r.height = static_cast<int>(height * s);
  return r;
}

OcclusionResult occlude(const Image& img, double occlusion_rate, std::uint64_t seed) {
  Rect rect = occlusion_rect_size(img.width(), img.height(), occlusion_rate);
  SplitMix64 rng(mix_seed(seed, kOccludeStream));
  rect.x = static_cast<int>(rng.uniform() * (img.width() - rect.width + 1));
  rect.y = static_cast<int>(rng.uniform() * (img.height() - rect.height + 1));
  OcclusionResult res{img, rect};
  if (rect.area() > 0) {
    for (auto& plane : res.image.channels) plane.block(rect.y, rect.x, rect.height, rect.width).setZero();
  }
  return res;
}

Image low_res(const Image& img, Size2 target) {
  if (target.width <= 0 || target.height <= 0) throw SpecError("low_res target must be positive");
  if (target.width > img.width() || target.height > img.height()) {
    throw SpecError("low_res target " + std::to_string(target.width) + "x" + std::to_string(target.height) +
                    " exceeds source " + std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  if (target.width == img.width() && target.height == img.height()) return img;
  const Eigen::MatrixXf ry = area_matrix(img.height(), target.height);
  const Eigen::MatrixXf rx = area_matrix(img.width(), target.width);
  return map_planes(img, [&](const Plane& p) { return Plane((ry * p.matrix() * rx.transpose()).array()); });
}

Image gaussian_blur(const Image& img, int ksize, double sigma) {
  if (ksize < 1 || ksize % 2 == 0 || !(sigma > 0)) throw SpecError("blur kernel must be odd with positive sigma");
  const int r = ksize / 2;
  std::vector<double> k(ksize);
  double total = 0.0;
  for (int i = -r; i <= r; ++i) total += k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (auto& v : k) v /= total;

  const int w = img.width(), h = img.height();
  return map_planes(img, [&](const Plane& p) {
    Eigen::ArrayXXd tmp(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * p(y, reflect101(x + i, w));
        tmp(y, x) = acc;
      }
    }
    Plane out(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(reflect101(y + i, h), x);
        out(y, x) = static_cast<float>(acc);
      }
    }
    return out;
  });
}

Image equalize_luma(const Image& img) {
  const Plane y = luma(img);
  const Plane u = img.channels[2] - y;  // B - Y
  const Plane v = img.channels[0] - y;  // R - Y
  auto level = [](float value) { return std::clamp(static_cast<int>(std::lround(value * 255.0f)), 0, 255); };

  std::array<double, 256> cdf{};
  for (Eigen::Index i = 0; i < y.size(); ++i) cdf[level(y.data()[i])] += 1.0;
  double run = 0.0;
  for (auto& c : cdf) c = (run += c) / static_cast<double>(y.size());

  Plane ye(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) ye.data()[i] = static_cast<float>(cdf[level(y.data()[i])]);

  Image out;
  out.channels[0] = ye + v;
  out.channels[2] = ye + u;
  out.channels[1] = (ye - 0.299f * out.channels[0] - 0.114f * out.channels[2]) / 0.587f;
  for (auto& c : out.channels) c = c.cwiseMax(0.0f).cwiseMin(1.0f);
  return out;
}

Image enhance(const Image& img) {
  constexpr int kSize = 11;
  const double sigma = 0.3 * ((kSize - 1) * 0.5 - 1) + 0.8;
  return equalize_luma(gaussian_blur(img, kSize, sigma));
}

double psnr(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionError("psnr: image dims differ");
  }
  double se = 0.0;
  for (int c = 0; c < 3; ++c) se += (a.channels[c].cast<double>() - b.channels[c].cast<double>()).square().sum();
  const double mse = se / (3.0 * a.width() * a.height());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

Image apply_corruption(const Image& img, const CorruptionSpec& spec) {
  spec.validate();
  switch (spec.mode) {
    case CorruptionMode::darken_noise: {
      Image dark = darken(img, spec.brightness, spec.seed, spec.deterministic).image;
      if (!spec.noise_level && !spec.sigma_fixed) return dark;
      return add_noise(dark, spec.noise_level, spec.sigma_fixed, spec.seed);
    }
    case CorruptionMode::fixed_noise:
      return add_noise(img, spec.noise_level, spec.sigma_fixed, spec.seed);
    case CorruptionMode::occlude:
      return occlude(img, spec.occlusion_rate, spec.seed).image;
    case CorruptionMode::low_res:
      return low_res(img, *spec.target);
  }
  return img;
}

}  // namespace avc
