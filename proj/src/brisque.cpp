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

#include "avc/brisque.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include "avc/corruption.hpp"
#include "avc/errors.hpp"

namespace avc {
namespace {

// 7x7 Gaussian (sigma 7/6), normalized, replicate borders.
Eigen::ArrayXXd local_mean(const Eigen::ArrayXXd& x) {
  constexpr int r = 3;
  constexpr double sigma = 7.0 / 6.0;
  double k[2 * r + 1];
  double total = 0.0;
  for (int i = -r; i <= r; ++i) total += k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (double& v : k) v /= total;

  const Eigen::Index h = x.rows(), w = x.cols();
  auto clampi = [](Eigen::Index i, Eigen::Index n) { return std::clamp<Eigen::Index>(i, 0, n - 1); };
  Eigen::ArrayXXd tmp(h, w), out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * x(y, clampi(c + i, w));
      tmp(y, c) = acc;
    }
  }
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp(clampi(y + i, h), c);
      out(y, c) = acc;
    }
  }
  return out;
}

// Solves rho(alpha) = target for a ratio that decreases in alpha, by bisection
// on [0.05, 20].
template <typename Ratio>
double solve_shape(Ratio&& ratio, double target) {
  double lo = 0.05, hi = 20.0;
  if (target >= ratio(lo)) return lo;
  if (target <= ratio(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ratio(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)), increasing in a.
double ggd_ratio(double a) {
  return std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) - std::lgamma(3.0 / a));
}

Eigen::ArrayXXd downsample2(const Eigen::ArrayXXd& x) {
  const Eigen::Index h = x.rows() / 2, w = x.cols() / 2;
  Eigen::ArrayXXd out(h, w);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index c = 0; c < w; ++c) {
      out(y, c) = 0.25 * (x(2 * y, 2 * c) + x(2 * y + 1, 2 * c) + x(2 * y, 2 * c + 1) + x(2 * y + 1, 2 * c + 1));
    }
  }
  return out;
}

void scale_features(const Eigen::ArrayXXd& gray, double* out) {
  const Eigen::ArrayXXd m = mscn_coefficients(gray);
  const GgdFit g = fit_ggd(Eigen::Map<const Eigen::ArrayXd>(m.data(), m.size()));
  out[0] = g.shape;
  out[1] = g.variance;

  const Eigen::Index h = m.rows(), w = m.cols();
  // Horizontal, vertical, main-diagonal and anti-diagonal neighbour products.
  const Eigen::ArrayXXd products[4] = {
      m.block(0, 0, h, w - 1) * m.block(0, 1, h, w - 1),
      m.block(0, 0, h - 1, w) * m.block(1, 0, h - 1, w),
      m.block(0, 0, h - 1, w - 1) * m.block(1, 1, h - 1, w - 1),
      m.block(1, 0, h - 1, w - 1) * m.block(0, 1, h - 1, w - 1),
  };
  for (int i = 0; i < 4; ++i) {
    const AggdFit a = fit_aggd(Eigen::Map<const Eigen::ArrayXd>(products[i].data(), products[i].size()));
    out[2 + 4 * i + 0] = a.shape;
    out[2 + 4 * i + 1] = a.mean;
    out[2 + 4 * i + 2] = a.left_variance;
    out[2 + 4 * i + 3] = a.right_variance;
  }
}

}  // namespace

Eigen::ArrayXXd mscn_coefficients(const Eigen::ArrayXXd& gray) {
  const Eigen::ArrayXXd mu = local_mean(gray);
  const Eigen::ArrayXXd var = (local_mean(gray.square()) - mu.square()).abs();
  return (gray - mu) / (var.sqrt() + 1.0);
}

GgdFit fit_ggd(const Eigen::ArrayXd& x) {
  const double variance = x.square().mean();
  const double mean_abs = x.abs().mean();
  if (!(variance > 0.0)) return {};
  const double rho = mean_abs * mean_abs / variance;
  return {solve_shape([](double a) { return -ggd_ratio(a); }, -rho), variance};
}

AggdFit fit_aggd(const Eigen::ArrayXd& x) {
  double left_sq = 0, right_sq = 0;
  long left_n = 0, right_n = 0;
  for (double v : x) {
    if (v < 0) {
      left_sq += v * v;
      ++left_n;
    } else if (v > 0) {
      right_sq += v * v;
      ++right_n;
    }
  }
  const double second = x.square().mean();
  if (!(second > 0.0) || left_n == 0 || right_n == 0) return {};
  const double left_sigma = std::sqrt(left_sq / left_n);
  const double right_sigma = std::sqrt(right_sq / right_n);
  const double gamma = left_sigma / right_sigma;
  const double mean_abs = x.abs().mean();
  const double r_hat = mean_abs * mean_abs / second;
  const double big_r = r_hat * (gamma * gamma * gamma + 1.0) * (gamma + 1.0) / std::pow(gamma * gamma + 1.0, 2);
  const double shape = solve_shape([](double a) { return -ggd_ratio(a); }, -big_r);
  const double mean = (right_sigma - left_sigma) * std::exp(std::lgamma(2.0 / shape) - 0.5 * (std::lgamma(1.0 / shape) + std::lgamma(3.0 / shape)));
  return {shape, mean, left_sigma * left_sigma, right_sigma * right_sigma};
}

BrisqueFeatures brisque_features(const Image& img) {
  if (std::min(img.width(), img.height()) < 32) {
    throw InputError("brisque_features needs an image of at least 32x32, got " + std::to_string(img.width()) + "x" +
                     std::to_string(img.height()));
  }
  const Eigen::ArrayXXd gray = luma(img).cast<double>() * 255.0;
  BrisqueFeatures f;
  scale_features(gray, f.data());
  scale_features(downsample2(gray), f.data() + 18);
  return f;
}

BrisqueModel BrisqueModel::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  BrisqueModel m;
  if (!(is >> m.intercept)) throw FormatError(path.string() + ": missing intercept");
  for (int i = 0; i < kBrisqueFeatures; ++i) {
    if (!(is >> m.weights[i])) throw FormatError(path.string() + ": expected 36 weights, got " + std::to_string(i));
  }
  return m;
}

QualityReport quality_report(const Image& reference, const Image& degraded, const BrisqueModel* model) {
  QualityReport r;
  r.psnr = psnr(reference, degraded);
  r.brisque_features = brisque_features(degraded);
  if (model) r.brisque_score = model->score(r.brisque_features);
  return r;
}

}  // namespace avc
