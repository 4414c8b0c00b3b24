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

#include <array>
#include <filesystem>

namespace avc {

using Plane = Eigen::Array<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// RGB raster with channel values in [0, 1], stored as three H x W planes.
struct Image {
  std::array<Plane, 3> channels;

  Image() = default;
  Image(int width, int height, float fill = 0.0f) {
    for (auto& c : channels) c = Plane::Constant(height, width, fill);
  }

  int width() const { return static_cast<int>(channels[0].cols()); }
  int height() const { return static_cast<int>(channels[0].rows()); }

  bool operator==(const Image& other) const {
    if (width() != other.width() || height() != other.height()) return false;
    for (int c = 0; c < 3; ++c) {
      if ((channels[c] != other.channels[c]).any()) return false;
    }
    return true;
  }
};

// BT.601 luma.
Plane luma(const Image& img);

// Binary PPM (P6, maxval 255) mapped linearly to [0, 1].
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& img);

}  // namespace avc
