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
#include <vector>

namespace avc {

struct HeadPoint {
  double x = 0;  // pixel column
  double y = 0;  // pixel row
};

struct HeadAnnotations {
  std::vector<HeadPoint> points;
  int width = 0;
  int height = 0;
};

// H x W persons-per-pixel field.
using DensityMap = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DensityKernel {
  int size = 15;
  double sigma = 2.0;  // "N(0, 4.0)" read as variance 4
};

// Stamps a normalized Gaussian at each rounded head position. Stamps clipped
// by the border are renormalized so every head contributes exactly 1.
DensityMap density_from_heads(const HeadAnnotations& ann, const DensityKernel& kernel = {});

double count_from_density(const DensityMap& map);

// CSV with header "x,y", one head per row.
HeadAnnotations read_annotations(const std::filesystem::path& path, int width, int height);
void write_annotations(const std::filesystem::path& path, const HeadAnnotations& ann);

}  // namespace avc
