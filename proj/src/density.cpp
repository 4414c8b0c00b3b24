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

#include "avc/density.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "avc/errors.hpp"

namespace avc {

DensityMap density_from_heads(const HeadAnnotations& ann, const DensityKernel& kernel) {
  if (ann.width <= 0 || ann.height <= 0) throw AnnotationError("annotation image dims must be positive");
  if (kernel.size < 1 || kernel.size % 2 == 0 || !(kernel.sigma > 0)) {
    throw AnnotationError("density kernel must have odd size and positive sigma");
  }
  DensityMap map = DensityMap::Zero(ann.height, ann.width);
  const int r = kernel.size / 2;
  Eigen::MatrixXd stamp(kernel.size, kernel.size);
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      stamp(dy + r, dx + r) = std::exp(-(dx * dx + dy * dy) / (2.0 * kernel.sigma * kernel.sigma));
    }
  }

  for (std::size_t i = 0; i < ann.points.size(); ++i) {
    const auto& p = ann.points[i];
    if (!(p.x >= 0 && p.x < ann.width && p.y >= 0 && p.y < ann.height)) {
      std::ostringstream os;
      os << "head #" << i << " at (" << p.x << ", " << p.y << ") lies outside the " << ann.width << "x"
         << ann.height << " image";
      throw AnnotationError(os.str());
    }
    const int cx = std::min(static_cast<int>(std::lround(p.x)), ann.width - 1);
    const int cy = std::min(static_cast<int>(std::lround(p.y)), ann.height - 1);
    const int x0 = std::max(cx - r, 0), x1 = std::min(cx + r, ann.width - 1);
    const int y0 = std::max(cy - r, 0), y1 = std::min(cy + r, ann.height - 1);
    const auto block = stamp.block(y0 - cy + r, x0 - cx + r, y1 - y0 + 1, x1 - x0 + 1);
    map.block(y0, x0, y1 - y0 + 1, x1 - x0 + 1) += block / block.sum();
  }
  return map;
}

double count_from_density(const DensityMap& map) { return map.sum(); }

HeadAnnotations read_annotations(const std::filesystem::path& path, int width, int height) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  HeadAnnotations ann;
  ann.width = width;
  ann.height = height;
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y", 0) != 0) {
    throw FormatError(path.string() + ": expected header \"x,y\"");
  }
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    HeadPoint p;
    char comma = 0;
    if (!(row >> p.x >> comma >> p.y) || comma != ',') {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed row \"" + line + "\"");
    }
    ann.points.push_back(p);
  }
  return ann;
}

void write_annotations(const std::filesystem::path& path, const HeadAnnotations& ann) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "x,y\n" << std::setprecision(9);
  for (const auto& p : ann.points) os << p.x << ',' << p.y << '\n';
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace avc
