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

#include "avc/image.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "avc/errors.hpp"

namespace avc {

Plane luma(const Image& img) {
  return 0.299f * img.channels[0] + 0.587f * img.channels[1] + 0.114f * img.channels[2];
}

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& is) {
  std::string tok;
  int ch;
  while ((ch = is.get()) != EOF) {
    if (ch == '#') {
      while ((ch = is.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const auto fail = [&](const std::string& why) { throw FormatError(path.string() + ": " + why); };
  if (next_token(is) != "P6") fail("not a binary PPM (P6)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(next_token(is));
    h = std::stoi(next_token(is));
    maxval = std::stoi(next_token(is));
  } catch (const std::exception&) {
    fail("malformed header");
  }
  if (w <= 0 || h <= 0) fail("invalid dimensions");
  if (maxval != 255) fail("only 8-bit PPM (maxval 255) is supported");
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 3);
  if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
    fail("truncated pixel data");
  }
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) img.channels[c](y, x) = buf[(static_cast<std::size_t>(y) * w + x) * 3 + c] / 255.0f;
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const int w = img.width(), h = img.height();
  os << "P6\n" << w << ' ' << h << "\n255\n";
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = std::clamp(img.channels[c](y, x), 0.0f, 1.0f);
        buf[(static_cast<std::size_t>(y) * w + x) * 3 + c] = static_cast<unsigned char>(std::lround(v * 255.0f));
      }
    }
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace avc
