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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "avc/audio.hpp"
#include "avc/errors.hpp"

namespace avc {
namespace {

std::uint32_t le32(const char* p) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(p[0])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(p[3])) << 24;
}

std::uint16_t le16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                    static_cast<unsigned char>(p[1]) << 8);
}

void put32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 24)};
  os.write(b, 4);
}

void put16(std::ostream& os, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  os.write(b, 2);
}

}  // namespace

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  const auto fail = [&](const std::string& why) { throw FormatError(path.string() + ": " + why); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail("not a RIFF/WAVE file");
  }

  int channels = 0, rate = 0, bits = 0;
  const char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* chunk = bytes.data() + pos;
    const std::size_t size = le32(chunk + 4);
    if (pos + 8 + size > bytes.size()) fail("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) fail("short fmt chunk");
      if (le16(chunk + 8) != 1) fail("only PCM WAV is supported");
      channels = le16(chunk + 10);
      rate = static_cast<int>(le32(chunk + 12));
      bits = le16(chunk + 22);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (channels == 0) fail("missing fmt chunk");
  if (data == nullptr) fail("missing data chunk");
  if (bits != 16) fail("only 16-bit samples are supported, got " + std::to_string(bits));
  if (channels != 1 && channels != 2) fail("expected mono or stereo, got " + std::to_string(channels) + " channels");
  if (rate != audio::kTargetRate && rate != audio::kRecordingRate) {
    throw FormatError(path.string() + ": unsupported sample rate " + std::to_string(rate));
  }

  const std::size_t frames = data_size / (2 * static_cast<std::size_t>(channels));
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(channels, static_cast<Eigen::Index>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (int c = 0; c < channels; ++c) {
      const auto v = static_cast<std::int16_t>(le16(data + 2 * (i * channels + c)));
      clip.samples(c, static_cast<Eigen::Index>(i)) = v / 32768.0;
    }
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  const auto channels = static_cast<std::uint16_t>(clip.channels());
  const auto frames = static_cast<std::uint32_t>(clip.length());
  const std::uint32_t data_size = frames * channels * 2;
  os.write("RIFF", 4);
  put32(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put32(os, 16);
  put16(os, 1);
  put16(os, channels);
  put32(os, static_cast<std::uint32_t>(clip.sample_rate));
  put32(os, static_cast<std::uint32_t>(clip.sample_rate) * channels * 2);
  put16(os, static_cast<std::uint16_t>(channels * 2));
  put16(os, 16);
  os.write("data", 4);
  put32(os, data_size);
  for (std::uint32_t i = 0; i < frames; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const double s = std::clamp(clip.samples(c, i), -1.0, 32767.0 / 32768.0);
      put16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(s * 32768.0))));
    }
  }
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace avc
