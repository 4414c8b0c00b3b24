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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace avc {

// Flat key=value text; '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);

// Layer schedule token for a 2x2 max pool.
inline constexpr int kPool = -1;

// Comma-separated widths with "M" for pools, e.g. "16,M,32,32,M".
std::vector<int> parse_layers(const std::string& text);
std::string format_layers(const std::vector<int>& layers);

struct ModelConfig {
  std::vector<int> visual_layers = {16, kPool, 16, kPool, 32, 32, kPool, 64};
  std::vector<int> audio_layers = {16, kPool, 16, kPool, 32, kPool, 64, kPool};
  std::array<int, 6> backend = {64, 64, 64, 32, 16, 8};
  bool film_shared = false;
  int film_hidden = 0;  // 0: one FC per gamma/beta; >0: FC-ReLU-FC with this width
  double base_width = 1.0;
  bool audio_enabled = true;
  std::uint64_t seed = 0;

  // Width after applying base_width, at least 1.
  int scaled(int width) const;
  int visual_channels() const;
  int audio_channels() const;
  int backend_channels(int block) const { return scaled(backend.at(block)); }

  void validate() const;

  KeyValues to_key_values() const;
  static ModelConfig from_key_values(const KeyValues& kv);
};

}  // namespace avc
