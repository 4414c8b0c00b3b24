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

#include "avc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "avc/errors.hpp"

namespace avc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw SpecError("config key " + key + ": expected a boolean, got \"" + v + "\"");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  T out{};
  if (!(is >> out) || !(is >> std::ws).eof()) {
    throw SpecError("config key " + key + ": expected a number, got \"" + v + "\"");
  }
  return out;
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_key_values(ss.str());
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::vector<int> parse_layers(const std::string& text) {
  std::vector<int> layers;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok == "M" || tok == "m") {
      layers.push_back(kPool);
    } else {
      const int w = parse_number<int>("layers", tok);
      if (w < 1) throw SpecError("layer width must be >= 1, got " + tok);
      layers.push_back(w);
    }
  }
  return layers;
}

std::string format_layers(const std::vector<int>& layers) {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += ',';
    out += layers[i] == kPool ? std::string("M") : std::to_string(layers[i]);
  }
  return out;
}

int ModelConfig::scaled(int width) const {
  return std::max(1, static_cast<int>(std::lround(width * base_width)));
}

int ModelConfig::visual_channels() const {
  for (auto it = visual_layers.rbegin(); it != visual_layers.rend(); ++it) {
    if (*it != kPool) return scaled(*it);
  }
  return 3;
}

int ModelConfig::audio_channels() const {
  for (auto it = audio_layers.rbegin(); it != audio_layers.rend(); ++it) {
    if (*it != kPool) return scaled(*it);
  }
  return 1;
}

void ModelConfig::validate() const {
  if (!(base_width > 0)) throw SpecError("base_width must be positive");
  if (std::count(visual_layers.begin(), visual_layers.end(), kPool) != 3) {
    throw SpecError("visual frontend must contain exactly 3 pools (x8 downsampling)");
  }
  if (std::count_if(visual_layers.begin(), visual_layers.end(), [](int w) { return w != kPool; }) == 0) {
    throw SpecError("visual frontend needs at least one convolution");
  }
  if (std::count(audio_layers.begin(), audio_layers.end(), kPool) > 4) {
    throw SpecError("audio CNN supports at most 4 pools on a 96x64 patch");
  }
  for (int w : backend) {
    if (w < 1) throw SpecError("backend widths must be >= 1");
  }
  if (film_hidden < 0) throw SpecError("film_hidden must be >= 0");
  if (audio_enabled && audio_channels() != visual_channels()) {
    throw SpecError("audio feature channels (" + std::to_string(audio_channels()) +
                    ") must equal visual feature channels (" + std::to_string(visual_channels()) + ")");
  }
}

KeyValues ModelConfig::to_key_values() const {
  KeyValues kv;
  kv["visual"] = format_layers(visual_layers);
  kv["audio"] = format_layers(audio_layers);
  kv["backend"] = format_layers(std::vector<int>(backend.begin(), backend.end()));
  kv["film_shared"] = film_shared ? "1" : "0";
  kv["film_hidden"] = std::to_string(film_hidden);
  std::ostringstream bw;
  bw << base_width;
  kv["base_width"] = bw.str();
  kv["audio_enabled"] = audio_enabled ? "1" : "0";
  kv["seed"] = std::to_string(seed);
  return kv;
}

ModelConfig ModelConfig::from_key_values(const KeyValues& kv) {
  ModelConfig cfg;
  for (const auto& [k, v] : kv) {
    if (k == "visual") {
      cfg.visual_layers = parse_layers(v);
    } else if (k == "audio") {
      cfg.audio_layers = parse_layers(v);
    } else if (k == "backend") {
      const auto b = parse_layers(v);
      if (b.size() != 6 || std::count(b.begin(), b.end(), kPool) != 0) {
        throw SpecError("backend must list exactly 6 widths");
      }
      std::copy(b.begin(), b.end(), cfg.backend.begin());
    } else if (k == "film_shared") {
      cfg.film_shared = parse_bool(k, v);
    } else if (k == "film_hidden") {
      cfg.film_hidden = parse_number<int>(k, v);
    } else if (k == "base_width") {
      cfg.base_width = parse_number<double>(k, v);
    } else if (k == "audio_enabled") {
      cfg.audio_enabled = parse_bool(k, v);
    } else if (k == "seed") {
      cfg.seed = parse_number<std::uint64_t>(k, v);
    } else {
      throw SpecError("unknown model config key \"" + k + "\"");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace avc
