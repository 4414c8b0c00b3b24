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
#include <filesystem>
#include <string>
#include <vector>

#include "avc/audio.hpp"
#include "avc/config.hpp"
#include "avc/density.hpp"
#include "avc/image.hpp"
#include "avc/train.hpp"

namespace avc {

// Parameters of the synthetic audiovisual crowd generator.
struct SceneSpec {
  int width = 256;
  int height = 144;
  int min_count = 1;
  int max_count = 40;
  double head_radius = 3.0;      // px
  double head_contrast = 0.35;   // added on top of the background
  double background = 0.3;
  double texture = 0.12;         // amplitude of low-frequency background clutter
  double band_low_hz = 300.0;
  double band_high_hz = 3000.0;
  double per_person_rms = 0.02;
  double clip_seconds = 1.0;
  int sample_rate = 16000;
  std::uint64_t seed = 0;

  void validate() const;
  KeyValues to_key_values() const;
  static SceneSpec from_key_values(const KeyValues& kv);
};

struct Scene {
  Image image;
  HeadAnnotations heads;
  AudioClip clip;
};

// Fully determined by (spec.seed, index). Audio is the sum of one
// band-limited babble burst per person, scaled to RMS per_person_rms*sqrt(n)
// and clipped to [-1, 1].
Scene generate_scene(const SceneSpec& spec, std::uint64_t index);

Sample make_sample(const Scene& scene);

// Scenes first_index .. first_index+n-1 as training samples.
Dataset synthesize_dataset(const SceneSpec& spec, std::uint64_t first_index, std::size_t n);

struct ManifestRow {
  std::string image;
  std::string annotation;
  std::string audio;
  int count = 0;
};

// Writes images/NNNN.ppm, ann/NNNN.csv, audio/NNNN.wav and manifest.csv.
std::vector<ManifestRow> generate_dataset(const SceneSpec& spec, std::size_t n_scenes,
                                          const std::filesystem::path& out_dir, std::uint64_t first_index = 0);

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

// Loads every manifest row (paths relative to the manifest's directory).
Dataset load_dataset(const std::filesystem::path& manifest);

}  // namespace avc
