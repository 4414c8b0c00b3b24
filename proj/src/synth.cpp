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

#include "avc/synth.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "avc/errors.hpp"
#include "avc/rng.hpp"

namespace avc {
namespace {

constexpr std::uint64_t kCountStream = 1;
constexpr std::uint64_t kImageStream = 2;
constexpr std::uint64_t kAudioStream = 3;

double number(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw SpecError("scene key " + key + ": expected a number, got \"" + v + "\"");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void render_background(const SceneSpec& spec, SplitMix64& rng, Image& img) {
  // A few random low-frequency plane waves per channel, expanded as
  // sin(a + b) = sin a cos b + cos a sin b so each wave is a rank-2 update.
  Eigen::ArrayXf sx(spec.width), cx(spec.width), sy(spec.height), cy(spec.height);
  for (auto& plane : img.channels) {
    plane.setConstant(static_cast<float>(spec.background));
    for (int k = 0; k < 4; ++k) {
      const double fx = rng.uniform(-3.0, 3.0) * 2.0 * std::numbers::pi / spec.width;
      const double fy = rng.uniform(-3.0, 3.0) * 2.0 * std::numbers::pi / spec.height;
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double amp = spec.texture * rng.uniform(0.25, 1.0) / 2.0;
      for (int x = 0; x < spec.width; ++x) {
        sx[x] = static_cast<float>(amp * std::sin(fx * x + phase));
        cx[x] = static_cast<float>(amp * std::cos(fx * x + phase));
      }
      for (int y = 0; y < spec.height; ++y) {
        sy[y] = static_cast<float>(std::sin(fy * y));
        cy[y] = static_cast<float>(std::cos(fy * y));
      }
      for (int y = 0; y < spec.height; ++y) {
        plane.row(y) += (sx * cy[y] + cx * sy[y]).transpose();
      }
    }
  }
}

void render_head(const SceneSpec& spec, const HeadPoint& p, const std::array<double, 3>& tint, Image& img) {
  const double r = spec.head_radius;
  const int x0 = std::max(0, static_cast<int>(std::floor(p.x - r - 1)));
  const int x1 = std::min(spec.width - 1, static_cast<int>(std::ceil(p.x + r + 1)));
  const int y0 = std::max(0, static_cast<int>(std::floor(p.y - r - 1)));
  const int y1 = std::min(spec.height - 1, static_cast<int>(std::ceil(p.y + r + 1)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double d = std::hypot(x - p.x, y - p.y);
      const double cover = std::clamp(r + 0.5 - d, 0.0, 1.0);  // anti-aliased disc
      if (cover <= 0) continue;
      for (int c = 0; c < 3; ++c) {
        img.channels[c](y, x) += static_cast<float>(cover * spec.head_contrast * tint[c]);
      }
    }
  }
}

// Unit-RMS noise restricted to [lo, hi] Hz with a syllable-rate envelope.
// The band-limited noise is drawn directly in the frequency domain.
Eigen::VectorXd babble(const SceneSpec& spec, SplitMix64& rng, Eigen::FFT<double>& fft, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(n / 2 + 1), 0.0);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    const double hz = static_cast<double>(k) * spec.sample_rate / static_cast<double>(n);
    if (hz < spec.band_low_hz || hz > spec.band_high_hz) continue;
    const double re = normal(rng);
    const double im = normal(rng);
    bins[k] = {re, im};
  }
  std::vector<double> band;
  fft.inv(band, bins, static_cast<std::size_t>(n));

  const double rate = rng.uniform(3.0, 6.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  // Envelope 0.6 + 0.4 sin(2 pi rate t + phase), advanced by a unit phasor.
  const std::complex<double> step = std::polar(1.0, 2.0 * std::numbers::pi * rate / spec.sample_rate);
  std::complex<double> z = std::polar(1.0, phase);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = band[static_cast<std::size_t>(i)] * (0.6 + 0.4 * z.imag());
    z *= step;
  }
  const double rms = std::sqrt(out.squaredNorm() / static_cast<double>(n));
  return rms > 0 ? Eigen::VectorXd(out / rms) : out;
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0 || width % 8 != 0 || height % 8 != 0) {
    throw SpecError("scene dims must be positive multiples of 8");
  }
  if (min_count < 0 || max_count < min_count) throw SpecError("scene count range must satisfy 0 <= min <= max");
  if (!(head_radius >= 1.0)) throw SpecError("head radius must be >= 1 px");
  if (2 * head_radius >= std::min(width, height)) throw SpecError("head radius too large for the image");
  if (sample_rate <= 0 || !(clip_seconds > 0)) throw SpecError("audio rate and clip length must be positive");
  if (!(band_low_hz >= 0 && band_low_hz < band_high_hz && band_high_hz <= sample_rate / 2.0)) {
    throw SpecError("babble band must lie within [0, Nyquist]");
  }
  if (!(per_person_rms >= 0)) throw SpecError("per-person RMS must be >= 0");
}

KeyValues SceneSpec::to_key_values() const {
  return {{"width", std::to_string(width)},
          {"height", std::to_string(height)},
          {"min_count", std::to_string(min_count)},
          {"max_count", std::to_string(max_count)},
          {"head_radius", fmt(head_radius)},
          {"head_contrast", fmt(head_contrast)},
          {"background", fmt(background)},
          {"texture", fmt(texture)},
          {"band_low_hz", fmt(band_low_hz)},
          {"band_high_hz", fmt(band_high_hz)},
          {"per_person_rms", fmt(per_person_rms)},
          {"clip_seconds", fmt(clip_seconds)},
          {"sample_rate", std::to_string(sample_rate)},
          {"seed", std::to_string(seed)}};
}

SceneSpec SceneSpec::from_key_values(const KeyValues& kv) {
  SceneSpec s;
  for (const auto& [k, v] : kv) {
    const double d = number(k, v);
    if (k == "width") s.width = static_cast<int>(d);
    else if (k == "height") s.height = static_cast<int>(d);
    else if (k == "min_count") s.min_count = static_cast<int>(d);
    else if (k == "max_count") s.max_count = static_cast<int>(d);
    else if (k == "head_radius") s.head_radius = d;
    else if (k == "head_contrast") s.head_contrast = d;
    else if (k == "background") s.background = d;
    else if (k == "texture") s.texture = d;
    else if (k == "band_low_hz") s.band_low_hz = d;
    else if (k == "band_high_hz") s.band_high_hz = d;
    else if (k == "per_person_rms") s.per_person_rms = d;
    else if (k == "clip_seconds") s.clip_seconds = d;
    else if (k == "sample_rate") s.sample_rate = static_cast<int>(d);
    else if (k == "seed") s.seed = std::stoull(v);
    else throw SpecError("unknown scene key \"" + k + "\"");
  }
  s.validate();
  return s;
}

Scene generate_scene(const SceneSpec& spec, std::uint64_t index) {
  spec.validate();
  const std::uint64_t base = mix_seed(spec.seed, index);
  SplitMix64 count_rng(mix_seed(base, kCountStream));
  const int span = spec.max_count - spec.min_count + 1;
  const int n = spec.min_count + static_cast<int>(count_rng() % static_cast<std::uint64_t>(span));

  Scene scene;
  scene.heads.width = spec.width;
  scene.heads.height = spec.height;
  scene.image = Image(spec.width, spec.height);
  SplitMix64 img_rng(mix_seed(base, kImageStream));
  render_background(spec, img_rng, scene.image);
  const double r = spec.head_radius;
  for (int i = 0; i < n; ++i) {
    HeadPoint p{img_rng.uniform(r, spec.width - r), img_rng.uniform(r, spec.height - r)};
    const std::array<double, 3> tint = {img_rng.uniform(0.7, 1.0), img_rng.uniform(0.7, 1.0), img_rng.uniform(0.7, 1.0)};
    render_head(spec, p, tint, scene.image);
    scene.heads.points.push_back(p);
  }
  for (auto& c : scene.image.channels) c = c.cwiseMax(0.0f).cwiseMin(1.0f);

  const auto len = static_cast<Eigen::Index>(std::lround(spec.clip_seconds * spec.sample_rate));
  scene.clip.sample_rate = spec.sample_rate;
  scene.clip.samples = Eigen::MatrixXd::Zero(1, len);
  if (n > 0 && spec.per_person_rms > 0) {
    SplitMix64 audio_rng(mix_seed(base, kAudioStream));
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(len);
    for (int i = 0; i < n; ++i) mix += babble(spec, audio_rng, fft, len);
    const double rms = std::sqrt(mix.squaredNorm() / static_cast<double>(len));
    if (rms > 0) mix *= spec.per_person_rms * std::sqrt(static_cast<double>(n)) / rms;
    scene.clip.samples.row(0) = mix.cwiseMax(-1.0).cwiseMin(1.0).transpose();
  }
  return scene;
}

Sample make_sample(const Scene& scene) {
  Sample s;
  s.image = scene.image;
  s.density = density_from_heads(scene.heads);
  s.patch = audio_pipeline(scene.clip);
  s.count = static_cast<double>(scene.heads.points.size());
  return s;
}

Dataset synthesize_dataset(const SceneSpec& spec, std::uint64_t first_index, std::size_t n) {
  Dataset data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) data.push_back(make_sample(generate_scene(spec, first_index + i)));
  return data;
}

std::vector<ManifestRow> generate_dataset(const SceneSpec& spec, std::size_t n_scenes,
                                          const std::filesystem::path& out_dir, std::uint64_t first_index) {
  namespace fs = std::filesystem;
  spec.validate();
  std::error_code ec;
  for (const char* sub : {"images", "ann", "audio"}) {
    fs::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create " + (out_dir / sub).string() + ": " + ec.message());
  }
  std::vector<ManifestRow> rows;
  for (std::size_t i = 0; i < n_scenes; ++i) {
    const std::uint64_t index = first_index + i;
    const Scene scene = generate_scene(spec, index);
    char stem[32];
    std::snprintf(stem, sizeof stem, "%04llu", static_cast<unsigned long long>(index));
    ManifestRow row{std::string("images/") + stem + ".ppm", std::string("ann/") + stem + ".csv",
                    std::string("audio/") + stem + ".wav", static_cast<int>(scene.heads.points.size())};
    write_ppm(out_dir / row.image, scene.image);
    write_annotations(out_dir / row.annotation, scene.heads);
    write_wav(out_dir / row.audio, scene.clip);
    rows.push_back(row);
  }
  std::ofstream os(out_dir / "manifest.csv", std::ios::binary);
  if (!os) throw IoError("cannot write " + (out_dir / "manifest.csv").string());
  os << "image,annotation,audio,count\n";
  for (const auto& r : rows) os << r.image << ',' << r.annotation << ',' << r.audio << ',' << r.count << '\n';
  if (!os) throw IoError("failed writing " + (out_dir / "manifest.csv").string());
  return rows;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("image,annotation,audio,count", 0) != 0) {
    throw FormatError(path.string() + ": expected header image,annotation,audio,count");
  }
  std::vector<ManifestRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    ManifestRow r;
    std::string count;
    if (!std::getline(row, r.image, ',') || !std::getline(row, r.annotation, ',') ||
        !std::getline(row, r.audio, ',') || !std::getline(row, count)) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    try {
      r.count = std::stoi(count);
    } catch (const std::exception&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad count \"" + count + "\"");
    }
    rows.push_back(r);
  }
  return rows;
}

Dataset load_dataset(const std::filesystem::path& manifest) {
  const auto dir = manifest.parent_path();
  Dataset data;
  for (const auto& row : read_manifest(manifest)) {
    Sample s;
    s.image = read_ppm(dir / row.image);
    const HeadAnnotations heads = read_annotations(dir / row.annotation, s.image.width(), s.image.height());
    s.density = density_from_heads(heads);
    s.patch = audio_pipeline(read_wav(dir / row.audio));
    s.count = static_cast<double>(heads.points.size());
    data.push_back(std::move(s));
  }
  return data;
}

}  // namespace avc
