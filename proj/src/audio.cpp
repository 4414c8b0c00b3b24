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

#include "avc/audio.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "avc/errors.hpp"

namespace avc {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Eigen::VectorXd resampling_filter() {
  constexpr int n = audio::kResampleTaps;
  constexpr double fc = audio::kResampleCutoffHz / audio::kRecordingRate;
  const double center = (n - 1) / 2.0;
  Eigen::VectorXd h(n);
  for (int i = 0; i < n; ++i) {
    const double t = i - center;
    const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * t) / (std::numbers::pi * t);
    const double hamming = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
    h[i] = sinc * hamming;
  }
  return h / h.sum();
}

AudioClip downmix_resample(const AudioClip& clip) {
  if (clip.sample_rate != audio::kTargetRate && clip.sample_rate != audio::kRecordingRate) {
    throw FormatError("unsupported sample rate " + std::to_string(clip.sample_rate) +
                      " Hz (expected 16000 or 48000)");
  }
  if (clip.channels() < 1) throw FormatError("audio clip has no channels");

  Eigen::RowVectorXd mono = clip.channels() == 1 ? Eigen::RowVectorXd(clip.samples.row(0))
                                                 : Eigen::RowVectorXd(clip.samples.colwise().mean());
  if (clip.sample_rate == audio::kTargetRate) return AudioClip{mono, audio::kTargetRate};

  const Eigen::VectorXd h = resampling_filter();
  const Eigen::Index n = mono.size();
  const Eigen::Index out_len = (n + 2) / 3;
  const Eigen::Index half = (h.size() - 1) / 2;
  Eigen::RowVectorXd out(out_len);
  for (Eigen::Index m = 0; m < out_len; ++m) {
    const Eigen::Index center = 3 * m;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < h.size(); ++k) {
      const Eigen::Index idx = center + half - k;
      if (idx >= 0 && idx < n) acc += h[k] * mono[idx];
    }
    out[m] = acc;
  }
  return AudioClip{out, audio::kTargetRate};
}

Eigen::VectorXd hann_window(int length) {
  Eigen::VectorXd w(length);
  for (int i = 0; i < length; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  return w;
}

Eigen::MatrixXd stft(const AudioClip& clip) {
  if (clip.channels() != 1 || clip.sample_rate != audio::kTargetRate) {
    throw FormatError("stft expects mono 16 kHz audio");
  }
  const Eigen::Index n = clip.length();
  if (n < audio::kWindow) {
    throw InputTooShortError("clip of " + std::to_string(n) + " samples is shorter than one " +
                             std::to_string(audio::kWindow) + "-sample window");
  }
  const Eigen::Index frames = (n - audio::kWindow) / audio::kHop + 1;
  const Eigen::VectorXd window = hann_window(audio::kWindow);

  Eigen::FFT<double> fft;
  std::vector<double> frame(audio::kFftSize, 0.0);
  std::vector<std::complex<double>> spectrum;
  Eigen::MatrixXd mags(frames, audio::kBins);
  for (Eigen::Index f = 0; f < frames; ++f) {
    const Eigen::Index start = f * audio::kHop;
    for (int i = 0; i < audio::kWindow; ++i) frame[i] = clip.samples(0, start + i) * window[i];
    fft.fwd(spectrum, frame);
    for (int b = 0; b < audio::kBins; ++b) mags(f, b) = std::abs(spectrum[b]);
  }
  return mags;
}

const Eigen::MatrixXd& mel_filterbank() {
  static const Eigen::MatrixXd bank = [] {
    const double lo = hz_to_mel(audio::kMelLowHz);
    const double hi = hz_to_mel(audio::kMelHighHz);
    Eigen::VectorXd edges = Eigen::VectorXd::LinSpaced(audio::kMelBands + 2, lo, hi);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(audio::kMelBands, audio::kBins);
    for (int b = 1; b < audio::kBins; ++b) {  // DC carries no band energy
      const double mel = hz_to_mel(static_cast<double>(b) * audio::kTargetRate / audio::kFftSize);
      for (int band = 0; band < audio::kMelBands; ++band) {
        const double left = edges[band], center = edges[band + 1], right = edges[band + 2];
        const double rising = (mel - left) / (center - left);
        const double falling = (right - mel) / (right - center);
        w(band, b) = std::max(0.0, std::min(rising, falling));
      }
    }
    return w;
  }();
  return bank;
}

LogMelPatch log_mel(const Eigen::MatrixXd& magnitudes) {
  if (magnitudes.cols() != audio::kBins) {
    throw DimensionError("log_mel expects " + std::to_string(audio::kBins) + " frequency bins, got " +
                         std::to_string(magnitudes.cols()));
  }
  if (magnitudes.rows() < audio::kPatchFrames) {
    throw InputTooShortError("log_mel needs at least " + std::to_string(audio::kPatchFrames) + " frames, got " +
                             std::to_string(magnitudes.rows()));
  }
  const Eigen::MatrixXd power = magnitudes.topRows(audio::kPatchFrames).array().square();
  LogMelPatch patch = power * mel_filterbank().transpose();
  patch = (patch.array() + audio::kLogOffset).log();
  return patch;
}

LogMelPatch audio_pipeline(const AudioClip& clip) { return log_mel(stft(downmix_resample(clip))); }

}  // namespace avc
