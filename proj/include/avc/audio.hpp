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

namespace avc {

// Multichannel PCM clip. Rows are channels, columns are samples in [-1, 1].
struct AudioClip {
  Eigen::MatrixXd samples;
  int sample_rate = 16000;

  Eigen::Index channels() const { return samples.rows(); }
  Eigen::Index length() const { return samples.cols(); }
};

// Time x mel-band log energies, 96 x 64.
using LogMelPatch = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace audio {

inline constexpr int kTargetRate = 16000;
inline constexpr int kRecordingRate = 48000;
inline constexpr int kWindow = 400;
inline constexpr int kHop = 160;
inline constexpr int kFftSize = 512;
inline constexpr int kBins = kFftSize / 2 + 1;
inline constexpr int kMelBands = 64;
inline constexpr int kPatchFrames = 96;
inline constexpr double kMelLowHz = 125.0;
inline constexpr double kMelHighHz = 7500.0;
inline constexpr double kLogOffset = 0.01;
inline constexpr int kResampleTaps = 63;
inline constexpr double kResampleCutoffHz = 7200.0;

// Minimum 16 kHz length that still yields a full patch.
inline constexpr int kMinSamples = kWindow + (kPatchFrames - 1) * kHop;

}  // namespace audio

// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Low-pass FIR used ahead of the 3:1 decimation (unit DC gain).
Eigen::VectorXd resampling_filter();

// Averages channels to mono and brings 48 kHz input to 16 kHz.
AudioClip downmix_resample(const AudioClip& clip);

// Periodic Hann window of the given length.
Eigen::VectorXd hann_window(int length);

// Magnitude STFT of a mono 16 kHz clip: frames x 257.
Eigen::MatrixXd stft(const AudioClip& clip);

// 64 x 257 triangular filterbank (rows are bands).
const Eigen::MatrixXd& mel_filterbank();

// Log mel energies of the first 96 frames of a magnitude spectrogram.
LogMelPatch log_mel(const Eigen::MatrixXd& magnitudes);

// downmix_resample -> stft -> log_mel.
LogMelPatch audio_pipeline(const AudioClip& clip);

// 16-bit PCM WAV I/O. Samples are scaled by 1/32768 on read.
AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace avc
