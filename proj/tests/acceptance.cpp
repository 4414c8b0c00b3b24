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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "avc/corruption.hpp"
#include "avc/density.hpp"
#include "avc/diagnostics.hpp"
#include "avc/runtime.hpp"
#include "avc/synth.hpp"
#include "avc/train.hpp"
#include "test_util.hpp"

namespace avc {
namespace {

using testing::op_gradient_error;
using testing::random_tensor;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void note(const std::string& s) {
  std::fprintf(stderr, "  %s\n", s.c_str());
  std::fflush(stderr);
}

// ---------------------------------------------------------------------------

Verdict gradient_suite() {
  double worst_op = 0;
  std::string worst_name;
  auto check = [&](const std::string& name, const std::function<Tensor<double>()>& op,
                   const std::vector<std::pair<std::string, Tensor<double>>>& inputs) {
    const double e = op_gradient_error(op, inputs);
    note(fmt("op %-22s max rel error %.3e", name.c_str(), e));
    if (e >= worst_op) {
      worst_op = e;
      worst_name = name;
    }
  };
  const auto x = random_tensor({3, 6, 8}, 1), y = random_tensor({3, 6, 8}, 2);
  const auto w = random_tensor({4, 3, 3, 3}, 3), b = random_tensor({4}, 4);
  const auto w1 = random_tensor({4, 3, 1, 1}, 5);
  const auto s = random_tensor({3}, 6), t = random_tensor({3}, 7);
  const auto v = random_tensor({12}, 8), fw = random_tensor({5, 12}, 9), fb = random_tensor({5}, 10);
  const auto target = random_tensor({3, 6, 8}, 11, false);
  check("conv2d", [&] { return conv2d(x, w, b, 1, 1); }, {{"x", x}, {"w", w}, {"b", b}});
  check("conv2d dilated", [&] { return conv2d(x, w, b, 2, 2); }, {{"x", x}, {"w", w}, {"b", b}});
  check("conv2d 1x1", [&] { return conv2d(x, w1, b); }, {{"x", x}, {"w", w1}, {"b", b}});
  check("fully_connected", [&] { return fully_connected(v, fw, fb); }, {{"x", v}, {"w", fw}, {"b", fb}});
  check("relu", [&] { return relu(x); }, {{"x", x}});
  check("max_pool2", [&] { return max_pool2(x); }, {{"x", x}});
  check("global_avg_pool", [&] { return global_avg_pool(x); }, {{"x", x}});
  check("elementwise_affine", [&] { return elementwise_affine(x, s, t); }, {{"x", x}, {"s", s}, {"t", t}});
  check("upsample_bilinear x8", [&] { return upsample_bilinear(x, 8); }, {{"x", x}});
  check("slice_front", [&] { return slice_front(v, 7); }, {{"x", v}});
  check("reshape", [&] { return reshape(x, {18, 8}); }, {{"x", x}});
  check("add", [&] { return add(x, y); }, {{"x", x}, {"y", y}});
  check("mul", [&] { return mul(x, y); }, {{"x", x}, {"y", y}});
  check("scale", [&] { return scale(x, 0.3); }, {{"x", x}});
  check("sum", [&] { return sum(x); }, {{"x", x}});
  check("sse_loss", [&] { return sse_loss(x, target); }, {{"x", x}});

  const ModelGradCheck model = model_gradcheck(1);
  bool all_live = true;
  for (const auto& e : model.entries) {
    note(fmt("model %-22s max rel error %.3e (norm-wise %.3e)", e.name.c_str(), e.max_rel_error, e.norm_rel_error));
    all_live &= e.analytic_norm > 0;
  }
  const bool pass = worst_op < 1e-5 && model.worst_max_rel_error < 1e-3 && all_live;
  return {pass, fmt("worst op %s %.2e (< 1e-5); model %zu tensors, worst %.2e (< 1e-3)%s", worst_name.c_str(),
                    worst_op, model.entries.size(), model.worst_max_rel_error,
                    all_live ? "" : "; some parameter received no gradient")};
}

// ---------------------------------------------------------------------------

Verdict dsp_shapes() {
  SplitMix64 rng(12);
  AudioClip clip{Eigen::MatrixXd(1, 16000), 16000};
  for (Eigen::Index i = 0; i < clip.samples.size(); ++i) clip.samples(0, i) = rng.uniform(-0.5, 0.5);
  const Eigen::MatrixXd mags = stft(clip);
  const LogMelPatch patch = audio_pipeline(clip);

  double worst = 0;
  const double two_pi = 2.0 * std::numbers::pi;
  for (Eigen::Index f = 0; f < mags.rows(); ++f) {
    for (int k = 0; k < audio::kBins; ++k) {
      std::complex<double> acc = 0;
      for (int n = 0; n < audio::kWindow; ++n) {
        const double hann = 0.5 * (1.0 - std::cos(two_pi * n / audio::kWindow));
        acc += clip.samples(0, f * audio::kHop + n) * hann * std::polar(1.0, -two_pi * k * n / audio::kFftSize);
      }
      const double ref = std::abs(acc);
      worst = std::max(worst, std::abs(mags(f, k) - ref) / std::max(ref, 1e-12));
    }
  }
  const bool pass = mags.rows() == 98 && mags.cols() == 257 && patch.rows() == 96 && patch.cols() == 64 && worst < 1e-6;
  return {pass, fmt("stft %ldx%ld, patch %ldx%ld, worst |fft - dft| / dft %.2e", static_cast<long>(mags.rows()),
                    static_cast<long>(mags.cols()), static_cast<long>(patch.rows()), static_cast<long>(patch.cols()),
                    worst)};
}

// ---------------------------------------------------------------------------

Verdict mass_conservation() {
  SplitMix64 rng(13);
  double worst = 0;
  long border = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 249), h = 8 + static_cast<int>(rng() % 137);
    HeadAnnotations a{{}, w, h};
    const int n = static_cast<int>(rng() % 301);
    for (int i = 0; i < n; ++i) {
      double x = rng.uniform(0, w), y = rng.uniform(0, h);
      if (rng() % 4 == 0) {
        // Within one kernel radius of an edge.
        x = rng() % 2 ? rng.uniform(0, 7) : rng.uniform(w - 7, w - 1e-9);
        ++border;
      }
      a.points.push_back({std::clamp(x, 0.0, w - 1e-9), y});
    }
    worst = std::max(worst, std::abs(count_from_density(density_from_heads(a)) - n));
  }
  return {worst < 1e-6, fmt("1000 sets, %ld border heads, worst |sum - count| %.2e", border, worst)};
}

// ---------------------------------------------------------------------------

Verdict corruption_exactness() {
  int mismatches = 0, cases = 0;
  for (int w : {1, 7, 64, 255, 256, 1000, 1024, 1920}) {
    for (int h : {1, 5, 144, 576, 1080}) {
      for (double r : {0.0, 0.01, 0.1, 0.25, 0.3, 0.5, 0.64, 0.9, 1.0}) {
        const Rect s = occlusion_rect_size(w, h, r);
        ++cases;
        mismatches += s.width != static_cast<int>(w * std::sqrt(r)) || s.height != static_cast<int>(h * std::sqrt(r));
      }
    }
  }
  const Rect big = occlusion_rect_size(1024, 576, 0.25);
  const OcclusionResult occluded = occlude(Image(1024, 576, 0.5f), 0.25, 14);
  long black = 0;
  for (Eigen::Index i = 0; i < occluded.image.channels[0].size(); ++i) black += occluded.image.channels[0].data()[i] == 0;

  const Image dark = darken(testing::random_image(256, 144, 15), 0.0, 16, true).image;
  bool all_zero = true;
  for (const auto& c : dark.channels) all_zero &= (c == 0.0f).all();

  const double sigma = 25.0 / 255.0;
  const Image noisy = add_noise(Image(256, 256, 0.5f), std::nullopt, sigma, 17);
  double ss = 0, sm = 0;
  long n = 0;
  for (const auto& c : noisy.channels) {
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      sm += c.data()[i] - 0.5;
      ss += (c.data()[i] - 0.5) * (c.data()[i] - 0.5);
      ++n;
    }
  }
  const double sd = std::sqrt(ss / n - (sm / n) * (sm / n));
  const double rel = std::abs(sd - sigma) / sigma;
  const bool pass = mismatches == 0 && big.width == 512 && big.height == 288 && black == 512L * 288 && all_zero &&
                    rel < 0.05;
  return {pass, fmt("%d/%d rect sizes exact, 1024x576@0.25 -> %dx%d (%ld black px), R=0 all zero: %s, "
                    "noise std %.5f vs %.5f (%.2f%%)",
                    cases - mismatches, cases, big.width, big.height, black, all_zero ? "yes" : "no", sd, sigma,
                    100 * rel)};
}

// ---------------------------------------------------------------------------

Verdict film_identity() {
  int outputs = 0;
  bool identical = true;
  bool live = true;
  for (double width : {0.25, 0.5, 1.0}) {
    ModelConfig cfg;
    cfg.base_width = width;
    cfg.seed = 18;
    const AvcModel<float> av(cfg);
    cfg.audio_enabled = false;
    const AvcModel<float> vision(cfg);
    const Tensor<float> img = image_to_tensor<float>(testing::random_image(256, 144, 19));
    // The head starts at zero, so the fused features are compared as well.
    const Vec<float> ref_features = vision.backend_forward(img, std::nullopt).value();
    const Vec<float> ref = vision.forward(img, std::nullopt).value();
    live &= !ref_features.isZero();
    SceneSpec spec;
    for (std::uint64_t k = 0; k < 4; ++k) {
      LogMelPatch patch = audio_pipeline(generate_scene(spec, k).clip);
      if (k == 3) patch.setConstant(1e3);
      const Tensor<float> p = patch_to_tensor<float>(patch);
      identical &= av.backend_forward(img, p).value() == ref_features;
      identical &= av.forward(img, p).value() == ref;
      ++outputs;
    }
  }
  return {identical && live,
          fmt("%d audiovisual outputs and fused feature maps over 3 widths, bitwise equal to vision-only: %s", outputs,
              identical ? "yes" : "no")};
}

// ---------------------------------------------------------------------------

struct Benchmark {
  Dataset train, val, test;
};

struct RunSummary {
  double test_mae = 0;
  int best_epoch = 0;
  std::string checkpoint;
  std::string history;
};

constexpr int kEpochs = 12;

ModelConfig bench_model(std::uint64_t seed, bool audio) {
  ModelConfig cfg;
  cfg.base_width = 0.5;
  cfg.seed = seed;
  cfg.audio_enabled = audio;
  return cfg;
}

TrainConfig bench_training(std::uint64_t seed, double brightness, double noise) {
  TrainConfig c;
  c.lr = 1e-4;
  c.lr_decay = 0.99;
  c.weight_decay = 1e-4;
  c.batch_size = 4;
  c.max_epochs = kEpochs;
  c.seed = seed;
  CorruptionSpec dark;
  dark.mode = CorruptionMode::darken_noise;
  dark.brightness = brightness;
  dark.deterministic = true;
  dark.noise_level = noise;
  dark.seed = seed;
  c.corruption = dark;
  return c;
}

const Benchmark& benchmark() {
  static const Benchmark b = [] {
    SceneSpec spec;  // 256x144, 1..40 people
    spec.seed = 2026;
    Benchmark out;
    out.train = synthesize_dataset(spec, 0, 600);
    out.val = synthesize_dataset(spec, 10000, 100);
    out.test = synthesize_dataset(spec, 20000, 100);
    return out;
  }();
  return b;
}

RunSummary run(std::uint64_t seed, bool audio, double brightness, double noise) {
  const Benchmark& b = benchmark();
  AvcModel<float> model(bench_model(seed, audio));
  const TrainConfig cfg = bench_training(seed, brightness, noise);
  const TrainResult r = train(model, b.train, b.val, cfg);
  model.load(r.best_checkpoint);
  RunSummary s;
  s.test_mae = evaluate(model, b.test, cfg.corruption).mae;
  s.best_epoch = r.best_epoch;
  std::ostringstream os;
  write_checkpoint(os, r.best_checkpoint);
  s.checkpoint = os.str();
  s.history = history_csv(r.history);
  note(fmt("%s seed %llu R=%.1f B=%.0f: test MAE %.3f (best epoch %d, val MAE %.3f)", audio ? "audiovisual" : "vision",
           static_cast<unsigned long long>(seed), brightness, noise, s.test_mae, r.best_epoch, r.best_val_mae));
  return s;
}

RunSummary* first_av_run = nullptr;

Verdict low_light_replication() {
  double av_sum = 0, vision_sum = 0;
  std::string per_seed;
  static RunSummary first;
  for (std::uint64_t seed : {1, 2, 3}) {
    const RunSummary av = run(seed, true, 0.2, 50);
    const RunSummary vision = run(seed, false, 0.2, 50);
    if (seed == 1) {
      first = av;
      first_av_run = &first;
    }
    av_sum += av.test_mae;
    vision_sum += vision.test_mae;
    per_seed += fmt(" %.3f", av.test_mae / vision.test_mae);
  }
  const double ratio = av_sum / vision_sum;
  return {ratio <= 0.9, fmt("mean test MAE audiovisual %.3f vs vision %.3f, ratio %.3f (<= 0.9); per seed:%s; "
                            "%d epochs each",
                            av_sum / 3, vision_sum / 3, ratio, per_seed.c_str(), kEpochs)};
}

Verdict black_image_replication() {
  const Benchmark& b = benchmark();
  std::vector<double> counts;
  for (const auto& s : b.test) counts.push_back(s.count);
  std::sort(counts.begin(), counts.end());
  const double median = 0.5 * (counts[(counts.size() - 1) / 2] + counts[counts.size() / 2]);
  double constant_mae = 0;
  for (double c : counts) constant_mae += std::abs(c - median);
  constant_mae /= static_cast<double>(counts.size());
  const RunSummary av = run(1, true, 0.0, 0.0);
  const double gain = 1.0 - av.test_mae / constant_mae;
  return {gain >= 0.2, fmt("black images: audiovisual test MAE %.3f vs best constant (test median %.1f) %.3f, "
                           "improvement %.1f%% (>= 20%%)",
                           av.test_mae, median, constant_mae, 100 * gain)};
}

// ---------------------------------------------------------------------------

Verdict metrics_arithmetic() {
  const std::vector<CountPair> hand{{3, 4}, {7, 5}};
  const EvalResult r = compute_metrics(hand);
  const bool exact = std::abs(r.mae - 1.5) < 1e-15 && std::abs(r.mse - std::sqrt(2.5)) < 1e-15;
  SplitMix64 rng(20);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<CountPair> p(1 + rng() % 100);
    for (auto& x : p) x = {static_cast<double>(rng() % 400), rng.uniform(-20, 420)};
    const EvalResult e = compute_metrics(p);
    violations += !(e.mae >= 0 && e.mse >= e.mae * (1 - 1e-15));
  }
  return {exact && violations == 0,
          fmt("[3,7] vs [4,5] -> MAE %.4f, MSE %.4f; mse >= mae violated in %d of 1000 sets", r.mae, r.mse, violations)};
}

Verdict determinism() {
  if (first_av_run == nullptr) low_light_replication();
  const RunSummary again = run(1, true, 0.2, 50);
  const bool same_ckpt = again.checkpoint == first_av_run->checkpoint;
  const bool same_history = again.history == first_av_run->history;
  return {same_ckpt && same_history, fmt("rerun of audiovisual seed 1: checkpoint (%zu bytes) %s, history %s",
                                         again.checkpoint.size(), same_ckpt ? "identical" : "differs",
                                         same_history ? "identical" : "differs")};
}

}  // namespace
}  // namespace avc

int main(int argc, char** argv) {
  using namespace avc;
  using Clock = std::chrono::steady_clock;
  tune_allocator();

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::stoi(argv[i]));
  const auto selected = [&](int k) { return wanted.empty() || wanted.count(k) > 0; };

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    Verdict (*fn)();
  };
  // Criteria 6, 7 and 9 share one budget: the benchmark and all their runs.
  const Criterion criteria[] = {
      {1, "gradient suite", 120, gradient_suite},
      {2, "DSP shapes and DFT oracle", 30, dsp_shapes},
      {3, "density mass conservation", 60, mass_conservation},
      {4, "corruption exactness", 30, corruption_exactness},
      {5, "FiLM identity at initialization", 30, film_identity},
      {6, "low-light directional replication", 1800, low_light_replication},
      {7, "black-image endpoint replication", 1800, black_image_replication},
      {8, "metrics arithmetic", 10, metrics_arithmetic},
      {9, "training determinism", 1800, determinism},
  };

  int failures = 0;
  double shared_seconds = 0;
  for (const auto& c : criteria) {
    if (!selected(c.id)) continue;
    std::fprintf(stderr, "criterion %d: %s\n", c.id, c.name);
    const auto start = Clock::now();
    Verdict v;
    try {
      v = c.fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool shared = c.id == 6 || c.id == 7 || c.id == 9;
    if (shared) shared_seconds += seconds;
    const double charged = shared ? shared_seconds : seconds;
    const bool in_time = charged < c.budget_s;
    const bool pass = v.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s; %.1f s%s (budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), seconds, shared ? fmt(", %.1f s cumulative", shared_seconds).c_str() : "",
                c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
