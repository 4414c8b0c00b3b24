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

// avc-lab: data generation, corruption, spectrograms, training, evaluation
// and the illumination / occlusion sweeps.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "avc/audio.hpp"
#include "avc/brisque.hpp"
#include "avc/config.hpp"
#include "avc/corruption.hpp"
#include "avc/density.hpp"
#include "avc/diagnostics.hpp"
#include "avc/errors.hpp"
#include "avc/image.hpp"
#include "avc/model.hpp"
#include "avc/runtime.hpp"
#include "avc/serialize.hpp"
#include "avc/synth.hpp"
#include "avc/train.hpp"

namespace fs = std::filesystem;
using namespace avc;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

// Flag problems detected after parsing; reported as usage errors.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void log_config(const std::string& title, const KeyValues& kv) {
  std::cerr << "[" << title << "]\n";
  for (const auto& [k, v] : kv) std::cerr << "  " << k << " = " << v << "\n";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

Size2 parse_size(const std::string& flag, const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t a = 0, b = 0;
    const int w = std::stoi(text.substr(0, x), &a);
    const int h = std::stoi(text.substr(x + 1), &b);
    if (a != x || b != text.size() - x - 1 || w <= 0 || h <= 0) throw std::invalid_argument(text);
    return {w, h};
  } catch (const std::exception&) {
    throw UsageError(flag + ": expected WIDTHxHEIGHT, got \"" + text + "\"");
  }
}

// --- corruption flags ------------------------------------------------------

struct CorruptionFlags {
  std::string mode;
  double brightness = 1.0;
  std::optional<double> noise_level;
  std::optional<double> sigma;
  double occlusion_rate = 0.0;
  std::string target;
  std::uint64_t seed = 0;
  bool deterministic = false;

  void add(CLI::App* app) {
    app->add_option("--mode", mode, "darken_noise | fixed_noise | occlude | low_res");
    app->add_option("--R", brightness, "Brightness rate R in [0,1]");
    app->add_flag("--deterministic", deterministic, "Darken by exactly R instead of R*U(0,1)");
    app->add_option("--or", occlusion_rate, "Occlusion rate O_r in [0,1]");
    app->add_option("--B", noise_level, "Noise level B on the 8-bit scale (sigma^2 = U*(B/255)^2)");
    app->add_option("--sigma", sigma, "Fixed noise std on the [0,1] scale (e.g. 0.098 for 25/255)");
    app->add_option("--target", target, "low_res target WIDTHxHEIGHT");
    app->add_option("--corruption-seed", seed, "Seed for corruption randomness");
  }

  std::optional<CorruptionSpec> resolve() const {
    if (mode.empty()) return std::nullopt;
    CorruptionSpec spec;
    try {
      spec.mode = parse_corruption_mode(mode);
    } catch (const SpecError& e) {
      throw UsageError(std::string("--mode: ") + e.what());
    }
    spec.brightness = brightness;
    spec.noise_level = noise_level;
    spec.sigma_fixed = sigma;
    spec.occlusion_rate = occlusion_rate;
    if (!target.empty()) spec.target = parse_size("--target", target);
    spec.seed = seed;
    spec.deterministic = deterministic;
    try {
      spec.validate();
    } catch (const SpecError& e) {
      throw UsageError(e.what());
    }
    return spec;
  }
};

KeyValues corruption_kv(const std::optional<CorruptionSpec>& spec) {
  if (!spec) return {{"mode", "none"}};
  KeyValues kv{{"mode", to_string(spec->mode)}, {"seed", std::to_string(spec->seed)}};
  switch (spec->mode) {
    case CorruptionMode::darken_noise:
      kv["R"] = fmt(spec->brightness);
      kv["deterministic"] = spec->deterministic ? "1" : "0";
      [[fallthrough]];
    case CorruptionMode::fixed_noise:
      if (spec->noise_level) kv["B"] = fmt(*spec->noise_level);
      if (spec->sigma_fixed) kv["sigma"] = fmt(*spec->sigma_fixed);
      break;
    case CorruptionMode::occlude:
      kv["O_r"] = fmt(spec->occlusion_rate);
      break;
    case CorruptionMode::low_res:
      kv["target"] = std::to_string(spec->target->width) + "x" + std::to_string(spec->target->height);
      break;
  }
  return kv;
}

// --- model and training flags ----------------------------------------------

struct ModelFlags {
  std::string config_path;
  std::optional<double> base_width;
  bool no_audio = false;
  bool film_shared = false;
  std::optional<int> film_hidden;

  void add(CLI::App* app, bool audio_toggle = true) {
    app->add_option("--model-config", config_path, "Model config file (key=value)")->check(CLI::ExistingFile);
    app->add_option("--base-width", base_width, "Scale every layer width by this factor");
    if (audio_toggle) app->add_flag("--no-audio", no_audio, "Vision-only variant (identity modulation)");
    app->add_flag("--film-shared", film_shared, "One modulation network shared by all fusion blocks");
    app->add_option("--film-hidden", film_hidden, "Hidden width of the modulation networks (0: single layer)");
  }

  ModelConfig resolve(std::uint64_t seed) const {
    try {
      ModelConfig cfg = config_path.empty() ? ModelConfig{} : ModelConfig::from_key_values(read_key_values(config_path));
      if (base_width) cfg.base_width = *base_width;
      if (no_audio) cfg.audio_enabled = false;
      if (film_shared) cfg.film_shared = true;
      if (film_hidden) cfg.film_hidden = *film_hidden;
      cfg.seed = seed;
      cfg.validate();
      return cfg;
    } catch (const SpecError& e) {
      throw UsageError(e.what());
    }
  }
};

struct TrainFlags {
  TrainConfig cfg;

  void add(CLI::App* app) {
    app->add_option("--lr", cfg.lr, "Initial learning rate")->capture_default_str();
    app->add_option("--lr-decay", cfg.lr_decay, "Per-epoch learning-rate factor")->capture_default_str();
    app->add_option("--weight-decay", cfg.weight_decay, "L2 weight decay")->capture_default_str();
    app->add_option("--batch-size", cfg.batch_size, "Images per optimizer step")->capture_default_str();
    app->add_option("--epochs", cfg.max_epochs, "Number of epochs")->capture_default_str();
  }

  TrainConfig resolve(std::uint64_t seed, const std::optional<CorruptionSpec>& corruption) const {
    TrainConfig c = cfg;
    c.seed = seed;
    c.corruption = corruption;
    try {
      c.validate();
    } catch (const SpecError& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

KeyValues train_kv(const TrainConfig& c) {
  return {{"lr", fmt(c.lr)},
          {"lr_decay", fmt(c.lr_decay)},
          {"weight_decay", fmt(c.weight_decay)},
          {"batch_size", std::to_string(c.batch_size)},
          {"epochs", std::to_string(c.max_epochs)},
          {"seed", std::to_string(c.seed)}};
}

Dataset load_split(const std::string& flag, const std::string& manifest) {
  Dataset d = load_dataset(manifest);
  if (d.empty()) throw InputError(flag + ": manifest " + manifest + " lists no scenes");
  std::cerr << "loaded " << d.size() << " scenes from " << manifest << "\n";
  return d;
}

void log_epoch(const EpochRecord& r) {
  std::cerr << "epoch " << r.epoch << " lr " << r.lr << " train_loss " << r.train_loss << " val_mae " << r.val_mae
            << " val_mse " << r.val_mse << "\n";
}

// --- subcommands -------------------------------------------------------------

struct Common {
  std::string out = ".";
  std::uint64_t seed = 0;
};

int run_synth(const Common& common, SceneSpec spec, std::size_t n, std::uint64_t first) {
  spec.seed = common.seed;
  try {
    spec.validate();
  } catch (const SpecError& e) {
    throw UsageError(e.what());
  }
  log_config("scene", spec.to_key_values());
  ensure_dir(common.out);
  write_text(fs::path(common.out) / "scene.cfg", format_key_values(spec.to_key_values()));
  const auto rows = generate_dataset(spec, n, common.out, first);
  std::cerr << "wrote " << rows.size() << " scenes to " << common.out << "\n";
  return 0;
}

int run_spectrogram(const Common& common, const std::string& in) {
  const AudioClip clip = read_wav(in);
  log_config("spectrogram", {{"in", in}, {"channels", std::to_string(clip.channels())},
                             {"sample_rate", std::to_string(clip.sample_rate)}});
  const Eigen::MatrixXd mags = stft(downmix_resample(clip));
  const LogMelPatch patch = log_mel(mags);
  ensure_dir(common.out);
  std::ostringstream os;
  os << std::setprecision(9);
  for (Eigen::Index r = 0; r < patch.rows(); ++r) {
    for (Eigen::Index c = 0; c < patch.cols(); ++c) os << (c ? "," : "") << patch(r, c);
    os << "\n";
  }
  write_text(fs::path(common.out) / "logmel.csv", os.str());
  StoredTensor t{{static_cast<std::uint64_t>(patch.rows()), static_cast<std::uint64_t>(patch.cols())}, {}};
  for (Eigen::Index i = 0; i < patch.size(); ++i) t.data.push_back(static_cast<float>(patch.data()[i]));
  save_tensor(fs::path(common.out) / "logmel.avct", t);
  std::cout << "stft " << mags.rows() << "x" << mags.cols() << ", log-mel " << patch.rows() << "x" << patch.cols()
            << "\n";
  return 0;
}

int run_density(const Common& common, const std::string& ann_path, const std::string& image_path, int width,
                int height) {
  if (!image_path.empty()) {
    const Image img = read_ppm(image_path);
    width = img.width();
    height = img.height();
  }
  if (width <= 0 || height <= 0) throw UsageError("density: give --image or both --width and --height");
  const HeadAnnotations ann = read_annotations(ann_path, width, height);
  const DensityMap map = density_from_heads(ann);
  ensure_dir(common.out);
  StoredTensor t{{static_cast<std::uint64_t>(map.rows()), static_cast<std::uint64_t>(map.cols())}, {}};
  for (Eigen::Index i = 0; i < map.size(); ++i) t.data.push_back(static_cast<float>(map.data()[i]));
  save_tensor(fs::path(common.out) / "density.avct", t);
  std::cout << "heads " << ann.points.size() << ", density sum " << std::setprecision(12) << count_from_density(map)
            << "\n";
  return 0;
}

int run_corrupt(const Common& common, const std::string& in, const CorruptionFlags& flags, bool do_enhance,
                const std::string& brisque_path) {
  std::optional<CorruptionSpec> spec = flags.resolve();
  if (!spec) throw UsageError("corrupt: --mode is required");
  spec->seed = flags.seed ? flags.seed : common.seed;
  log_config("corruption", corruption_kv(spec));
  const Image img = read_ppm(in);
  Image out = apply_corruption(img, *spec);
  if (do_enhance) out = enhance(out);
  ensure_dir(common.out);
  write_ppm(fs::path(common.out) / "corrupted.ppm", out);

  std::optional<BrisqueModel> model;
  if (!brisque_path.empty()) model = BrisqueModel::load(brisque_path);
  // PSNR needs matching dims; a low_res output is compared on its own grid.
  const Image& reference = (out.width() == img.width() && out.height() == img.height()) ? img : out;
  std::ostringstream os;
  os << std::setprecision(10) << "metric,value\n";
  if (&reference == &img) os << "psnr," << psnr(img, out) << "\n";
  if (std::min(out.width(), out.height()) >= 32) {
    const QualityReport q = quality_report(reference, out, model ? &*model : nullptr);
    for (int i = 0; i < kBrisqueFeatures; ++i) os << "brisque_f" << i << "," << q.brisque_features[i] << "\n";
    if (q.brisque_score) os << "brisque_score," << *q.brisque_score << "\n";
  }
  write_text(fs::path(common.out) / "quality.csv", os.str());
  return 0;
}

int run_train(const Common& common, const ModelFlags& mflags, const TrainFlags& tflags, const CorruptionFlags& cflags,
              const std::string& train_manifest, const std::string& val_manifest) {
  const ModelConfig mcfg = mflags.resolve(common.seed);
  std::optional<CorruptionSpec> corruption = cflags.resolve();
  if (corruption && !cflags.seed) corruption->seed = common.seed;
  const TrainConfig tcfg = tflags.resolve(common.seed, corruption);
  log_config("model", mcfg.to_key_values());
  log_config("train", train_kv(tcfg));
  log_config("corruption", corruption_kv(corruption));

  const Dataset train_set = load_split("--train", train_manifest);
  const Dataset val_set = load_split("--val", val_manifest);
  AvcModel<float> model(mcfg);
  const TrainResult result = train(model, train_set, val_set, tcfg, log_epoch);

  const fs::path out(common.out);
  ensure_dir(out);
  save_checkpoint(out / "model.avck", result.best_checkpoint);
  write_text(out / "model.cfg", format_key_values(mcfg.to_key_values()));
  write_history_csv(out / "history.csv", result.history);
  std::cerr << "best epoch " << result.best_epoch << " val_mae " << result.best_val_mae << "\n";
  return 0;
}

int run_eval(const Common& common, const std::string& checkpoint, std::string model_config, const CorruptionFlags& cflags,
             const std::string& data_manifest) {
  if (model_config.empty()) model_config = (fs::path(checkpoint).parent_path() / "model.cfg").string();
  ModelConfig mcfg;
  try {
    mcfg = ModelConfig::from_key_values(read_key_values(model_config));
  } catch (const SpecError& e) {
    throw UsageError(model_config + ": " + e.what());
  }
  std::optional<CorruptionSpec> corruption = cflags.resolve();
  if (corruption && !cflags.seed) corruption->seed = common.seed;
  log_config("model", mcfg.to_key_values());
  log_config("corruption", corruption_kv(corruption));

  AvcModel<float> model(mcfg);
  model.load(load_checkpoint(checkpoint));
  const Dataset data = load_split("--data", data_manifest);
  const EvalResult r = evaluate(model, data, corruption);
  ensure_dir(common.out);
  write_eval_csv(fs::path(common.out) / "eval.csv", r);
  std::cout << std::setprecision(6) << "mae " << r.mae << " mse " << r.mse << "\n";
  return 0;
}

struct SweepData {
  std::string train, val, test;
  void add(CLI::App* app) {
    app->add_option("--train", train, "Training manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--val", val, "Validation manifest")->required()->check(CLI::ExistingFile);
    app->add_option("--test", test, "Test manifest")->required()->check(CLI::ExistingFile);
  }
};

// Trains one audiovisual and one vision-only model per setting and reports
// their test errors under that setting's corruption.
int run_sweep(const Common& common, const ModelFlags& mflags, const TrainFlags& tflags, const SweepData& data,
              const std::string& column, const std::vector<double>& values,
              const std::function<CorruptionSpec(double)>& make_spec, const std::string& csv_name) {
  ModelConfig av = mflags.resolve(common.seed);
  av.audio_enabled = true;
  ModelConfig vo = av;
  vo.audio_enabled = false;
  std::vector<CorruptionSpec> specs;
  for (double v : values) {
    CorruptionSpec s = make_spec(v);
    s.seed = common.seed;
    try {
      s.validate();
    } catch (const SpecError& e) {
      throw UsageError(column + "=" + fmt(v) + ": " + e.what());
    }
    specs.push_back(s);
  }
  log_config("model", av.to_key_values());
  log_config("train", train_kv(tflags.resolve(common.seed, std::nullopt)));

  const Dataset train_set = load_split("--train", data.train);
  const Dataset val_set = load_split("--val", data.val);
  const Dataset test_set = load_split("--test", data.test);
  ensure_dir(common.out);

  std::ostringstream csv;
  csv << column << ",variant,test_mae,test_mse,best_epoch\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    log_config("corruption", corruption_kv(specs[i]));
    for (const ModelConfig* cfg : {&av, &vo}) {
      const std::string variant = cfg->audio_enabled ? "audiovisual" : "vision";
      AvcModel<float> model(*cfg);
      const TrainResult r = train(model, train_set, val_set, tflags.resolve(common.seed, specs[i]), log_epoch);
      model.load(r.best_checkpoint);
      const EvalResult ev = evaluate(model, test_set, specs[i]);
      std::cerr << column << "=" << values[i] << " " << variant << " test_mae " << ev.mae << " test_mse " << ev.mse
                << "\n";
      csv << std::setprecision(10) << values[i] << "," << variant << "," << ev.mae << "," << ev.mse << ","
          << r.best_epoch << "\n";
    }
  }
  write_text(fs::path(common.out) / csv_name, csv.str());
  return 0;
}

int run_gradcheck(std::uint64_t seed, double tolerance) {
  log_config("gradcheck", {{"seed", std::to_string(seed)}, {"tolerance", fmt(tolerance)}});
  const ModelGradCheck r = model_gradcheck(seed);
  std::cout << "parameter,elements,max_rel_error,norm_rel_error\n";
  for (const auto& e : r.entries) {
    std::cout << e.name << "," << e.checked << "," << std::setprecision(4) << std::scientific << e.max_rel_error << ","
              << e.norm_rel_error << std::defaultfloat << "\n";
  }
  std::cout << "worst max_rel_error " << std::scientific << r.worst_max_rel_error << "\n";
  return r.worst_max_rel_error < tolerance ? 0 : kRuntimeError;
}

int run(int argc, char** argv) {
  CLI::App app{"Audiovisual crowd counting laboratory", "avc-lab"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
  };

  // synth
  SceneSpec scene;
  std::size_t n_scenes = 10;
  std::uint64_t first_index = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic audiovisual crowd dataset");
  add_common(synth);
  synth->add_option("--n", n_scenes, "Number of scenes")->capture_default_str();
  synth->add_option("--first-index", first_index, "Index of the first scene")->capture_default_str();
  synth->add_option("--width", scene.width)->capture_default_str();
  synth->add_option("--height", scene.height)->capture_default_str();
  synth->add_option("--min-count", scene.min_count)->capture_default_str();
  synth->add_option("--max-count", scene.max_count)->capture_default_str();
  synth->add_option("--head-radius", scene.head_radius)->capture_default_str();
  synth->add_option("--head-contrast", scene.head_contrast)->capture_default_str();
  synth->add_option("--per-person-rms", scene.per_person_rms)->capture_default_str();

  // spectrogram
  std::string in_path;
  auto* spectro = app.add_subcommand("spectrogram", "Log-mel patch of a WAV clip");
  add_common(spectro);
  spectro->add_option("--in", in_path, "Input WAV")->required()->check(CLI::ExistingFile);

  // density
  std::string ann_path, image_path;
  int dens_w = 0, dens_h = 0;
  auto* density = app.add_subcommand("density", "Ground-truth density map from head annotations");
  add_common(density);
  density->add_option("--ann", ann_path, "Annotation CSV (x,y)")->required()->check(CLI::ExistingFile);
  density->add_option("--image", image_path, "Image whose dims the map takes")->check(CLI::ExistingFile);
  density->add_option("--width", dens_w);
  density->add_option("--height", dens_h);

  // corrupt
  CorruptionFlags corrupt_flags;
  bool do_enhance = false;
  std::string brisque_path;
  auto* corrupt = app.add_subcommand("corrupt", "Degrade an image and report its quality");
  add_common(corrupt);
  corrupt->add_option("--in", in_path, "Input PPM")->required()->check(CLI::ExistingFile);
  corrupt_flags.add(corrupt);
  corrupt->add_flag("--enhance", do_enhance, "Blur and equalize the corrupted image");
  corrupt->add_option("--brisque-model", brisque_path, "Linear quality model (intercept then 36 weights)")
      ->check(CLI::ExistingFile);

  // train
  ModelFlags model_flags;
  TrainFlags train_flags;
  CorruptionFlags train_corruption;
  std::string train_manifest, val_manifest;
  auto* train_cmd = app.add_subcommand("train", "Train a counting model");
  add_common(train_cmd);
  model_flags.add(train_cmd);
  train_flags.add(train_cmd);
  train_corruption.add(train_cmd);
  train_cmd->add_option("--train", train_manifest, "Training manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--val", val_manifest, "Validation manifest")->required()->check(CLI::ExistingFile);

  // eval
  std::string checkpoint, eval_model_config, data_manifest;
  CorruptionFlags eval_corruption;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint (.avck)")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--model-config", eval_model_config, "Model config (default: model.cfg beside the checkpoint)");
  eval_cmd->add_option("--data", data_manifest, "Manifest to evaluate")->required()->check(CLI::ExistingFile);
  eval_corruption.add(eval_cmd);

  // sweep-r
  std::vector<double> r_values{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double sweep_b = 50.0;
  SweepData sweep_data;
  auto* sweep_r = app.add_subcommand("sweep-r", "Test error against brightness R, audiovisual vs vision-only");
  add_common(sweep_r);
  model_flags.add(sweep_r, false);
  train_flags.add(sweep_r);
  sweep_data.add(sweep_r);
  sweep_r->add_option("--R", r_values, "Brightness values")->delimiter(',')->capture_default_str();
  sweep_r->add_option("--B", sweep_b, "Noise level B")->capture_default_str();

  // sweep-occlusion
  std::vector<double> or_values{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  auto* sweep_o = app.add_subcommand("sweep-occlusion", "Test error against occlusion rate, audiovisual vs vision-only");
  add_common(sweep_o);
  model_flags.add(sweep_o, false);
  train_flags.add(sweep_o);
  sweep_data.add(sweep_o);
  sweep_o->add_option("--or", or_values, "Occlusion rates")->delimiter(',')->capture_default_str();

  // gradcheck
  double tolerance = 1e-3;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the full desk-scale model");
  grad->add_option("--seed", common.seed)->capture_default_str();
  grad->add_option("--tolerance", tolerance, "Largest accepted relative error")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*synth) return run_synth(common, scene, n_scenes, first_index);
    if (*spectro) return run_spectrogram(common, in_path);
    if (*density) return run_density(common, ann_path, image_path, dens_w, dens_h);
    if (*corrupt) return run_corrupt(common, in_path, corrupt_flags, do_enhance, brisque_path);
    if (*train_cmd) return run_train(common, model_flags, train_flags, train_corruption, train_manifest, val_manifest);
    if (*eval_cmd) return run_eval(common, checkpoint, eval_model_config, eval_corruption, data_manifest);
    if (*sweep_r) {
      return run_sweep(
          common, model_flags, train_flags, sweep_data, "R", r_values,
          [&](double r) {
            CorruptionSpec s;
            s.mode = CorruptionMode::darken_noise;
            s.brightness = r;
            s.noise_level = sweep_b;
            s.deterministic = true;
            return s;
          },
          "sweep_r.csv");
    }
    if (*sweep_o) {
      return run_sweep(
          common, model_flags, train_flags, sweep_data, "O_r", or_values,
          [](double o) {
            CorruptionSpec s;
            s.mode = CorruptionMode::occlude;
            s.occlusion_rate = o;
            return s;
          },
          "sweep_occlusion.csv");
    }
    if (*grad) return run_gradcheck(common.seed, tolerance);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  return run(argc, argv);
}
