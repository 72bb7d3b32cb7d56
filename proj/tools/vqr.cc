/* Copyright 2026 The VQR Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command-line entry point: synth, train, eval, roc, stream, footprint and
// augment-preview.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vqr/augment.h"
#include "vqr/dataset.h"
#include "vqr/errors.h"
#include "vqr/eval.h"
#include "vqr/footprint.h"
#include "vqr/frontend.h"
#include "vqr/hyperparams.h"
#include "vqr/model.h"
#include "vqr/streaming.h"
#include "vqr/synth.h"
#include "vqr/training.h"
#include "vqr/wav.h"
#include "vqr/weights_io.h"

namespace fs = std::filesystem;

namespace vqr {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Optional overrides on top of a variant preset.
struct ModelFlags {
  std::string variant = "crnn-750m";
  int num_queries = 200;
  std::optional<int> conv_channels, conv_time, conv_freq, stride_freq;
  std::optional<int> gru_units, feature_channels, hidden_units;

  // With `check_only`, the model comes from a weights file and --variant and
  // --num-queries merely assert what it holds, so they have no default.
  void Register(CLI::App* app, bool check_only = false) {
    CLI::Option* v = app->add_option("--variant", variant, "crnn-750m, crnn-750 or rnn-750m");
    CLI::Option* q =
        app->add_option("--num-queries", num_queries, "known queries N (classes = N + 1)");
    if (check_only) return;
    v->capture_default_str();
    q->capture_default_str();
    app->add_option("--conv-channels", conv_channels, "c");
    app->add_option("--conv-time", conv_time, "m");
    app->add_option("--conv-freq", conv_freq, "n");
    app->add_option("--stride-freq", stride_freq, "frequency stride");
    app->add_option("--gru-units", gru_units, "k");
    app->add_option("--feature-channels", feature_channels, "d");
    app->add_option("--hidden-units", hidden_units, "classifier hidden units");
  }

  Hyperparams Build() const {
    Hyperparams hp = PresetFor(ParseVariant(variant));
    if (conv_channels) hp.conv_channels = *conv_channels;
    if (conv_time) hp.conv_time = *conv_time;
    if (conv_freq) hp.conv_freq = *conv_freq;
    if (stride_freq) hp.stride_freq = *stride_freq;
    if (gru_units) hp.gru_units = *gru_units;
    if (feature_channels) hp.feature_channels = *feature_channels;
    if (hidden_units) hp.hidden_units = *hidden_units;
    hp.num_classes = num_queries + 1;
    hp.Validate();
    return hp;
  }
};

// Every option of a subcommand with its effective value, as a config file
// section that can be passed back through --config.
std::string EffectiveConfig(const CLI::App& app) {
  std::ostringstream out;
  out << "[" << app.get_name() << "]\n";
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() || opt->get_configurable() == false) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->get_items_expected_max() == 0) {
      value = opt->count() > 0 ? "true" : "false";
    } else if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) continue;
    out << name << "=" << value << "\n";
  }
  return out.str();
}

struct RunFlags {
  std::string runs_root = "runs";
  std::string run_dir;

  void Register(CLI::App* app) {
    app->add_option("--runs-dir", runs_root, "parent of timestamped run directories")
        ->capture_default_str();
    app->add_option("--run-dir", run_dir, "exact run directory (overrides --runs-dir)");
  }

  // Creates the run directory and echoes the effective configuration into it.
  fs::path Open(const CLI::App& app, const std::string& command, std::uint64_t seed) const {
    fs::path dir;
    if (!run_dir.empty()) {
      dir = run_dir;
    } else {
      const std::time_t now = std::time(nullptr);
      char stamp[32];
      std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", std::localtime(&now));
      dir = fs::path(runs_root) / (command + "-" + stamp + "-seed" + std::to_string(seed));
    }
    fs::create_directories(dir);
    std::ofstream(dir / "config.ini") << EffectiveConfig(app);
    std::cerr << "run directory: " << dir.string() << "\n";
    return dir;
  }
};

std::ofstream OpenOutput(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(9);
  return out;
}

DatasetManifest SelectSplit(const DatasetManifest& manifest, const std::string& split) {
  if (split == "all") return manifest;
  const DatasetSplits splits = SplitDataset(manifest);
  if (split == "train") return splits.train;
  if (split == "validation") return splits.validation;
  if (split == "test") return splits.test;
  throw ConfigError("unknown split '" + split + "' (all, train, validation, test)");
}

// Loads weights and checks them against the requested class count.
Weights<float> LoadModel(const std::string& path, const CLI::App& app, const ModelFlags& model) {
  Weights<float> w = ReadWeightsFile(path);
  if (app.count("--num-queries") && w.hp.num_classes != model.num_queries + 1)
    throw ConfigError("weights have " + std::to_string(w.hp.num_classes - 1) +
                      " queries, --num-queries is " + std::to_string(model.num_queries));
  if (app.count("--variant") && w.hp.variant != ParseVariant(model.variant))
    throw ConfigError("weights are " + std::string(VariantName(w.hp.variant)) +
                      ", not " + model.variant);
  return w;
}

struct ScoredSplit {
  DatasetManifest manifest;
  std::vector<EvalRecord> records;
};

ScoredSplit ScoreSplit(const Weights<float>& w, const PcenFrontend& frontend,
                       const DatasetManifest& manifest) {
  if (manifest.records.empty()) throw DataError("split is empty");
  ScoredSplit out{manifest, {}};
  for (const ManifestRecord& r : manifest.records) {
    const PcenMatrix x = frontend.Compute(ReadWavFile(r.audio_path));
    out.records.push_back(MakeRecord(ForwardFull(w, x), r.label));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SynthCommand {
  SynthCorpusConfig cfg;
  std::string out_dir;

  void Register(CLI::App* app) {
    app->add_option("--out", out_dir, "corpus directory")->required();
    app->add_option("--num-queries", cfg.num_queries)->capture_default_str();
    app->add_option("--examples-per-query", cfg.examples_per_query)->capture_default_str();
    app->add_option("--num-unknown", cfg.num_unknown)->capture_default_str();
    app->add_option("--clip-seconds", cfg.clip_seconds)->capture_default_str();
    app->add_option("--seed", cfg.seed)->capture_default_str();
  }

  int Run() const {
    const DatasetManifest m = WriteSynthCorpus(cfg, out_dir);
    std::cout << "wrote " << m.records.size() << " clips to "
              << (fs::path(out_dir) / "manifest.tsv").string() << "\n";
    return 0;
  }
};

struct TrainCommand {
  ModelFlags model;
  RunFlags run;
  TrainConfig train;
  std::string manifest;
  bool no_augment = false;

  void Register(CLI::App* app) {
    model.Register(app);
    run.Register(app);
    app->add_option("--manifest", manifest, "path<TAB>label manifest")->required();
    app->add_option("--seed", train.seed)->capture_default_str();
    app->add_option("--epochs", train.total_epochs)->capture_default_str();
    app->add_option("--batch-size", train.batch_size)->capture_default_str();
    app->add_option("--momentum", train.momentum)->capture_default_str();
    app->add_option("--weight-decay", train.weight_decay)->capture_default_str();
    app->add_flag("--no-augment", no_augment, "train on clean audio");
  }

  int Run(const CLI::App& app) {
    train.augment = !no_augment;
    const Hyperparams hp = model.Build();
    train.Validate();
    const DatasetManifest all = LoadManifest(manifest, model.num_queries);
    const DatasetSplits splits = SplitDataset(all);
    const fs::path dir = run.Open(app, "train", train.seed);
    SaveManifest(dir / "train.tsv", splits.train);
    SaveManifest(dir / "validation.tsv", splits.validation);
    SaveManifest(dir / "test.tsv", splits.test);

    const LabeledAudio train_audio = LoadAudio(splits.train);
    const LabeledAudio val_audio = LoadAudio(splits.validation);
    const PcenFrontend frontend;
    fs::create_directories(dir / "checkpoints");
    std::ofstream metrics = OpenOutput(dir / "metrics.tsv");
    metrics << "epoch\tlr\ttrain_loss\tval_far\tval_qer\n";

    TrainCallbacks callbacks;
    callbacks.on_epoch = [&](const EpochMetrics& m, const Weights<float>& w) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%02d.vqrw", m.epoch);
      WriteWeightsFile(dir / "checkpoints" / name, w);
      metrics << m.epoch << '\t' << m.lr << '\t' << m.train_loss << '\t' << m.val_far << '\t'
              << m.val_qer << std::endl;
      std::cerr << "epoch " << m.epoch << " lr " << m.lr << " loss " << m.train_loss
                << " val_far " << m.val_far << " val_qer " << m.val_qer << "\n";
    };
    const TrainResult result = Train(train_audio, val_audio, hp, train, frontend, callbacks);
    WriteWeightsFile(dir / "final.vqrw", result.weights);
    std::cout << (dir / "final.vqrw").string() << "\n";
    return 0;
  }
};

struct EvalCommand {
  ModelFlags model;
  RunFlags run;
  std::string weights, manifest, split = "test";
  std::optional<double> alpha;
  double target_far = 0.01;
  std::uint64_t seed = 0;

  void Register(CLI::App* app) {
    model.Register(app, /*check_only=*/true);
    run.Register(app);
    app->add_option("--weights", weights)->required();
    app->add_option("--manifest", manifest)->required();
    app->add_option("--split", split, "all, train, validation or test")->capture_default_str();
    app->add_option("--alpha", alpha, "fixed threshold (default: picked on validation)");
    app->add_option("--target-far", target_far, "FAR target for threshold selection")
        ->capture_default_str();
    app->add_option("--seed", seed, "recorded in the run directory name")
        ->capture_default_str();
  }

  int Run(const CLI::App& app) {
    const Weights<float> w = LoadModel(weights, app, model);
    const int queries = w.hp.num_classes - 1;
    const int unknown = w.hp.UnknownClass();
    const DatasetManifest all = LoadManifest(manifest, queries);
    const PcenFrontend frontend;
    const fs::path dir = run.Open(app, "eval", seed);
    const std::vector<double> grid = DefaultAlphaGrid();

    std::ofstream summary = OpenOutput(dir / "summary.tsv");
    summary << "split\talpha\tfar\tqer\taccuracy\texamples\n";
    double chosen = alpha.value_or(0.0);
    if (!alpha) {
      const ScoredSplit val = ScoreSplit(w, frontend, SelectSplit(all, "validation"));
      const AlphaChoice pick = PickAlpha(val.records, target_far, grid, unknown);
      chosen = pick.alpha;
      summary << "validation\t" << pick.alpha << '\t' << pick.far << '\t' << pick.qer << '\t'
              << 1.0 - pick.qer << '\t' << val.records.size() << '\n';
    }
    const ScoredSplit scored = ScoreSplit(w, frontend, SelectSplit(all, split));
    const Rates rates = Score(scored.records, chosen, unknown);
    summary << split << '\t' << chosen << '\t' << rates.far << '\t' << rates.qer << '\t'
            << rates.Accuracy() << '\t' << scored.records.size() << '\n';

    std::ofstream roc = OpenOutput(dir / "roc.tsv");
    WriteRoc(roc, RocSweep(scored.records, grid, unknown));
    std::ofstream per_clip = OpenOutput(dir / "records.tsv");
    per_clip << "path\ttruth\tpred\ttop_prob\n";
    for (std::size_t i = 0; i < scored.records.size(); ++i) {
      const EvalRecord& r = scored.records[i];
      per_clip << scored.manifest.records[i].audio_path << '\t' << r.truth << '\t' << r.pred
               << '\t' << r.top_prob << '\n';
    }
    std::printf("split %s alpha %.6g far %.6f qer %.6f accuracy %.6f examples %zu\n",
                split.c_str(), chosen, rates.far, rates.qer, rates.Accuracy(),
                scored.records.size());
    return 0;
  }
};

struct RocCommand {
  ModelFlags model;
  std::string weights, manifest, split = "validation", out;

  void Register(CLI::App* app) {
    model.Register(app, /*check_only=*/true);
    app->add_option("--weights", weights)->required();
    app->add_option("--manifest", manifest)->required();
    app->add_option("--split", split, "all, train, validation or test")->capture_default_str();
    app->add_option("--out", out, "ROC file (default: standard output)");
  }

  int Run(const CLI::App& app) const {
    const Weights<float> w = LoadModel(weights, app, model);
    const DatasetManifest all = LoadManifest(manifest, w.hp.num_classes - 1);
    const ScoredSplit scored = ScoreSplit(w, PcenFrontend(), SelectSplit(all, split));
    const std::vector<double> grid = DefaultAlphaGrid();
    const std::vector<RocPoint> points = RocSweep(scored.records, grid, w.hp.UnknownClass());
    if (out.empty()) {
      WriteRoc(std::cout, points);
    } else {
      std::ofstream file = OpenOutput(out);
      WriteRoc(file, points);
    }
    return 0;
  }
};

// Least-squares slope of y against its index.
double Slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  const double mean_x = (n - 1) / 2.0;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dx = static_cast<double>(i) - mean_x;
    sxy += dx * (y[i] - mean_y);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

struct StreamCommand {
  ModelFlags model;
  std::string weights, input = "-";
  int interval_ms = 100;
  double alpha = 0.0;
  std::size_t chunk = 1600;
  bool profile = false;

  void Register(CLI::App* app) {
    model.Register(app, /*check_only=*/true);
    app->add_option("--weights", weights)->required();
    app->add_option("input", input, "WAV file, or '-' for raw 16-bit PCM on stdin")
        ->capture_default_str();
    app->add_option("--interval-ms", interval_ms)->capture_default_str();
    app->add_option("--alpha", alpha, "rejection threshold")->capture_default_str();
    app->add_option("--chunk", chunk, "samples per push")->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_flag("--profile", profile, "report per-hop latency and real-time factor");
  }

  int Run(const CLI::App& app) const {
    const Weights<float> w = LoadModel(weights, app, model);
    Waveform wave;
    if (input == "-") {
      std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(std::cin)),
                                      std::istreambuf_iterator<char>());
      wave = DecodeRawPcm16(bytes);
    } else {
      wave = ReadWavFile(input);
    }
    const PcenFrontend frontend;
    const StreamingRecognizer recognizer(w, frontend, {interval_ms, alpha});
    StreamState state = recognizer.Init();

    // Profiling pushes one hop at a time so each timing covers one hop.
    const std::size_t step = profile ? static_cast<std::size_t>(frontend.frame_config().HopSamples())
                                     : chunk;
    std::vector<double> hop_us;
    const auto begin = std::chrono::steady_clock::now();
    for (std::size_t at = 0; at < wave.size(); at += step) {
      const std::size_t n = std::min(step, wave.size() - at);
      const std::int64_t frames_before = state.frames_seen;
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<Prediction> preds =
          recognizer.Push(state, std::span<const float>(wave.samples).subspan(at, n));
      const auto t1 = std::chrono::steady_clock::now();
      if (profile && state.frames_seen > frames_before)
        hop_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
      for (const Prediction& p : preds)
        std::printf("%lld\t%d\t%.6f\n", static_cast<long long>(p.at_ms), p.label, p.top_prob);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();

    if (profile) {
      std::vector<double> sorted = hop_us;
      std::sort(sorted.begin(), sorted.end());
      auto pct = [&](double q) {
        return sorted.empty() ? 0.0 : sorted[static_cast<std::size_t>(q * (sorted.size() - 1))];
      };
      const double mean =
          sorted.empty() ? 0.0 : std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
      std::fprintf(stderr, "hops\t%zu\n", hop_us.size());
      std::fprintf(stderr, "hop_us_mean\t%.2f\n", mean);
      std::fprintf(stderr, "hop_us_p50\t%.2f\n", pct(0.5));
      std::fprintf(stderr, "hop_us_p99\t%.2f\n", pct(0.99));
      std::fprintf(stderr, "hop_us_slope_per_hop\t%.6f\n", Slope(hop_us));
      std::fprintf(stderr, "real_time_factor\t%.4f\n", elapsed / wave.DurationSeconds());
      std::fprintf(stderr, "state_core_bytes\t%zu\n", StateSizeBytes(state, w.hp));
      std::fprintf(stderr, "state_aux_bytes\t%zu\n",
                   AuxiliaryStateBytes(state, frontend.frame_config()));
    }
    return 0;
  }
};

struct FootprintCommand {
  ModelFlags model;
  int fps = 100;
  int cps = 10;

  void Register(CLI::App* app) {
    model.Register(app);
    app->add_option("--frames-per-second", fps)->capture_default_str();
    app->add_option("--classifications-per-second", cps)->capture_default_str();
  }

  int Run() const {
    const Hyperparams hp = model.Build();
    std::cout << FormatFootprint(hp, ComputeFootprint(hp, fps, cps));
    return 0;
  }
};

struct AugmentPreviewCommand {
  RunFlags run;
  std::vector<std::string> inputs;
  int count = 4;
  std::uint64_t seed = 0;
  double noise_prob = 0.5, band_prob = 0.5, pitch_prob = 0.5;

  void Register(CLI::App* app) {
    run.Register(app);
    app->add_option("inputs", inputs, "WAV files")->required()->check(CLI::ExistingFile);
    app->add_option("--count", count, "augmented copies per input")->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--noise-prob", noise_prob)->capture_default_str();
    app->add_option("--band-prob", band_prob)->capture_default_str();
    app->add_option("--pitch-prob", pitch_prob)->capture_default_str();
  }

  int Run(const CLI::App& app) const {
    AugmentConfig cfg;
    cfg.noise_prob = noise_prob;
    cfg.band_prob = band_prob;
    cfg.pitch_prob = pitch_prob;
    cfg.Validate();
    const fs::path dir = run.Open(app, "augment", seed);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const Waveform wave = ReadWavFile(inputs[i]);
      const std::string stem = fs::path(inputs[i]).stem().string();
      WriteWavFile(dir / (stem + "_orig.wav"), wave);
      for (int j = 0; j < count; ++j) {
        Rng rng = ExampleRng(seed, j, i);
        WriteWavFile(dir / (stem + "_aug" + std::to_string(j) + ".wav"), Augment(wave, cfg, rng));
      }
    }
    return 0;
  }
};

int ExitCodeFor(const Error& e) {
  switch (e.error_class()) {
    case ErrorClass::kConfig: return kExitConfig;
    case ErrorClass::kData: return kExitData;
    case ErrorClass::kNumeric: return kExitNumeric;
  }
  return 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"Streaming voice query recognition"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "",
                 "configuration file: key=value lines under [subcommand] sections");

  auto add = [&](const char* name, const char* help) { return app.add_subcommand(name, help); };
  SynthCommand synth;
  TrainCommand train;
  EvalCommand eval;
  RocCommand roc;
  StreamCommand stream;
  FootprintCommand footprint;
  AugmentPreviewCommand preview;
  CLI::App* synth_app = add("synth", "generate a synthetic query corpus");
  CLI::App* train_app = add("train", "train a model from a manifest");
  CLI::App* eval_app = add("eval", "score a split and write FAR/QER and ROC");
  CLI::App* roc_app = add("roc", "write the ROC sweep of a split");
  CLI::App* stream_app = add("stream", "streaming inference over audio");
  CLI::App* footprint_app = add("footprint", "parameter and multiply accounting");
  CLI::App* preview_app = add("augment-preview", "write augmented copies of WAV files");
  synth.Register(synth_app);
  train.Register(train_app);
  eval.Register(eval_app);
  roc.Register(roc_app);
  stream.Register(stream_app);
  footprint.Register(footprint_app);
  preview.Register(preview_app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth_app) return synth.Run();
    if (*train_app) return train.Run(*train_app);
    if (*eval_app) return eval.Run(*eval_app);
    if (*roc_app) return roc.Run(*roc_app);
    if (*stream_app) return stream.Run(*stream_app);
    if (*footprint_app) return footprint.Run();
    if (*preview_app) return preview.Run(*preview_app);
  } catch (const TargetUnreachableError& e) {
    std::cerr << "error: " << e.what() << " (best alpha " << e.best().alpha << ", far "
              << e.best().far << ", qer " << e.best().qer << ")\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 1;
}

}  // namespace
}  // namespace vqr

int main(int argc, char** argv) { return vqr::Main(argc, argv); }
