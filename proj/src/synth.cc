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

#include "vqr/synth.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "vqr/errors.h"

namespace vqr {
namespace {

constexpr std::array<double, 6> kTones = {450.0, 700.0, 1050.0, 1500.0, 2200.0, 3000.0};

// Tone indices per query. Some queries share tones and differ only in
// order, so the model has to use temporal context.
constexpr std::array<std::array<int, 3>, 16> kPatterns = {{
    {0, 2, 4}, {4, 2, 0}, {1, 3, 5}, {5, 3, 1}, {0, 1, 2}, {2, 1, 0},
    {3, 4, 5}, {5, 4, 3}, {0, 3, 0}, {1, 4, 1}, {2, 5, 2}, {5, 0, 5},
    {3, 0, 4}, {1, 5, 0}, {4, 1, 3}, {2, 0, 3},
}};

void AddNoiseFloor(std::vector<float>& samples, double sigma, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  for (float& x : samples) x += static_cast<float>(noise(rng));
}

}  // namespace

Waveform SynthQueryClip(int query, double clip_seconds, Rng& rng) {
  if (query < 0 || query >= static_cast<int>(kPatterns.size()))
    throw ConfigError("synth: at most 16 distinct query patterns");
  const auto n = static_cast<std::size_t>(clip_seconds * kSampleRate);
  Waveform wave;
  wave.samples.assign(n, 0.0f);

  std::uniform_real_distribution<double> onset(0.0, 0.15);
  std::uniform_real_distribution<double> length(0.18, 0.24);
  std::uniform_real_distribution<double> gap(0.02, 0.06);
  std::uniform_real_distribution<double> detune(-0.03, 0.03);
  std::uniform_real_distribution<double> level(0.05, 0.4);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

  const double amplitude = level(rng);
  double start = onset(rng);
  for (int tone : kPatterns[static_cast<std::size_t>(query)]) {
    const double dur = length(rng);
    const double hz = kTones[static_cast<std::size_t>(tone)] * (1.0 + detune(rng));
    const double ph = phase(rng);
    const auto first = static_cast<std::size_t>(start * kSampleRate);
    const auto count = static_cast<std::size_t>(dur * kSampleRate);
    for (std::size_t i = 0; i < count && first + i < n; ++i) {
      // Raised-cosine envelope avoids clicks at segment edges.
      const double env = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / count);
      wave.samples[first + i] += static_cast<float>(
          amplitude * env * std::sin(2.0 * std::numbers::pi * hz * i / kSampleRate + ph));
    }
    start += dur + gap(rng);
  }
  AddNoiseFloor(wave.samples, 0.002, rng);
  return wave;
}

Waveform SynthUnknownClip(double clip_seconds, Rng& rng) {
  const auto n = static_cast<std::size_t>(clip_seconds * kSampleRate);
  std::uniform_real_distribution<double> level(0.01, 0.2);
  std::uniform_real_distribution<double> color(0.0, 0.95);
  std::normal_distribution<double> white(0.0, 1.0);
  const double sigma = level(rng);
  const double pole = color(rng);
  Waveform wave;
  wave.samples.resize(n);
  // One-pole low-pass; pole 0 is white noise.
  double state = 0.0;
  const double gain = std::sqrt(1.0 - pole * pole);
  for (float& x : wave.samples) {
    state = pole * state + gain * white(rng);
    x = static_cast<float>(std::clamp(sigma * state, -1.0, 1.0));
  }
  return wave;
}

LabeledAudio SynthCorpus(const SynthCorpusConfig& config) {
  if (config.num_queries < 1 || config.num_queries > static_cast<int>(kPatterns.size()))
    throw ConfigError("synth: num_queries must lie in [1, 16]");
  if (config.clip_seconds * kSampleRate < 480)
    throw ConfigError("synth: clips must hold at least one 30 ms window");
  LabeledAudio corpus;
  for (int q = 0; q < config.num_queries; ++q) {
    for (int i = 0; i < config.examples_per_query; ++i) {
      Rng rng(config.seed * 1000003u + static_cast<std::uint64_t>(q) * 10007u +
              static_cast<std::uint64_t>(i));
      corpus.clips.push_back(SynthQueryClip(q, config.clip_seconds, rng));
      corpus.labels.push_back(q);
    }
  }
  for (int i = 0; i < config.num_unknown; ++i) {
    Rng rng(config.seed * 1000003u + 999983u + static_cast<std::uint64_t>(i));
    corpus.clips.push_back(SynthUnknownClip(config.clip_seconds, rng));
    corpus.labels.push_back(config.num_queries);
  }
  return corpus;
}

DatasetManifest WriteSynthCorpus(const SynthCorpusConfig& config,
                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const LabeledAudio corpus = SynthCorpus(config);
  DatasetManifest manifest;
  manifest.num_queries = config.num_queries;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "clip_%05zu_c%02d.wav", i, corpus.labels[i]);
    WriteWavFile(dir / name, corpus.clips[i]);
    manifest.records.push_back({name, corpus.labels[i]});
  }
  SaveManifest(dir / "manifest.tsv", manifest);
  return manifest;
}

}  // namespace vqr
