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

#ifndef VQR_SYNTH_H_
#define VQR_SYNTH_H_

#include <cstdint>
#include <filesystem>

#include "vqr/augment.h"
#include "vqr/dataset.h"

namespace vqr {

// Desk-scale stand-in for recorded voice queries: each known query is a
// fixed sequence of three tone segments, the unknown class is colored noise.
struct SynthCorpusConfig {
  int num_queries = 12;
  int examples_per_query = 200;
  int num_unknown = 2000;
  double clip_seconds = 1.0;
  std::uint64_t seed = 7;
};

// One query clip: three tone segments with jittered onset, durations,
// pitch and level over a faint noise floor.
Waveform SynthQueryClip(int query, double clip_seconds, Rng& rng);
Waveform SynthUnknownClip(double clip_seconds, Rng& rng);

// Clips grouped by class (all of class 0, then class 1, ..., then unknown),
// so a per-class 80/10/10 split in order is well defined.
LabeledAudio SynthCorpus(const SynthCorpusConfig& config);

// Writes one WAV per clip plus `manifest.tsv` under `dir`.
DatasetManifest WriteSynthCorpus(const SynthCorpusConfig& config,
                                 const std::filesystem::path& dir);

}  // namespace vqr

#endif  // VQR_SYNTH_H_
