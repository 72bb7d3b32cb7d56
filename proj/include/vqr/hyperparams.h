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

#ifndef VQR_HYPERPARAMS_H_
#define VQR_HYPERPARAMS_H_

#include <string>
#include <string_view>

namespace vqr {

inline constexpr int kMelBands = 40;

enum class Variant {
  kCrnnMaxPool,  // crnn-750m: causal conv + GRU + feature conv/max-pool
  kCrnn,         // crnn-750: causal conv + GRU, context is the last hidden
  kRnnMaxPool,   // rnn-750m: PCEN frames feed the GRU directly
};

std::string_view VariantName(Variant variant);
// Accepts "crnn-750m", "crnn-750", "rnn-750m" (and the short forms
// "crnn-m", "crnn", "rnn-m"). Throws ConfigError otherwise.
Variant ParseVariant(std::string_view name);

struct Hyperparams {
  Variant variant = Variant::kCrnnMaxPool;
  int conv_channels = 250;    // c
  int conv_time = 3;          // m, frames
  int conv_freq = 20;         // n, mel bands
  int stride_time = 1;
  int stride_freq = 10;
  int gru_units = 750;        // k
  int feature_channels = 350; // d
  int hidden_units = 768;     // classifier hidden layer
  int num_classes = 201;      // N known queries + unknown

  bool HasConv() const { return variant != Variant::kRnnMaxPool; }
  bool HasMaxPool() const { return variant != Variant::kCrnn; }

  // f: frequency positions of the causal convolution.
  int FreqPositions() const { return (kMelBands - conv_freq) / stride_freq + 1; }
  int GruInput() const {
    return HasConv() ? conv_channels * FreqPositions() : kMelBands;
  }
  int ContextDim() const {
    return HasMaxPool() ? gru_units + feature_channels : gru_units;
  }
  int UnknownClass() const { return num_classes - 1; }
  // Conv history frames kept by a stream (zero for rnn-750m).
  int HistoryFrames() const { return HasConv() ? conv_time - 1 : 0; }
  int ReceptiveFieldMs(int window_ms = 30, int hop_ms = 10) const {
    return conv_time * hop_ms + (window_ms - hop_ms);
  }

  // Throws ConfigError on any dimension that cannot form a model.
  void Validate() const;

  bool operator==(const Hyperparams&) const = default;
};

// Full-size preset for a variant; every variant keeps the Table-1
// dimensions and differs only in which layers exist.
Hyperparams PresetFor(Variant variant);

}  // namespace vqr

#endif  // VQR_HYPERPARAMS_H_
