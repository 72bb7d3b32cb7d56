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

#include "vqr/hyperparams.h"

#include "vqr/errors.h"

namespace vqr {

std::string_view VariantName(Variant variant) {
  switch (variant) {
    case Variant::kCrnnMaxPool:
      return "crnn-750m";
    case Variant::kCrnn:
      return "crnn-750";
    case Variant::kRnnMaxPool:
      return "rnn-750m";
  }
  return "unknown";
}

Variant ParseVariant(std::string_view name) {
  if (name == "crnn-750m" || name == "crnn-m") return Variant::kCrnnMaxPool;
  if (name == "crnn-750" || name == "crnn") return Variant::kCrnn;
  if (name == "rnn-750m" || name == "rnn-m") return Variant::kRnnMaxPool;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

void Hyperparams::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("hyperparams: ") + what);
  };
  require(gru_units >= 1, "gru_units must be >= 1");
  require(hidden_units >= 1, "hidden_units must be >= 1");
  require(num_classes >= 2, "num_classes must be >= 2");
  if (HasMaxPool()) require(feature_channels >= 1, "feature_channels must be >= 1");
  if (HasConv()) {
    require(conv_channels >= 1, "conv_channels must be >= 1");
    require(conv_time >= 1, "conv_time must be >= 1");
    require(conv_freq >= 1 && conv_freq <= kMelBands,
            "conv_freq must lie in [1, 40]");
    require(stride_time == 1, "streaming requires stride_time == 1");
    require(stride_freq >= 1, "stride_freq must be >= 1");
  }
}

Hyperparams PresetFor(Variant variant) {
  Hyperparams hp;
  hp.variant = variant;
  return hp;
}

}  // namespace vqr
