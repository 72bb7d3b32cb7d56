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

#ifndef VQR_FOOTPRINT_H_
#define VQR_FOOTPRINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "vqr/hyperparams.h"

namespace vqr {

struct LayerFootprint {
  std::string group;   // short-term, long-term or classifier
  std::string layer;   // "C. Conv", "BN", "GRU", "Conv", "DNN", "Softmax"
  std::int64_t params = 0;
  std::int64_t multiplies = 0;  // per second of audio
  std::string hyperparams;
};

struct Footprint {
  std::vector<LayerFootprint> layers;

  std::int64_t TotalParams() const;
  std::int64_t TotalMultiplies() const;
  // Throws std::out_of_range when the variant has no such layer.
  const LayerFootprint& Layer(const std::string& name) const;
};

// Parameters and multiplies per layer. Streaming layers run once per frame
// (`frames_per_second`), the classifier once per prediction
// (`classifications_per_second`). Only matrix-product multiplies are
// counted, plus the scale and shift of batch norm.
Footprint ComputeFootprint(const Hyperparams& hp, int frames_per_second = 100,
                           int classifications_per_second = 10);

// 3 significant digits with a K/M suffix: 4655987 -> "4.66M", 500 -> "500".
std::string DisplayCount(std::int64_t value);

// Table with one row per layer plus totals, exact and display-rounded.
std::string FormatFootprint(const Hyperparams& hp, const Footprint& footprint);

}  // namespace vqr

#endif  // VQR_FOOTPRINT_H_
