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

#ifndef VQR_WEIGHTS_IO_H_
#define VQR_WEIGHTS_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vqr/hyperparams.h"
#include "vqr/model.h"

namespace vqr {

inline constexpr std::uint32_t kWeightFormatVersion = 1;

struct TensorData {
  std::vector<std::int64_t> shape;
  std::vector<float> data;  // row-major

  bool operator==(const TensorData&) const = default;
};

struct WeightContainer {
  std::uint32_t format_version = kWeightFormatVersion;
  Hyperparams hp;
  std::map<std::string, TensorData> tensors;
};

// Layout, all integers little-endian:
//   "VQRW" | u32 version | u32 variant | 9 x u32 dims (c, m, n, stride_t,
//   stride_f, k, d, hidden, classes) | u32 tensor count |
//   per tensor: u16 name length, name, u8 rank, rank x u32 dims |
//   payloads: float32 data of each tensor, in directory order.
std::vector<std::uint8_t> SaveWeights(const WeightContainer& container);

// Throws WeightFormatError: kBadMagic, kVersionMismatch, kBadHyperparams,
// kMissingTensor (including truncation), kShapeMismatch, kUnexpectedTensor.
WeightContainer LoadWeights(std::span<const std::uint8_t> bytes);

// Checks the container invariants: every tensor of the variant present once
// with the expected shape, nothing else.
void ValidateContainer(const WeightContainer& container);

WeightContainer ToContainer(const Weights<float>& weights);
Weights<float> FromContainer(const WeightContainer& container);

void WriteWeightsFile(const std::filesystem::path& path, const Weights<float>& weights);
Weights<float> ReadWeightsFile(const std::filesystem::path& path);

}  // namespace vqr

#endif  // VQR_WEIGHTS_IO_H_
