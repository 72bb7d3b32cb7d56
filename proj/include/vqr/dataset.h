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

#ifndef VQR_DATASET_H_
#define VQR_DATASET_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vqr/wav.h"

namespace vqr {

struct ManifestRecord {
  std::string audio_path;
  int label = 0;

  bool operator==(const ManifestRecord&) const = default;
};

// Labels run over [0, num_queries]; label num_queries is "unknown".
struct DatasetManifest {
  std::vector<ManifestRecord> records;
  int num_queries = 0;

  int UnknownLabel() const { return num_queries; }
};

// Manifest text: one `path<TAB>label` record per line. Blank lines and lines
// starting with '#' are skipped. Relative paths are resolved against
// `base_dir` when it is non-empty.
DatasetManifest ParseManifest(std::string_view text, int num_queries,
                              const std::filesystem::path& base_dir = {});
std::string FormatManifest(const DatasetManifest& manifest);

// Reads a manifest file, resolving relative paths to absolute ones under its
// directory and verifying that every referenced file exists.
DatasetManifest LoadManifest(const std::filesystem::path& path, int num_queries);
void SaveManifest(const std::filesystem::path& path,
                  const DatasetManifest& manifest);

struct DatasetSplits {
  DatasetManifest train;
  DatasetManifest validation;
  DatasetManifest test;
};

// Per class, in manifest order: the first floor(0.8 n) records go to train,
// the next floor(0.1 n) to validation and the remainder to test. Each split
// keeps the relative manifest order. Throws DataError for a class with fewer
// than 10 records.
DatasetSplits SplitDataset(const DatasetManifest& manifest);

// Decoded clips with their labels, index-aligned.
struct LabeledAudio {
  std::vector<Waveform> clips;
  std::vector<int> labels;

  std::size_t size() const { return clips.size(); }
};

LabeledAudio LoadAudio(const DatasetManifest& manifest);

}  // namespace vqr

#endif  // VQR_DATASET_H_
