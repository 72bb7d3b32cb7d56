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

#include "vqr/dataset.h"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "vqr/errors.h"

namespace vqr {

DatasetManifest ParseManifest(std::string_view text, int num_queries,
                              const std::filesystem::path& base_dir) {
  if (num_queries < 1) throw ConfigError("manifest: num_queries must be >= 1");
  DatasetManifest manifest;
  manifest.num_queries = num_queries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const std::size_t tab = line.rfind('\t');
    if (tab == std::string_view::npos || tab == 0)
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": expected path<TAB>label");
    const std::string_view label_text = line.substr(tab + 1);
    int label = -1;
    const auto [end, ec] = std::from_chars(
        label_text.data(), label_text.data() + label_text.size(), label);
    if (ec != std::errc() || end != label_text.data() + label_text.size())
      throw DataError("manifest line " + std::to_string(line_no) +
                      ": bad label '" + std::string(label_text) + "'");
    if (label < 0 || label > num_queries)
      throw DataError("manifest line " + std::to_string(line_no) + ": label " +
                      std::to_string(label) + " outside [0, " +
                      std::to_string(num_queries) + "]");

    std::filesystem::path path{std::string(line.substr(0, tab))};
    if (!base_dir.empty() && path.is_relative()) path = base_dir / path;
    manifest.records.push_back({path.string(), label});
  }
  return manifest;
}

std::string FormatManifest(const DatasetManifest& manifest) {
  std::string out;
  for (const ManifestRecord& r : manifest.records)
    out += r.audio_path + "\t" + std::to_string(r.label) + "\n";
  return out;
}

DatasetManifest LoadManifest(const std::filesystem::path& path,
                             int num_queries) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  DatasetManifest manifest =
      ParseManifest(buffer.str(), num_queries, std::filesystem::absolute(path).parent_path());
  for (const ManifestRecord& r : manifest.records) {
    if (!std::filesystem::exists(r.audio_path))
      throw DataError("manifest " + path.string() + ": missing audio " +
                      r.audio_path);
  }
  return manifest;
}

void SaveManifest(const std::filesystem::path& path,
                  const DatasetManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << FormatManifest(manifest);
}

DatasetSplits SplitDataset(const DatasetManifest& manifest) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < manifest.records.size(); ++i)
    by_class[manifest.records[i].label].push_back(i);

  // 0 = train, 1 = validation, 2 = test.
  std::vector<int> assignment(manifest.records.size(), 0);
  for (const auto& [label, indices] : by_class) {
    const std::size_t n = indices.size();
    if (n < 10)
      throw DataError("class " + std::to_string(label) + " has " +
                      std::to_string(n) +
                      " examples; at least 10 are needed for an 80/10/10 split");
    const std::size_t n_train = n * 8 / 10;
    const std::size_t n_val = n / 10;
    for (std::size_t j = 0; j < n; ++j)
      assignment[indices[j]] = j < n_train ? 0 : (j < n_train + n_val ? 1 : 2);
  }

  DatasetSplits splits;
  splits.train.num_queries = manifest.num_queries;
  splits.validation.num_queries = manifest.num_queries;
  splits.test.num_queries = manifest.num_queries;
  DatasetManifest* targets[] = {&splits.train, &splits.validation, &splits.test};
  for (std::size_t i = 0; i < manifest.records.size(); ++i)
    targets[assignment[i]]->records.push_back(manifest.records[i]);
  return splits;
}

LabeledAudio LoadAudio(const DatasetManifest& manifest) {
  LabeledAudio audio;
  audio.clips.reserve(manifest.records.size());
  audio.labels.reserve(manifest.records.size());
  for (const ManifestRecord& r : manifest.records) {
    audio.clips.push_back(ReadWavFile(r.audio_path));
    audio.labels.push_back(r.label);
  }
  return audio;
}

}  // namespace vqr
