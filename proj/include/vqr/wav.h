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

#ifndef VQR_WAV_H_
#define VQR_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace vqr {

inline constexpr int kSampleRate = 16000;

// Mono audio, unit-scaled: a 16-bit PCM value v is stored as v / 32768.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kSampleRate;

  std::size_t size() const { return samples.size(); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

Waveform FromPcm16(std::span<const std::int16_t> pcm);
// Rounds to the nearest PCM step and saturates at the 16-bit range.
std::vector<std::int16_t> ToPcm16(const Waveform& wave);

// Parses a RIFF/WAVE byte stream. Only 16 kHz, 16-bit, mono, integer PCM is
// accepted; each violation raises a WavError with its own kind.
Waveform DecodeWav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodeWav(const Waveform& wave);

Waveform ReadWavFile(const std::filesystem::path& path);
void WriteWavFile(const std::filesystem::path& path, const Waveform& wave);

// Headerless little-endian 16-bit mono samples.
Waveform DecodeRawPcm16(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);

}  // namespace vqr

#endif  // VQR_WAV_H_
