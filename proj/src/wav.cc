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

#include "vqr/wav.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>

#include "vqr/errors.h"

namespace vqr {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t ReadU32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

bool TagIs(std::span<const std::uint8_t> b, std::size_t at,
           std::string_view tag) {
  return std::equal(tag.begin(), tag.end(), b.begin() + at);
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8)
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
}

void PutTag(std::vector<std::uint8_t>& out, std::string_view tag) {
  out.insert(out.end(), tag.begin(), tag.end());
}

[[noreturn]] void Malformed(const std::string& why) {
  throw WavError(WavErrorKind::kMalformedHeader, why);
}

struct FormatChunk {
  std::uint16_t format;
  std::uint16_t channels;
  std::uint32_t sample_rate;
  std::uint16_t bits_per_sample;
};

FormatChunk ParseFormat(std::span<const std::uint8_t> chunk) {
  if (chunk.size() < 16) Malformed("fmt chunk shorter than 16 bytes");
  FormatChunk fmt{ReadU16(chunk, 0), ReadU16(chunk, 2), ReadU32(chunk, 4),
                  ReadU16(chunk, 14)};
  if (fmt.format == kFormatExtensible) {
    // WAVE_FORMAT_EXTENSIBLE carries the real format tag at the start of
    // the sub-format GUID.
    if (chunk.size() < 26) Malformed("truncated extensible fmt chunk");
    fmt.format = ReadU16(chunk, 24);
  }
  return fmt;
}

void CheckFormat(const FormatChunk& fmt) {
  if (fmt.format != kFormatPcm)
    throw WavError(WavErrorKind::kUnsupportedFormat,
                   "format tag " + std::to_string(fmt.format) +
                       " is not integer PCM");
  if (fmt.sample_rate != static_cast<std::uint32_t>(kSampleRate))
    throw WavError(WavErrorKind::kUnsupportedRate,
                   "sample rate " + std::to_string(fmt.sample_rate) +
                       " Hz, expected 16000");
  if (fmt.bits_per_sample != 16)
    throw WavError(WavErrorKind::kUnsupportedBitDepth,
                   std::to_string(fmt.bits_per_sample) +
                       "-bit samples, expected 16");
  if (fmt.channels != 1)
    throw WavError(WavErrorKind::kUnsupportedChannels,
                   std::to_string(fmt.channels) + " channels, expected mono");
}

Waveform FromLittleEndianPcm(std::span<const std::uint8_t> data) {
  Waveform wave;
  wave.samples.resize(data.size() / 2);
  for (std::size_t i = 0; i < wave.samples.size(); ++i) {
    const auto v = static_cast<std::int16_t>(ReadU16(data, 2 * i));
    wave.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  return wave;
}

}  // namespace

Waveform FromPcm16(std::span<const std::int16_t> pcm) {
  Waveform wave;
  wave.samples.reserve(pcm.size());
  for (std::int16_t v : pcm)
    wave.samples.push_back(static_cast<float>(v) / 32768.0f);
  return wave;
}

std::vector<std::int16_t> ToPcm16(const Waveform& wave) {
  std::vector<std::int16_t> pcm;
  pcm.reserve(wave.samples.size());
  for (float x : wave.samples) {
    const double scaled = std::nearbyint(static_cast<double>(x) * 32768.0);
    pcm.push_back(static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
  }
  return pcm;
}

Waveform DecodeWav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !TagIs(bytes, 0, "RIFF") || !TagIs(bytes, 8, "WAVE"))
    Malformed("missing RIFF/WAVE signature");

  std::optional<FormatChunk> fmt;
  std::optional<std::span<const std::uint8_t>> data;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = ReadU32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (chunk_size > bytes.size() - body)
      Malformed("chunk extends past end of file");
    const auto chunk = bytes.subspan(body, chunk_size);
    if (TagIs(bytes, pos, "fmt ")) {
      fmt = ParseFormat(chunk);
    } else if (TagIs(bytes, pos, "data")) {
      data = chunk;
    }
    // Chunks are word aligned.
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!fmt) Malformed("no fmt chunk");
  if (!data) Malformed("no data chunk");
  CheckFormat(*fmt);
  if (data->size() % 2 != 0) Malformed("odd-length 16-bit data chunk");
  if (data->empty()) Malformed("empty data chunk");
  return FromLittleEndianPcm(*data);
}

std::vector<std::uint8_t> EncodeWav(const Waveform& wave) {
  const std::vector<std::int16_t> pcm = ToPcm16(wave);
  const auto data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(out, "RIFF");
  PutU32(out, 36 + data_bytes);
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, static_cast<std::uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<std::uint32_t>(wave.sample_rate) * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  PutTag(out, "data");
  PutU32(out, data_bytes);
  for (std::int16_t v : pcm) PutU16(out, static_cast<std::uint16_t>(v));
  return out;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Waveform ReadWavFile(const std::filesystem::path& path) {
  return DecodeWav(ReadFileBytes(path));
}

void WriteWavFile(const std::filesystem::path& path, const Waveform& wave) {
  const std::vector<std::uint8_t> bytes = EncodeWav(wave);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Waveform DecodeRawPcm16(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 2 != 0)
    throw DataError("raw PCM stream has an odd number of bytes");
  return FromLittleEndianPcm(bytes);
}

}  // namespace vqr
