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

#include "vqr/weights_io.h"

#include <bit>
#include <fstream>
#include <set>

#include "vqr/errors.h"
#include "vqr/wav.h"

namespace vqr {
namespace {

constexpr char kMagic[4] = {'V', 'Q', 'R', 'W'};

class Writer {
 public:
  void U8(std::uint8_t v) { out_.push_back(v); }
  void U16(std::uint16_t v) {
    U8(static_cast<std::uint8_t>(v & 0xFF));
    U8(static_cast<std::uint8_t>(v >> 8));
  }
  void U32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8)
      U8(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
  void Bytes(const char* data, std::size_t n) { out_.insert(out_.end(), data, data + n); }
  std::vector<std::uint8_t> Take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool Has(std::size_t n) const { return bytes_.size() - pos_ >= n; }
  std::uint8_t U8() { return bytes_[pos_++]; }
  std::uint16_t U16() {
    const std::uint16_t lo = U8();
    return static_cast<std::uint16_t>(lo | (U8() << 8));
  }
  std::uint32_t U32() {
    std::uint32_t v = 0;
    for (int shift = 0; shift < 32; shift += 8)
      v |= static_cast<std::uint32_t>(U8()) << shift;
    return v;
  }
  std::string String(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void Fail(WeightErrorKind kind, const std::string& what) {
  throw WeightFormatError(kind, what);
}

std::string ShapeString(const std::vector<std::int64_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i)
    s += (i ? "," : "") + std::to_string(shape[i]);
  return s + "]";
}

std::int64_t NumElements(const std::vector<std::int64_t>& shape) {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

std::vector<std::string> RequiredTensors(const Hyperparams& hp) {
  std::vector<std::string> names;
  const Weights<float> probe = [&] {
    Weights<float> w;
    w.hp = hp;
    return w;
  }();
  probe.ForEachTensor([&](std::string_view name, const auto&, TensorRole) {
    names.emplace_back(name);
  });
  return names;
}

}  // namespace

void ValidateContainer(const WeightContainer& container) {
  if (container.format_version != kWeightFormatVersion)
    Fail(WeightErrorKind::kVersionMismatch,
         "format version " + std::to_string(container.format_version) +
             ", expected " + std::to_string(kWeightFormatVersion));
  try {
    container.hp.Validate();
  } catch (const ConfigError& e) {
    Fail(WeightErrorKind::kBadHyperparams, e.what());
  }
  const std::vector<std::string> required = RequiredTensors(container.hp);
  const std::set<std::string> required_set(required.begin(), required.end());
  for (const auto& [name, tensor] : container.tensors) {
    if (!required_set.contains(name))
      Fail(WeightErrorKind::kUnexpectedTensor,
           "tensor '" + name + "' is not used by variant " +
               std::string(VariantName(container.hp.variant)));
  }
  for (const std::string& name : required) {
    const auto it = container.tensors.find(name);
    if (it == container.tensors.end())
      Fail(WeightErrorKind::kMissingTensor, "missing tensor '" + name + "'");
    const auto expected = ExpectedShape(container.hp, name);
    if (it->second.shape != expected)
      Fail(WeightErrorKind::kShapeMismatch,
           "tensor '" + name + "' has shape " + ShapeString(it->second.shape) +
               ", hyperparams require " + ShapeString(expected));
    if (static_cast<std::int64_t>(it->second.data.size()) != NumElements(expected))
      Fail(WeightErrorKind::kShapeMismatch,
           "tensor '" + name + "' payload size disagrees with its shape");
  }
}

std::vector<std::uint8_t> SaveWeights(const WeightContainer& container) {
  ValidateContainer(container);
  const Hyperparams& hp = container.hp;
  Writer w;
  w.Bytes(kMagic, sizeof(kMagic));
  w.U32(container.format_version);
  w.U32(static_cast<std::uint32_t>(hp.variant));
  for (int v : {hp.conv_channels, hp.conv_time, hp.conv_freq, hp.stride_time,
                hp.stride_freq, hp.gru_units, hp.feature_channels, hp.hidden_units,
                hp.num_classes})
    w.U32(static_cast<std::uint32_t>(v));
  w.U32(static_cast<std::uint32_t>(container.tensors.size()));
  for (const auto& [name, tensor] : container.tensors) {
    w.U16(static_cast<std::uint16_t>(name.size()));
    w.Bytes(name.data(), name.size());
    w.U8(static_cast<std::uint8_t>(tensor.shape.size()));
    for (std::int64_t d : tensor.shape) w.U32(static_cast<std::uint32_t>(d));
  }
  for (const auto& [name, tensor] : container.tensors)
    for (float v : tensor.data) w.U32(std::bit_cast<std::uint32_t>(v));
  return w.Take();
}

WeightContainer LoadWeights(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (!r.Has(4) || r.String(4) != std::string(kMagic, 4))
    Fail(WeightErrorKind::kBadMagic, "not a weight container");
  WeightContainer container;
  if (!r.Has(4)) Fail(WeightErrorKind::kVersionMismatch, "truncated version field");
  container.format_version = r.U32();
  if (container.format_version != kWeightFormatVersion)
    Fail(WeightErrorKind::kVersionMismatch,
         "format version " + std::to_string(container.format_version) +
             ", expected " + std::to_string(kWeightFormatVersion));
  if (!r.Has(4 * 10)) Fail(WeightErrorKind::kBadHyperparams, "truncated header");
  const std::uint32_t variant = r.U32();
  if (variant > static_cast<std::uint32_t>(Variant::kRnnMaxPool))
    Fail(WeightErrorKind::kBadHyperparams, "unknown variant id " + std::to_string(variant));
  Hyperparams& hp = container.hp;
  hp.variant = static_cast<Variant>(variant);
  for (int* field : {&hp.conv_channels, &hp.conv_time, &hp.conv_freq, &hp.stride_time,
                     &hp.stride_freq, &hp.gru_units, &hp.feature_channels,
                     &hp.hidden_units, &hp.num_classes})
    *field = static_cast<int>(r.U32());

  // A cut anywhere past the header means some tensor cannot be recovered.
  const auto truncated = [] {
    Fail(WeightErrorKind::kMissingTensor, "container truncated; tensors missing");
  };
  if (!r.Has(4)) truncated();
  const std::uint32_t count = r.U32();
  std::vector<std::string> order;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (!r.Has(2)) truncated();
    const std::uint16_t name_len = r.U16();
    if (!r.Has(name_len + 1u)) truncated();
    std::string name = r.String(name_len);
    const std::uint8_t rank = r.U8();
    if (!r.Has(4u * rank)) truncated();
    TensorData tensor;
    for (std::uint8_t j = 0; j < rank; ++j) tensor.shape.push_back(r.U32());
    if (!container.tensors.emplace(name, std::move(tensor)).second)
      Fail(WeightErrorKind::kUnexpectedTensor, "tensor '" + name + "' appears twice");
    order.push_back(std::move(name));
  }
  for (const std::string& name : order) {
    TensorData& tensor = container.tensors[name];
    const std::int64_t n = NumElements(tensor.shape);
    if (!r.Has(static_cast<std::size_t>(n) * 4))
      Fail(WeightErrorKind::kMissingTensor, "payload of tensor '" + name + "' is truncated");
    tensor.data.resize(static_cast<std::size_t>(n));
    for (float& v : tensor.data) v = std::bit_cast<float>(r.U32());
  }
  if (!r.AtEnd())
    Fail(WeightErrorKind::kUnexpectedTensor, "trailing bytes after the last payload");
  ValidateContainer(container);
  return container;
}

WeightContainer ToContainer(const Weights<float>& weights) {
  WeightContainer container;
  container.hp = weights.hp;
  for (const TensorView<const float>& view : TensorViews(weights)) {
    TensorData tensor;
    tensor.shape = view.is_vector ? std::vector<std::int64_t>{view.rows}
                                  : std::vector<std::int64_t>{view.rows, view.cols};
    tensor.data.assign(view.data, view.data + view.size());
    container.tensors.emplace(std::string(view.name), std::move(tensor));
  }
  return container;
}

Weights<float> FromContainer(const WeightContainer& container) {
  ValidateContainer(container);
  Weights<float> weights = Weights<float>::Zeros(container.hp);
  for (TensorView<float>& view : TensorViews(weights)) {
    const TensorData& tensor = container.tensors.at(std::string(view.name));
    std::copy(tensor.data.begin(), tensor.data.end(), view.data);
  }
  return weights;
}

void WriteWeightsFile(const std::filesystem::path& path, const Weights<float>& weights) {
  const std::vector<std::uint8_t> bytes = SaveWeights(ToContainer(weights));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Weights<float> ReadWeightsFile(const std::filesystem::path& path) {
  return FromContainer(LoadWeights(ReadFileBytes(path)));
}

}  // namespace vqr
