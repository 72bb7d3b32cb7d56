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

#ifndef VQR_MODEL_H_
#define VQR_MODEL_H_

#include <cstdint>
#include <cstring>
#include <type_traits>
#include <string_view>
#include <vector>

#include "vqr/hyperparams.h"
#include "vqr/tensor.h"

namespace vqr {

inline constexpr double kBatchNormEpsilon = 1e-5;

// Buffers (batch-norm running statistics) are stored and serialized with the
// weights but never receive gradient updates.
enum class TensorRole { kParameter, kBuffer };

template <typename Real>
struct Weights {
  Hyperparams hp;

  // Causal convolution, c x (m * n); column dt * n + j reads mel band
  // p * stride_freq + j of the frame dt steps after the oldest one.
  Mat<Real> conv_w;
  Vec<Real> conv_b;
  Vec<Real> bn_gamma, bn_beta, bn_mean, bn_var;

  Mat<Real> gru_wz, gru_wr, gru_wn;  // k x in
  Mat<Real> gru_uz, gru_ur, gru_un;  // k x k
  Vec<Real> gru_bz, gru_br, gru_bn;

  Mat<Real> fconv_w;  // d x k
  Vec<Real> fconv_b;

  Mat<Real> dnn_w1;  // hidden x context
  Vec<Real> dnn_b1;
  Mat<Real> dnn_w2;  // classes x hidden
  Vec<Real> dnn_b2;

  // Every tensor zero except bn_gamma = bn_var = 1.
  static Weights Zeros(const Hyperparams& hp);
  // Uniform in +/- sqrt(1 / fan_in) per tensor; batch norm starts at
  // gamma = 1, beta = 0 with running mean 0 and variance 1.
  static Weights Random(const Hyperparams& hp, std::uint64_t seed);

  // Calls fn(name, tensor, role) for every tensor the variant uses, in a
  // fixed order. `tensor` is a Mat<Real>& or Vec<Real>&.
  template <typename Fn>
  void ForEachTensor(Fn&& fn) {
    Visit(*this, fn);
  }
  template <typename Fn>
  void ForEachTensor(Fn&& fn) const {
    Visit(*this, fn);
  }

  template <typename To>
  Weights<To> Cast() const;

  // Same hyperparams, shapes and bit patterns.
  bool BitwiseEquals(const Weights& other) const;

 private:
  template <typename Self, typename Fn>
  static void Visit(Self& self, Fn& fn) {
    const auto P = TensorRole::kParameter;
    if (self.hp.HasConv()) {
      fn("conv_w", self.conv_w, P);
      fn("conv_b", self.conv_b, P);
      fn("bn_gamma", self.bn_gamma, P);
      fn("bn_beta", self.bn_beta, P);
      fn("bn_mean", self.bn_mean, TensorRole::kBuffer);
      fn("bn_var", self.bn_var, TensorRole::kBuffer);
    }
    fn("gru_wz", self.gru_wz, P);
    fn("gru_wr", self.gru_wr, P);
    fn("gru_wn", self.gru_wn, P);
    fn("gru_uz", self.gru_uz, P);
    fn("gru_ur", self.gru_ur, P);
    fn("gru_un", self.gru_un, P);
    fn("gru_bz", self.gru_bz, P);
    fn("gru_br", self.gru_br, P);
    fn("gru_bn", self.gru_bn, P);
    if (self.hp.HasMaxPool()) {
      fn("fconv_w", self.fconv_w, P);
      fn("fconv_b", self.fconv_b, P);
    }
    fn("dnn_w1", self.dnn_w1, P);
    fn("dnn_b1", self.dnn_b1, P);
    fn("dnn_w2", self.dnn_w2, P);
    fn("dnn_b2", self.dnn_b2, P);
  }
};

template <typename Real>
template <typename To>
Weights<To> Weights<Real>::Cast() const {
  Weights<To> out;
  out.hp = hp;
  auto cast = [](const auto& t) { return t.template cast<To>().eval(); };
  out.conv_w = cast(conv_w);
  out.conv_b = cast(conv_b);
  out.bn_gamma = cast(bn_gamma);
  out.bn_beta = cast(bn_beta);
  out.bn_mean = cast(bn_mean);
  out.bn_var = cast(bn_var);
  out.gru_wz = cast(gru_wz);
  out.gru_wr = cast(gru_wr);
  out.gru_wn = cast(gru_wn);
  out.gru_uz = cast(gru_uz);
  out.gru_ur = cast(gru_ur);
  out.gru_un = cast(gru_un);
  out.gru_bz = cast(gru_bz);
  out.gru_br = cast(gru_br);
  out.gru_bn = cast(gru_bn);
  out.fconv_w = cast(fconv_w);
  out.fconv_b = cast(fconv_b);
  out.dnn_w1 = cast(dnn_w1);
  out.dnn_b1 = cast(dnn_b1);
  out.dnn_w2 = cast(dnn_w2);
  out.dnn_b2 = cast(dnn_b2);
  return out;
}

// Flat view of one tensor; Real may be const-qualified.
template <typename Real>
struct TensorView {
  std::string_view name;
  Real* data;
  Eigen::Index rows;
  Eigen::Index cols;  // 1 for vectors
  bool is_vector;
  TensorRole role;

  Eigen::Index size() const { return rows * cols; }
};

template <typename Real>
std::vector<TensorView<Real>> TensorViews(Weights<Real>& w) {
  std::vector<TensorView<Real>> views;
  w.ForEachTensor([&](std::string_view name, auto& t, TensorRole role) {
    constexpr bool kIsVector = std::decay_t<decltype(t)>::ColsAtCompileTime == 1;
    views.push_back({name, t.data(), t.rows(), t.cols(), kIsVector, role});
  });
  return views;
}

template <typename Real>
std::vector<TensorView<const Real>> TensorViews(const Weights<Real>& w) {
  std::vector<TensorView<const Real>> views;
  w.ForEachTensor([&](std::string_view name, const auto& t, TensorRole role) {
    constexpr bool kIsVector = std::decay_t<decltype(t)>::ColsAtCompileTime == 1;
    views.push_back({name, t.data(), t.rows(), t.cols(), kIsVector, role});
  });
  return views;
}

template <typename Real>
bool Weights<Real>::BitwiseEquals(const Weights& other) const {
  if (!(hp == other.hp)) return false;
  const auto a = TensorViews(*this);
  const auto b = TensorViews(other);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rows != b[i].rows || a[i].cols != b[i].cols) return false;
    if (std::memcmp(a[i].data, b[i].data,
                    static_cast<std::size_t>(a[i].size()) * sizeof(Real)) != 0)
      return false;
  }
  return true;
}

// Shape every tensor of `hp` must have, as {rows} or {rows, cols}.
std::vector<std::int64_t> ExpectedShape(const Hyperparams& hp,
                                        std::string_view tensor_name);

// Im2col for one conv window: (m * n) x f, column p holding the frequency
// patch at position p with frames stacked oldest first.
template <typename Real>
Mat<Real> ConvPatches(const Hyperparams& hp, const Mat<Real>& window);

// Causal convolution over one window of conv_time frames (rows oldest to
// newest), before batch norm: ReLU(conv + bias), flattened channel-major
// (index channel * f + position).
template <typename Real>
Vec<Real> ConvRelu(const Weights<Real>& w, const Mat<Real>& window);

// Inference batch norm from the stored running statistics.
template <typename Real>
Vec<Real> BatchNormInference(const Weights<Real>& w, const Vec<Real>& x);

// ConvRelu followed by BatchNormInference: the short-term context s_t.
template <typename Real>
Vec<Real> CausalConv(const Weights<Real>& w, const Mat<Real>& window);

template <typename Real>
Vec<Real> GruStep(const Weights<Real>& w, const Vec<Real>& x, const Vec<Real>& h);

// ReLU(fconv_w h + fconv_b).
template <typename Real>
Vec<Real> FeatureConv(const Weights<Real>& w, const Vec<Real>& h);

// Elementwise running maximum; an empty `running` takes `feature` as is.
template <typename Real>
void MaxPoolUpdate(Vec<Real>& running, const Vec<Real>& feature);

// [max_state; hidden] for max-pool variants, `hidden` otherwise.
template <typename Real>
Vec<Real> ContextVector(const Hyperparams& hp, const Vec<Real>& max_state,
                        const Vec<Real>& hidden);

template <typename Real>
Vec<Real> ClassifierLogits(const Weights<Real>& w, const Vec<Real>& context);

template <typename Real>
Vec<Real> Softmax(const Vec<Real>& logits);

template <typename Real>
Vec<Real> Classify(const Weights<Real>& w, const Vec<Real>& context);

// Builds the conv window ending at frame t of `features`, zero-filling
// positions before the first frame.
template <typename Real>
Mat<Real> ConvWindow(const Mat<Real>& features, Eigen::Index t, int conv_time);

// Final context vector after all T frames.
template <typename Real>
Vec<Real> ForwardContext(const Weights<Real>& w, const Mat<Real>& features);

// Class probabilities for a whole clip of T >= 1 PCEN frames.
template <typename Real>
Vec<Real> ForwardFull(const Weights<Real>& w, const Mat<Real>& features);

}  // namespace vqr

#endif  // VQR_MODEL_H_
