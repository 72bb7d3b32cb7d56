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

#include "vqr/model.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vqr {
namespace {

// Fan-in used by the uniform initializer for each tensor.
int FanIn(const Hyperparams& hp, std::string_view name) {
  if (name == "conv_w" || name == "conv_b") return hp.conv_time * hp.conv_freq;
  if (name == "gru_wz" || name == "gru_wr" || name == "gru_wn") return hp.GruInput();
  if (name.starts_with("gru_")) return hp.gru_units;
  if (name.starts_with("fconv_")) return hp.gru_units;
  if (name == "dnn_w1" || name == "dnn_b1") return hp.ContextDim();
  return hp.hidden_units;  // dnn_w2, dnn_b2
}

template <typename Real>
Vec<Real> Sigmoid(const Vec<Real>& a) {
  return (Real(1) + (-a.array()).exp()).inverse().matrix();
}

}  // namespace

std::vector<std::int64_t> ExpectedShape(const Hyperparams& hp,
                                        std::string_view name) {
  const std::int64_t c = hp.conv_channels, k = hp.gru_units,
                     d = hp.feature_channels, r = hp.hidden_units;
  if (name == "conv_w") return {c, std::int64_t{hp.conv_time} * hp.conv_freq};
  if (name == "conv_b" || name.starts_with("bn_")) return {c};
  if (name == "gru_wz" || name == "gru_wr" || name == "gru_wn")
    return {k, hp.GruInput()};
  if (name == "gru_uz" || name == "gru_ur" || name == "gru_un") return {k, k};
  if (name == "gru_bz" || name == "gru_br" || name == "gru_bn") return {k};
  if (name == "fconv_w") return {d, k};
  if (name == "fconv_b") return {d};
  if (name == "dnn_w1") return {r, hp.ContextDim()};
  if (name == "dnn_b1") return {r};
  if (name == "dnn_w2") return {hp.num_classes, r};
  if (name == "dnn_b2") return {hp.num_classes};
  return {};
}

template <typename Real>
Weights<Real> Weights<Real>::Zeros(const Hyperparams& hp) {
  hp.Validate();
  Weights w;
  w.hp = hp;
  w.ForEachTensor([&](std::string_view name, auto& t, TensorRole) {
    const auto shape = ExpectedShape(hp, name);
    if (shape.size() == 1) {
      t.setZero(shape[0], 1);
    } else {
      t.setZero(shape[0], shape[1]);
    }
  });
  if (hp.HasConv()) {
    w.bn_gamma.setOnes();
    w.bn_var.setOnes();
  }
  return w;
}

template <typename Real>
Weights<Real> Weights<Real>::Random(const Hyperparams& hp, std::uint64_t seed) {
  Weights w = Zeros(hp);
  std::mt19937_64 rng(seed);
  w.ForEachTensor([&](std::string_view name, auto& t, TensorRole) {
    if (name.starts_with("bn_")) return;
    const double bound = std::sqrt(1.0 / FanIn(hp, name));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < t.size(); ++i)
      t.data()[i] = static_cast<Real>(dist(rng));
  });
  return w;
}

template <typename Real>
Mat<Real> ConvPatches(const Hyperparams& hp, const Mat<Real>& window) {
  const int m = hp.conv_time, n = hp.conv_freq, f = hp.FreqPositions();
  Mat<Real> patches(m * n, f);
  for (int p = 0; p < f; ++p)
    for (int dt = 0; dt < m; ++dt)
      patches.col(p).segment(dt * n, n) =
          window.row(dt).segment(p * hp.stride_freq, n).transpose();
  return patches;
}

template <typename Real>
Vec<Real> ConvRelu(const Weights<Real>& w, const Mat<Real>& window) {
  Mat<Real> y = w.conv_w * ConvPatches(w.hp, window);
  y.colwise() += w.conv_b;
  y = y.cwiseMax(Real(0));
  return Eigen::Map<const Vec<Real>>(y.data(), y.size());
}

template <typename Real>
Vec<Real> BatchNormInference(const Weights<Real>& w, const Vec<Real>& x) {
  const int f = w.hp.FreqPositions();
  Vec<Real> out(x.size());
  for (Eigen::Index ch = 0; ch < w.bn_gamma.size(); ++ch) {
    const Real scale =
        w.bn_gamma[ch] / std::sqrt(w.bn_var[ch] + Real(kBatchNormEpsilon));
    const Real shift = w.bn_beta[ch] - w.bn_mean[ch] * scale;
    for (int p = 0; p < f; ++p) out[ch * f + p] = x[ch * f + p] * scale + shift;
  }
  return out;
}

template <typename Real>
Vec<Real> CausalConv(const Weights<Real>& w, const Mat<Real>& window) {
  return BatchNormInference(w, ConvRelu(w, window));
}

template <typename Real>
Vec<Real> GruStep(const Weights<Real>& w, const Vec<Real>& x, const Vec<Real>& h) {
  const Vec<Real> z = Sigmoid<Real>(w.gru_wz * x + w.gru_uz * h + w.gru_bz);
  const Vec<Real> r = Sigmoid<Real>(w.gru_wr * x + w.gru_ur * h + w.gru_br);
  const Vec<Real> un = w.gru_un * h;
  const Vec<Real> n =
      (w.gru_wn * x + r.cwiseProduct(un) + w.gru_bn).array().tanh().matrix();
  return (Real(1) - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h);
}

template <typename Real>
Vec<Real> FeatureConv(const Weights<Real>& w, const Vec<Real>& h) {
  return (w.fconv_w * h + w.fconv_b).cwiseMax(Real(0));
}

template <typename Real>
void MaxPoolUpdate(Vec<Real>& running, const Vec<Real>& feature) {
  if (running.size() == 0) {
    running = feature;
  } else {
    running = running.cwiseMax(feature);
  }
}

template <typename Real>
Vec<Real> ContextVector(const Hyperparams& hp, const Vec<Real>& max_state,
                        const Vec<Real>& hidden) {
  if (!hp.HasMaxPool()) return hidden;
  Vec<Real> context(max_state.size() + hidden.size());
  context << max_state, hidden;
  return context;
}

template <typename Real>
Vec<Real> ClassifierLogits(const Weights<Real>& w, const Vec<Real>& context) {
  if (context.size() != w.hp.ContextDim())
    throw std::invalid_argument("classifier: context has " +
                                std::to_string(context.size()) + " entries, expected " +
                                std::to_string(w.hp.ContextDim()));
  const Vec<Real> hidden = (w.dnn_w1 * context + w.dnn_b1).cwiseMax(Real(0));
  return w.dnn_w2 * hidden + w.dnn_b2;
}

template <typename Real>
Vec<Real> Softmax(const Vec<Real>& logits) {
  const Vec<Real> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

template <typename Real>
Vec<Real> Classify(const Weights<Real>& w, const Vec<Real>& context) {
  return Softmax<Real>(ClassifierLogits(w, context));
}

template <typename Real>
Mat<Real> ConvWindow(const Mat<Real>& features, Eigen::Index t, int conv_time) {
  Mat<Real> window = Mat<Real>::Zero(conv_time, features.cols());
  for (int dt = 0; dt < conv_time; ++dt) {
    const Eigen::Index src = t - (conv_time - 1) + dt;
    if (src >= 0) window.row(dt) = features.row(src);
  }
  return window;
}

template <typename Real>
Vec<Real> ForwardContext(const Weights<Real>& w, const Mat<Real>& features) {
  const Hyperparams& hp = w.hp;
  if (features.rows() < 1 || features.cols() != kMelBands)
    throw std::invalid_argument("forward: expected T >= 1 rows of 40 features");
  Vec<Real> h = Vec<Real>::Zero(hp.gru_units);
  Vec<Real> running;
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    const Vec<Real> x = hp.HasConv()
                            ? CausalConv(w, ConvWindow(features, t, hp.conv_time))
                            : Vec<Real>(features.row(t).transpose());
    h = GruStep(w, x, h);
    if (hp.HasMaxPool()) MaxPoolUpdate(running, FeatureConv(w, h));
  }
  return ContextVector(hp, running, h);
}

template <typename Real>
Vec<Real> ForwardFull(const Weights<Real>& w, const Mat<Real>& features) {
  return Classify(w, ForwardContext(w, features));
}

#define VQR_INSTANTIATE_MODEL(Real)                                            \
  template struct Weights<Real>;                                               \
  template Mat<Real> ConvPatches(const Hyperparams&, const Mat<Real>&);        \
  template Vec<Real> ConvRelu(const Weights<Real>&, const Mat<Real>&);         \
  template Vec<Real> BatchNormInference(const Weights<Real>&, const Vec<Real>&); \
  template Vec<Real> CausalConv(const Weights<Real>&, const Mat<Real>&);       \
  template Vec<Real> GruStep(const Weights<Real>&, const Vec<Real>&,           \
                             const Vec<Real>&);                                \
  template Vec<Real> FeatureConv(const Weights<Real>&, const Vec<Real>&);      \
  template void MaxPoolUpdate(Vec<Real>&, const Vec<Real>&);                   \
  template Vec<Real> ContextVector(const Hyperparams&, const Vec<Real>&,       \
                                   const Vec<Real>&);                          \
  template Vec<Real> ClassifierLogits(const Weights<Real>&, const Vec<Real>&); \
  template Vec<Real> Softmax(const Vec<Real>&);                                \
  template Vec<Real> Classify(const Weights<Real>&, const Vec<Real>&);         \
  template Mat<Real> ConvWindow(const Mat<Real>&, Eigen::Index, int);          \
  template Vec<Real> ForwardContext(const Weights<Real>&, const Mat<Real>&);   \
  template Vec<Real> ForwardFull(const Weights<Real>&, const Mat<Real>&);

VQR_INSTANTIATE_MODEL(float)
VQR_INSTANTIATE_MODEL(double)

#undef VQR_INSTANTIATE_MODEL

}  // namespace vqr
