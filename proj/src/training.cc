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

#include "vqr/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vqr/errors.h"

namespace vqr {
namespace {

template <typename Real>
Vec<Real> Sigmoid(const Vec<Real>& a) {
  return (Real(1) + (-a.array()).exp()).inverse().matrix();
}

template <typename Real>
Vec<Real> Positive(const Vec<Real>& v) {
  return (v.array() > Real(0)).template cast<Real>().matrix();
}

template <typename Real>
Weights<Real> ZeroGradients(const Hyperparams& hp) {
  Weights<Real> g = Weights<Real>::Zeros(hp);
  if (hp.HasConv()) {
    g.bn_gamma.setZero();
    g.bn_var.setZero();
  }
  return g;
}

// GRU, feature conv, max-pool and classifier for one example whose GRU
// inputs are the rows of `x`. Returns the unscaled loss. When `g` is set,
// accumulates `scale` times the gradient and writes dLoss/dx (scaled) to
// `dx`.
template <typename Real>
Real RecurrentPass(const Weights<Real>& w, const Mat<Real>& x, int label, Real scale,
                   Weights<Real>* g, Mat<Real>* dx) {
  const Hyperparams& hp = w.hp;
  const Eigen::Index steps = x.rows();
  const int k = hp.gru_units;
  const int d = hp.feature_channels;
  const bool pooled = hp.HasMaxPool();

  const Mat<Real> xz = x * w.gru_wz.transpose();
  const Mat<Real> xr = x * w.gru_wr.transpose();
  const Mat<Real> xn = x * w.gru_wn.transpose();

  Mat<Real> hs(steps + 1, k);
  hs.row(0).setZero();
  Mat<Real> zs(steps, k), rs(steps, k), ns(steps, k), uns(steps, k);
  Mat<Real> fpre;
  Vec<Real> cmax;
  std::vector<Eigen::Index> argmax;
  if (pooled) {
    fpre.resize(steps, d);
    cmax.resize(d);
    argmax.assign(static_cast<std::size_t>(d), 0);
  }

  for (Eigen::Index t = 0; t < steps; ++t) {
    const Vec<Real> h = hs.row(t).transpose();
    const Vec<Real> z =
        Sigmoid<Real>(xz.row(t).transpose() + w.gru_uz * h + w.gru_bz);
    const Vec<Real> r =
        Sigmoid<Real>(xr.row(t).transpose() + w.gru_ur * h + w.gru_br);
    const Vec<Real> un = w.gru_un * h;
    const Vec<Real> n =
        (xn.row(t).transpose() + r.cwiseProduct(un) + w.gru_bn).array().tanh().matrix();
    const Vec<Real> next = (Real(1) - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h);
    zs.row(t) = z.transpose();
    rs.row(t) = r.transpose();
    ns.row(t) = n.transpose();
    uns.row(t) = un.transpose();
    hs.row(t + 1) = next.transpose();
    if (pooled) {
      const Vec<Real> pre = w.fconv_w * next + w.fconv_b;
      fpre.row(t) = pre.transpose();
      for (int j = 0; j < d; ++j) {
        const Real feature = std::max(pre[j], Real(0));
        // Strictly greater: the first step holding the maximum keeps it.
        if (t == 0 || feature > cmax[j]) {
          cmax[j] = feature;
          argmax[static_cast<std::size_t>(j)] = t;
        }
      }
    }
  }

  const Vec<Real> last = hs.row(steps).transpose();
  const Vec<Real> context = ContextVector(hp, cmax, last);
  const Vec<Real> pre1 = w.dnn_w1 * context + w.dnn_b1;
  const Vec<Real> hidden = pre1.cwiseMax(Real(0));
  const Vec<Real> logits = w.dnn_w2 * hidden + w.dnn_b2;
  const Real loss = CrossEntropyFromLogits(logits, label);
  if (g == nullptr) return loss;

  Vec<Real> dlogits = Softmax<Real>(logits);
  dlogits[label] -= Real(1);
  dlogits *= scale;
  g->dnn_w2 += dlogits * hidden.transpose();
  g->dnn_b2 += dlogits;
  const Vec<Real> dpre1 = (w.dnn_w2.transpose() * dlogits).cwiseProduct(Positive(pre1));
  g->dnn_w1 += dpre1 * context.transpose();
  g->dnn_b1 += dpre1;
  const Vec<Real> dcontext = w.dnn_w1.transpose() * dpre1;

  Vec<Real> dh = dcontext.tail(k);
  Mat<Real> dfpre;
  if (pooled) {
    dfpre = Mat<Real>::Zero(steps, d);
    for (int j = 0; j < d; ++j) {
      const Eigen::Index t = argmax[static_cast<std::size_t>(j)];
      if (fpre(t, j) > Real(0)) dfpre(t, j) = dcontext[j];
    }
  }

  Mat<Real> daz(steps, k), dar(steps, k), dan(steps, k), dun(steps, k);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    if (pooled) dh += w.fconv_w.transpose() * dfpre.row(t).transpose();
    const auto z = zs.row(t).transpose().array();
    const auto r = rs.row(t).transpose().array();
    const auto n = ns.row(t).transpose().array();
    const auto un = uns.row(t).transpose().array();
    const auto h = hs.row(t).transpose().array();
    const auto dh_a = dh.array();

    const Vec<Real> dan_t = (dh_a * (Real(1) - z) * (Real(1) - n * n)).matrix();
    const Vec<Real> daz_t = (dh_a * (h - n) * z * (Real(1) - z)).matrix();
    const Vec<Real> dar_t = (dan_t.array() * un * r * (Real(1) - r)).matrix();
    const Vec<Real> dun_t = (dan_t.array() * r).matrix();
    daz.row(t) = daz_t.transpose();
    dar.row(t) = dar_t.transpose();
    dan.row(t) = dan_t.transpose();
    dun.row(t) = dun_t.transpose();
    dh = (dh_a * z).matrix() + w.gru_uz.transpose() * daz_t +
         w.gru_ur.transpose() * dar_t + w.gru_un.transpose() * dun_t;
  }

  const auto prev = hs.topRows(steps);
  g->gru_wz += daz.transpose() * x;
  g->gru_wr += dar.transpose() * x;
  g->gru_wn += dan.transpose() * x;
  g->gru_uz += daz.transpose() * prev;
  g->gru_ur += dar.transpose() * prev;
  g->gru_un += dun.transpose() * prev;
  g->gru_bz += daz.colwise().sum().transpose();
  g->gru_br += dar.colwise().sum().transpose();
  g->gru_bn += dan.colwise().sum().transpose();
  if (pooled) {
    g->fconv_w += dfpre.transpose() * hs.bottomRows(steps);
    g->fconv_b += dfpre.colwise().sum().transpose();
  }
  if (dx != nullptr) *dx = daz * w.gru_wz + dar * w.gru_wr + dan * w.gru_wn;
  return loss;
}

// Per-channel sums of a T x (c * f) matrix laid out channel-major.
template <typename Real>
Vec<Real> ChannelSums(const Mat<Real>& m, int channels, int positions) {
  const Vec<Real> cols = m.colwise().sum().transpose();
  Vec<Real> out(channels);
  for (int ch = 0; ch < channels; ++ch) out[ch] = cols.segment(ch * positions, positions).sum();
  return out;
}

// Multiplies every column of channel ch by v[ch].
template <typename Real>
void ScaleChannels(Mat<Real>& m, const Vec<Real>& v, int positions) {
  for (Eigen::Index ch = 0; ch < v.size(); ++ch)
    m.middleCols(ch * positions, positions) *= v[ch];
}

template <typename Real>
void AddChannels(Mat<Real>& m, const Vec<Real>& v, int positions) {
  for (Eigen::Index ch = 0; ch < v.size(); ++ch)
    m.middleCols(ch * positions, positions).array() += v[ch];
}

template <typename Real>
GradientResult<Real> Run(const Weights<Real>& w, std::span<const Mat<Real>* const> inputs,
                         std::span<const int> labels, BatchNormMode mode,
                         bool want_grads) {
  const Hyperparams& hp = w.hp;
  if (inputs.empty() || inputs.size() != labels.size())
    throw std::invalid_argument("batch: need as many labels as inputs, at least one");
  for (int label : labels)
    if (label < 0 || label >= hp.num_classes)
      throw std::invalid_argument("batch: label " + std::to_string(label) + " out of range");
  for (const Mat<Real>* x : inputs)
    if (x->rows() < 1 || x->cols() != kMelBands)
      throw std::invalid_argument("batch: every input needs T >= 1 rows of 40 features");

  const std::size_t batch = inputs.size();
  const Real scale = Real(1) / static_cast<Real>(batch);
  GradientResult<Real> result;
  if (want_grads) result.grads = ZeroGradients<Real>(hp);
  Weights<Real>* g = want_grads ? &result.grads : nullptr;

  if (!hp.HasConv()) {
    for (std::size_t b = 0; b < batch; ++b)
      result.loss += scale * RecurrentPass<Real>(w, *inputs[b], labels[b], scale, g, nullptr);
    return result;
  }

  const int c = hp.conv_channels, f = hp.FreqPositions(), m = hp.conv_time;
  std::vector<std::vector<Mat<Real>>> patches(batch);
  std::vector<Mat<Real>> activations(batch);  // post-ReLU, T x (c * f)
  std::int64_t count = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    const Mat<Real>& x = *inputs[b];
    activations[b].resize(x.rows(), c * f);
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
      patches[b].push_back(ConvPatches(hp, ConvWindow(x, t, m)));
      Mat<Real> y = w.conv_w * patches[b].back();
      y.colwise() += w.conv_b;
      y = y.cwiseMax(Real(0));
      activations[b].row(t) = Eigen::Map<const Vec<Real>>(y.data(), y.size()).transpose();
    }
    count += x.rows() * f;
  }

  Vec<Real> mean, var;
  if (mode == BatchNormMode::kBatchStats) {
    Vec<Real> sum = Vec<Real>::Zero(c);
    for (const Mat<Real>& a : activations) sum += ChannelSums(a, c, f);
    mean = sum / static_cast<Real>(count);
    Vec<Real> sq = Vec<Real>::Zero(c);
    for (const Mat<Real>& a : activations) {
      Mat<Real> centered = a;
      AddChannels<Real>(centered, -mean, f);
      sq += ChannelSums<Real>(centered.cwiseProduct(centered), c, f);
    }
    var = sq / static_cast<Real>(count);
    result.batch_mean = mean;
    result.batch_var = var;
    result.bn_count = count;
  } else {
    mean = w.bn_mean;
    var = w.bn_var;
  }
  const Vec<Real> inv_std =
      (var.array() + Real(kBatchNormEpsilon)).rsqrt().matrix();

  std::vector<Mat<Real>> normalized(batch);  // x-hat
  std::vector<Mat<Real>> grad_inputs(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    normalized[b] = activations[b];
    AddChannels<Real>(normalized[b], -mean, f);
    ScaleChannels<Real>(normalized[b], inv_std, f);
    Mat<Real> bn_out = normalized[b];
    ScaleChannels<Real>(bn_out, w.bn_gamma, f);
    AddChannels<Real>(bn_out, w.bn_beta, f);
    result.loss += scale * RecurrentPass<Real>(w, bn_out, labels[b], scale, g,
                                         want_grads ? &grad_inputs[b] : nullptr);
  }
  if (!want_grads) return result;

  // Batch norm backward.
  Vec<Real> dgamma = Vec<Real>::Zero(c), dbeta = Vec<Real>::Zero(c);
  for (std::size_t b = 0; b < batch; ++b) {
    dgamma += ChannelSums<Real>(grad_inputs[b].cwiseProduct(normalized[b]), c, f);
    dbeta += ChannelSums<Real>(grad_inputs[b], c, f);
  }
  g->bn_gamma += dgamma;
  g->bn_beta += dbeta;
  // With dxhat = gamma * dout, batch statistics give
  // dy = inv_std * (dxhat - mean(dxhat) - xhat * mean(dxhat * xhat)),
  // where sum(dxhat) = gamma * dbeta and sum(dxhat * xhat) = gamma * dgamma.
  const Vec<Real> mean_dxhat =
      w.bn_gamma.cwiseProduct(dbeta) / static_cast<Real>(count);
  const Vec<Real> mean_dxhat_xhat =
      w.bn_gamma.cwiseProduct(dgamma) / static_cast<Real>(count);

  for (std::size_t b = 0; b < batch; ++b) {
    Mat<Real> dy = grad_inputs[b];
    ScaleChannels<Real>(dy, w.bn_gamma, f);
    if (mode == BatchNormMode::kBatchStats) {
      Mat<Real> correction = normalized[b];
      ScaleChannels<Real>(correction, mean_dxhat_xhat, f);
      dy -= correction;
      AddChannels<Real>(dy, -mean_dxhat, f);
    }
    ScaleChannels<Real>(dy, inv_std, f);
    dy = dy.cwiseProduct(
        (activations[b].array() > Real(0)).template cast<Real>().matrix());

    for (Eigen::Index t = 0; t < dy.rows(); ++t) {
      const Vec<Real> row = dy.row(t).transpose();
      const Eigen::Map<const Mat<Real>> dconv(row.data(), c, f);
      g->conv_w += dconv * patches[b][static_cast<std::size_t>(t)].transpose();
      g->conv_b += dconv.rowwise().sum();
    }
  }
  return result;
}

template <typename Real>
bool AllFinite(const Weights<Real>& w) {
  for (const TensorView<const Real>& v : TensorViews(w)) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!std::isfinite(v.data[i])) return false;
  }
  return true;
}

}  // namespace

void TrainConfig::Validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(momentum >= 0 && momentum < 1)) throw ConfigError("train: momentum must lie in [0, 1)");
  if (weight_decay < 0) throw ConfigError("train: weight_decay must be >= 0");
  if (total_epochs < 1) throw ConfigError("train: total_epochs must be >= 1");
  if (lr_schedule.empty() || lr_schedule.front().first_epoch != 1)
    throw ConfigError("train: the learning-rate schedule must start at epoch 1");
  for (std::size_t i = 0; i < lr_schedule.size(); ++i) {
    if (!(lr_schedule[i].rate > 0)) throw ConfigError("train: learning rates must be positive");
    if (i > 0 && lr_schedule[i].first_epoch <= lr_schedule[i - 1].first_epoch)
      throw ConfigError("train: schedule epochs must increase");
  }
  if (!(bn_momentum >= 0 && bn_momentum < 1))
    throw ConfigError("train: bn_momentum must lie in [0, 1)");
  augment_config.Validate();
}

double LrAt(const TrainConfig& config, int epoch) {
  if (epoch < 1 || epoch > config.total_epochs)
    throw ConfigError("epoch " + std::to_string(epoch) + " outside [1, " +
                      std::to_string(config.total_epochs) + "]");
  double rate = config.lr_schedule.front().rate;
  for (const LrStep& step : config.lr_schedule)
    if (epoch >= step.first_epoch) rate = step.rate;
  return rate;
}

template <typename Real>
Real CrossEntropy(const Vec<Real>& probs, int label) {
  return -std::log(probs[label]);
}

template <typename Real>
Real CrossEntropyFromLogits(const Vec<Real>& logits, int label) {
  const Real top = logits.maxCoeff();
  const Real lse = top + std::log((logits.array() - top).exp().sum());
  return lse - logits[label];
}

template <typename Real>
GradientResult<Real> BatchGradient(const Weights<Real>& w,
                                   std::span<const Mat<Real>* const> inputs,
                                   std::span<const int> labels, BatchNormMode mode) {
  return Run(w, inputs, labels, mode, true);
}

template <typename Real>
Real BatchLoss(const Weights<Real>& w, std::span<const Mat<Real>* const> inputs,
               std::span<const int> labels, BatchNormMode mode) {
  return Run(w, inputs, labels, mode, false).loss;
}

template <typename Real>
GradientResult<Real> Backward(const Weights<Real>& w, const Mat<Real>& features,
                              int label) {
  const Mat<Real>* inputs[] = {&features};
  const int labels[] = {label};
  return BatchGradient<Real>(w, inputs, labels, BatchNormMode::kRunningStats);
}

template <typename Real>
void SgdStep(Weights<Real>& w, const Weights<Real>& grads, Weights<Real>& velocity,
             double lr, const TrainConfig& config) {
  auto params = TensorViews(w);
  const auto g = TensorViews(grads);
  auto v = TensorViews(velocity);
  if (g.size() != params.size() || v.size() != params.size())
    throw std::invalid_argument("sgd: weights, gradients and velocity disagree");
  const Real mu = static_cast<Real>(config.momentum);
  const Real decay = static_cast<Real>(config.weight_decay);
  const Real rate = static_cast<Real>(lr);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].role != TensorRole::kParameter) continue;
    if (g[i].size() != params[i].size() || v[i].size() != params[i].size())
      throw std::invalid_argument("sgd: shape mismatch in " + std::string(params[i].name));
    for (Eigen::Index j = 0; j < params[i].size(); ++j) {
      Real& p = params[i].data[j];
      Real& vel = v[i].data[j];
      vel = mu * vel + (g[i].data[j] + decay * p);
      p -= rate * vel;
    }
  }
}

Rng ExampleRng(std::uint64_t seed, int epoch, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  return Rng(seq);
}

std::vector<EvalRecord> ScoreFeatures(const Weights<float>& w,
                                      std::span<const PcenMatrix> features,
                                      std::span<const int> labels) {
  std::vector<EvalRecord> records;
  records.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    records.push_back(MakeRecord(ForwardFull(w, features[i]), labels[i]));
  return records;
}

TrainResult TrainOnFeatures(const FeatureSource& train_features,
                            std::span<const int> train_labels,
                            std::span<const PcenMatrix> val_features,
                            std::span<const int> val_labels, const Hyperparams& hp,
                            const TrainConfig& config, const TrainCallbacks& callbacks) {
  config.Validate();
  hp.Validate();
  if (train_labels.empty()) throw DataError("train: empty training split");
  if (val_features.empty() || val_features.size() != val_labels.size())
    throw DataError("train: validation split is empty or misaligned");

  TrainResult result;
  Weights<float>& w = result.weights;
  w = Weights<float>::Random(hp, config.seed);
  Weights<float> velocity = ZeroGradients<float>(hp);

  const std::size_t n = train_labels.size();
  std::vector<std::size_t> order(n);
  for (int epoch = 1; epoch <= config.total_epochs; ++epoch) {
    const double lr = LrAt(config, epoch);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng = ExampleRng(config.seed, epoch, static_cast<std::size_t>(-1));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    int batch_id = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_id) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      std::vector<PcenMatrix> features;
      std::vector<int> labels;
      for (std::size_t i = start; i < end; ++i) {
        features.push_back(train_features(order[i], epoch));
        labels.push_back(train_labels[order[i]]);
      }
      std::vector<const PcenMatrix*> inputs;
      for (const PcenMatrix& x : features) inputs.push_back(&x);

      GradientResult<float> step =
          BatchGradient<float>(w, inputs, labels, BatchNormMode::kBatchStats);
      if (!std::isfinite(step.loss) || !AllFinite(step.grads))
        throw NumericError("training diverged: non-finite loss or gradient at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(batch_id));
      if (hp.HasConv()) {
        const float keep = static_cast<float>(config.bn_momentum);
        const float unbias = step.bn_count > 1
                                 ? static_cast<float>(step.bn_count) /
                                       static_cast<float>(step.bn_count - 1)
                                 : 1.0f;
        w.bn_mean = keep * w.bn_mean + (1.0f - keep) * step.batch_mean;
        w.bn_var = keep * w.bn_var + (1.0f - keep) * unbias * step.batch_var;
      }
      SgdStep(w, step.grads, velocity, lr, config);
      loss_sum += static_cast<double>(step.loss) * static_cast<double>(end - start);
    }

    const std::vector<EvalRecord> records = ScoreFeatures(w, val_features, val_labels);
    const Rates rates = Score(records, 0.0, hp.UnknownClass());
    const EpochMetrics metrics{epoch, lr, loss_sum / static_cast<double>(n), rates.far,
                               rates.qer};
    result.log.push_back(metrics);
    if (callbacks.on_epoch) callbacks.on_epoch(metrics, w);
  }
  return result;
}

TrainResult Train(const LabeledAudio& train, const LabeledAudio& validation,
                  const Hyperparams& hp, const TrainConfig& config,
                  const PcenFrontend& frontend, const TrainCallbacks& callbacks) {
  std::vector<PcenMatrix> val_features;
  val_features.reserve(validation.size());
  for (const Waveform& clip : validation.clips) val_features.push_back(frontend.Compute(clip));

  const FeatureSource source = [&](std::size_t index, int epoch) {
    if (!config.augment) return frontend.Compute(train.clips[index]);
    Rng rng = ExampleRng(config.seed, epoch, index);
    return frontend.Compute(Augment(train.clips[index], config.augment_config, rng));
  };
  return TrainOnFeatures(source, train.labels, val_features, validation.labels, hp, config,
                         callbacks);
}

#define VQR_INSTANTIATE_TRAINING(Real)                                                \
  template Real CrossEntropy(const Vec<Real>&, int);                                  \
  template Real CrossEntropyFromLogits(const Vec<Real>&, int);                        \
  template GradientResult<Real> BatchGradient(const Weights<Real>&,                   \
                                              std::span<const Mat<Real>* const>,      \
                                              std::span<const int>, BatchNormMode);   \
  template Real BatchLoss(const Weights<Real>&, std::span<const Mat<Real>* const>,    \
                          std::span<const int>, BatchNormMode);                       \
  template GradientResult<Real> Backward(const Weights<Real>&, const Mat<Real>&, int); \
  template void SgdStep(Weights<Real>&, const Weights<Real>&, Weights<Real>&, double, \
                        const TrainConfig&);

VQR_INSTANTIATE_TRAINING(float)
VQR_INSTANTIATE_TRAINING(double)

#undef VQR_INSTANTIATE_TRAINING

}  // namespace vqr
