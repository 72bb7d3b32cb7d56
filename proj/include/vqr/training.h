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

#ifndef VQR_TRAINING_H_
#define VQR_TRAINING_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vqr/augment.h"
#include "vqr/dataset.h"
#include "vqr/eval.h"
#include "vqr/frontend.h"
#include "vqr/model.h"

namespace vqr {

struct LrStep {
  int first_epoch;
  double rate;
};

struct TrainConfig {
  int batch_size = 48;
  double momentum = 0.9;
  double weight_decay = 1e-4;
  // Rate in force from `first_epoch` until the next step.
  std::vector<LrStep> lr_schedule = {{1, 1e-2}, {9, 1e-3}, {13, 1e-4}};
  int total_epochs = 16;
  std::uint64_t seed = 0;
  // Momentum of the batch-norm running estimates.
  double bn_momentum = 0.9;
  bool augment = true;
  AugmentConfig augment_config;

  void Validate() const;
};

// Learning rate for a 1-based epoch. Throws ConfigError outside
// [1, total_epochs].
double LrAt(const TrainConfig& config, int epoch);

// -log(probs[label]).
template <typename Real>
Real CrossEntropy(const Vec<Real>& probs, int label);

// log-sum-exp(logits) - logits[label]; never underflows.
template <typename Real>
Real CrossEntropyFromLogits(const Vec<Real>& logits, int label);

enum class BatchNormMode {
  kRunningStats,  // stored running mean/variance, as at inference
  kBatchStats,    // statistics of the current batch over time and frequency
};

template <typename Real>
struct GradientResult {
  Real loss = 0;          // mean over the batch
  Weights<Real> grads;    // same tensors as the weights; buffers stay zero
  Vec<Real> batch_mean;   // kBatchStats only: per-channel batch statistics
  Vec<Real> batch_var;    // biased
  std::int64_t bn_count = 0;
};

// Mean cross-entropy over the batch and its exact gradient with respect to
// every parameter: back-propagation through the classifier, the max-pool
// (each channel routes to its first argmax step), the GRU across time, batch
// norm and the causal convolution.
template <typename Real>
GradientResult<Real> BatchGradient(const Weights<Real>& w,
                                   std::span<const Mat<Real>* const> inputs,
                                   std::span<const int> labels, BatchNormMode mode);

// Loss only; evaluates the same function BatchGradient differentiates.
template <typename Real>
Real BatchLoss(const Weights<Real>& w, std::span<const Mat<Real>* const> inputs,
               std::span<const int> labels, BatchNormMode mode);

// Single example with inference-mode batch norm.
template <typename Real>
GradientResult<Real> Backward(const Weights<Real>& w, const Mat<Real>& features,
                              int label);

// v <- momentum v + (g + weight_decay w);  w <- w - lr v. Parameters only.
template <typename Real>
void SgdStep(Weights<Real>& w, const Weights<Real>& grads, Weights<Real>& velocity,
             double lr, const TrainConfig& config);

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_far = 0.0;
  double val_qer = 0.0;
};

struct TrainResult {
  Weights<float> weights;
  std::vector<EpochMetrics> log;
};

struct TrainCallbacks {
  std::function<void(const EpochMetrics&, const Weights<float>&)> on_epoch;
};

// Features for training example `index` in a given epoch.
using FeatureSource = std::function<PcenMatrix(std::size_t index, int epoch)>;

// Core loop: per epoch, shuffle, run minibatches (the last one may be
// partial), update batch-norm running statistics, then score the
// validation features. Deterministic given config.seed. Throws NumericError
// naming the epoch and batch when the loss stops being finite.
TrainResult TrainOnFeatures(const FeatureSource& train_features,
                            std::span<const int> train_labels,
                            std::span<const PcenMatrix> val_features,
                            std::span<const int> val_labels, const Hyperparams& hp,
                            const TrainConfig& config,
                            const TrainCallbacks& callbacks = {});

// Audio pipeline: each epoch re-augments (when enabled) and recomputes PCEN
// with a per-example random stream derived from (seed, epoch, index).
TrainResult Train(const LabeledAudio& train, const LabeledAudio& validation,
                  const Hyperparams& hp, const TrainConfig& config,
                  const PcenFrontend& frontend, const TrainCallbacks& callbacks = {});

// Unthresholded records for a set of features.
std::vector<EvalRecord> ScoreFeatures(const Weights<float>& w,
                                      std::span<const PcenMatrix> features,
                                      std::span<const int> labels);

// Random stream for one example in one epoch.
Rng ExampleRng(std::uint64_t seed, int epoch, std::size_t index);

}  // namespace vqr

#endif  // VQR_TRAINING_H_
