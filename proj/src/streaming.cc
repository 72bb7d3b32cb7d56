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

#include "vqr/streaming.h"

#include <stdexcept>

#include "vqr/errors.h"
#include "vqr/eval.h"

namespace vqr {

StreamState InitStream(const Hyperparams& hp) {
  StreamState state;
  state.conv_history = PcenMatrix::Zero(hp.HistoryFrames(), kMelBands);
  state.gru_hidden = Vec<float>::Zero(hp.gru_units);
  return state;
}

std::size_t StateSizeBytes(const StreamState& state, const Hyperparams& hp) {
  const auto history = static_cast<std::size_t>(state.conv_history.size());
  const auto hidden = static_cast<std::size_t>(state.gru_hidden.size());
  // The max-pool slot is reserved from the start even though it is filled
  // by the first frame.
  const std::size_t pooled = hp.HasMaxPool() ? static_cast<std::size_t>(hp.feature_channels) : 0;
  return sizeof(float) * (history + hidden + pooled);
}

std::size_t AuxiliaryStateBytes(const StreamState& state, const FrameConfig& frame) {
  return sizeof(state.pcen.smoother) +
         sizeof(float) * static_cast<std::size_t>(frame.WindowSamples());
}

StreamingRecognizer::StreamingRecognizer(const Weights<float>& weights,
                                         const PcenFrontend& frontend,
                                         StreamConfig config)
    : weights_(weights),
      frontend_(frontend),
      config_(config),
      window_(static_cast<std::size_t>(frontend.frame_config().WindowSamples())),
      hop_(static_cast<std::size_t>(frontend.frame_config().HopSamples())) {
  weights_.hp.Validate();
  if (config_.interval_ms <= 0) throw ConfigError("stream: interval_ms must be positive");
  interval_samples_ =
      static_cast<std::int64_t>(frontend.frame_config().sample_rate) * config_.interval_ms / 1000;
  if (interval_samples_ < 1) throw ConfigError("stream: interval shorter than one sample");
}

void StreamingRecognizer::ProcessHop(StreamState& state) const {
  const Hyperparams& hp = weights_.hp;
  const PcenFrame frame = PcenStep(
      frontend_.ComputeMelEnergies(std::span<const float>(state.sample_buffer).first(window_)),
      state.pcen, frontend_.pcen_config());

  Vec<float> x;
  if (hp.HasConv()) {
    PcenMatrix window(hp.conv_time, kMelBands);
    window.topRows(hp.conv_time - 1) = state.conv_history;
    StoreFrame(frame, window, hp.conv_time - 1);
    x = CausalConv(weights_, window);
    state.conv_history = window.bottomRows(hp.conv_time - 1);
  } else {
    PcenMatrix row(1, kMelBands);
    StoreFrame(frame, row, 0);
    x = row.row(0).transpose();
  }
  state.gru_hidden = GruStep(weights_, x, state.gru_hidden);
  if (hp.HasMaxPool()) MaxPoolUpdate(state.max_state, FeatureConv(weights_, state.gru_hidden));

  state.sample_buffer.erase(state.sample_buffer.begin(),
                            state.sample_buffer.begin() + static_cast<std::ptrdiff_t>(hop_));
  ++state.frames_seen;
}

std::vector<Prediction> StreamingRecognizer::Push(StreamState& state,
                                                  std::span<const float> samples) const {
  std::vector<Prediction> predictions;
  for (float sample : samples) {
    state.sample_buffer.push_back(sample);
    ++state.samples_seen;
    if (state.sample_buffer.size() == window_) ProcessHop(state);
    if (state.samples_seen % interval_samples_ == 0 && state.frames_seen > 0) {
      Prediction p;
      p.at_ms = state.samples_seen * 1000 / frontend_.frame_config().sample_rate;
      p.probs = Probabilities(state);
      const EvalRecord record = MakeRecord(p.probs, 0);
      p.top_prob = static_cast<float>(record.top_prob);
      p.label = ApplyThreshold(record, config_.alpha, weights_.hp.UnknownClass());
      predictions.push_back(std::move(p));
    }
  }
  return predictions;
}

Vec<float> StreamingRecognizer::Probabilities(const StreamState& state) const {
  if (state.frames_seen == 0)
    throw std::logic_error("stream: no frame processed yet; need 480 samples");
  return Classify(weights_, ContextVector(weights_.hp, state.max_state, state.gru_hidden));
}

}  // namespace vqr
