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

#ifndef VQR_STREAMING_H_
#define VQR_STREAMING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vqr/frontend.h"
#include "vqr/model.h"

namespace vqr {

// Per-stream recurrent state. Its size depends on the hyperparameters only.
struct StreamState {
  PcenState pcen;
  PcenMatrix conv_history;  // (m - 1) x 40, oldest first, zeros until filled
  Vec<float> gru_hidden;    // k
  Vec<float> max_state;     // d; empty until the first frame (-inf sentinel)
  std::int64_t frames_seen = 0;
  std::int64_t samples_seen = 0;
  // Samples from 160 * frames_seen onwards, fewer than one window.
  std::vector<float> sample_buffer;
};

struct Prediction {
  std::int64_t at_ms = 0;
  int label = 0;         // thresholded class id (unknown when rejected)
  float top_prob = 0.0f;
  Vec<float> probs;
};

StreamState InitStream(const Hyperparams& hp);

// Bytes of the recurrent core: conv history, GRU hidden state and max-pool
// state as 32-bit reals. 4720 for the full crnn-750m.
std::size_t StateSizeBytes(const StreamState& state, const Hyperparams& hp);
// PCEN smoother plus the sample buffer's capacity (one window), excluded
// from the core figure.
std::size_t AuxiliaryStateBytes(const StreamState& state, const FrameConfig& frame);

struct StreamConfig {
  int interval_ms = 100;
  double alpha = 0.0;  // rejection threshold applied to emitted labels
};

class StreamingRecognizer {
 public:
  // Holds references; `weights` and `frontend` must outlive the recognizer.
  StreamingRecognizer(const Weights<float>& weights, const PcenFrontend& frontend,
                      StreamConfig config = {});

  StreamState Init() const { return InitStream(weights_.hp); }

  // Consumes samples (unit-scaled, 16 kHz). Every completed 10 ms hop runs
  // the frontend, causal conv, GRU, feature conv and max-pool once; every
  // time the stream clock reaches a multiple of the interval with at least
  // one frame processed, a prediction is emitted.
  std::vector<Prediction> Push(StreamState& state, std::span<const float> samples) const;

  // Class probabilities from the current state. Throws std::logic_error
  // before the first frame.
  Vec<float> Probabilities(const StreamState& state) const;

  const StreamConfig& config() const { return config_; }

 private:
  void ProcessHop(StreamState& state) const;

  const Weights<float>& weights_;
  const PcenFrontend& frontend_;
  StreamConfig config_;
  std::int64_t interval_samples_;
  std::size_t window_;
  std::size_t hop_;
};

}  // namespace vqr

#endif  // VQR_STREAMING_H_
