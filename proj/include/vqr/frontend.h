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

#ifndef VQR_FRONTEND_H_
#define VQR_FRONTEND_H_

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "vqr/fft.h"
#include "vqr/hyperparams.h"
#include "vqr/tensor.h"
#include "vqr/wav.h"

namespace vqr {

struct FrameConfig {
  int sample_rate = kSampleRate;
  int window_ms = 30;
  int hop_ms = 10;
  int num_mels = kMelBands;
  int fft_size = 512;

  int WindowSamples() const { return sample_rate * window_ms / 1000; }
  int HopSamples() const { return sample_rate * hop_ms / 1000; }
  void Validate() const;
};

// out = (e / (eps + m)^alpha + delta)^root - delta^root, with the smoother
// m <- (1 - smoothing) m + smoothing e.
struct PcenConfig {
  double smoothing = 0.025;
  double alpha = 0.98;
  double delta = 2.0;
  double root = 0.5;
  double epsilon = 1e-6;

  void Validate() const;
};

struct PcenState {
  std::array<float, kMelBands> smoother{};
  bool initialized = false;

  bool operator==(const PcenState&) const = default;
};

using MelEnergies = std::array<double, kMelBands>;
using PcenFrame = std::array<double, kMelBands>;

double HzToMel(double hz);
double MelToHz(double mel);

// num_mels x (fft_size / 2 + 1) triangular filters on the HTK mel scale,
// spanning 0 Hz to Nyquist with unit peak height.
Mat<double> MelFilterbank(const FrameConfig& config);

int NumFrames(std::size_t num_samples, const FrameConfig& config);

// Window t covers samples [hop * t, hop * t + window). Throws DataError when
// the waveform is shorter than one window.
std::vector<std::span<const float>> FrameSignal(const Waveform& wave,
                                                const FrameConfig& config);

// Advances `state` by one frame of energies and returns the normalized
// frame. The first call seeds the smoother with `energies`.
PcenFrame PcenStep(const MelEnergies& energies, PcenState& state,
                   const PcenConfig& config);

class PcenFrontend {
 public:
  explicit PcenFrontend(FrameConfig frame = {}, PcenConfig pcen = {});

  const FrameConfig& frame_config() const { return frame_; }
  const PcenConfig& pcen_config() const { return pcen_; }
  const Mat<double>& filterbank() const { return filterbank_; }

  // Hann-windowed, zero-padded power spectrum summed through the filterbank.
  // `window` must hold exactly WindowSamples() samples.
  MelEnergies ComputeMelEnergies(std::span<const float> window) const;

  // Offline PCEN over a whole clip: FrameSignal, then ComputeMelEnergies and
  // PcenStep from a fresh state, one row per frame.
  PcenMatrix Compute(const Waveform& wave) const;

 private:
  FrameConfig frame_;
  PcenConfig pcen_;
  RealFft fft_;
  std::vector<double> hann_;
  Mat<double> filterbank_;
};

void StoreFrame(const PcenFrame& frame, PcenMatrix& matrix, Eigen::Index row);

// One line per frame, 40 space-separated reals printed round-trip exact.
void WriteFeatureDump(std::ostream& out, const PcenMatrix& features);
PcenMatrix ReadFeatureDump(std::istream& in);

}  // namespace vqr

#endif  // VQR_FRONTEND_H_
