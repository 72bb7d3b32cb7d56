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

#ifndef VQR_AUGMENT_H_
#define VQR_AUGMENT_H_

#include <random>

#include "vqr/wav.h"

namespace vqr {

using Rng = std::mt19937_64;

struct AugmentConfig {
  // Noise amplitudes are in unit-scaled sample units.
  double gauss_sigma = 0.005;
  double sp_prob = 5e-4;
  // Band edges are drawn uniformly from these ranges (Hz).
  double band_low_min = 0.0;
  double band_low_max = 1700.0;
  double band_high_min = 1800.0;
  double band_high_max = 3300.0;
  double suppress_factor = 0.5;
  double pitch_shift_hz = 33.0;
  double noise_prob = 0.5;
  double band_prob = 0.5;
  double pitch_prob = 0.5;

  void Validate() const;
};

// Full-scale value written by salt-and-pepper noise (32767 in PCM units).
inline constexpr float kFullScale = 32767.0f / 32768.0f;

// Adds N(0, sigma) to every sample, clips to full scale, then replaces each
// sample with +/- full scale (fair coin) with probability `sp_prob`.
Waveform AddNoise(const Waveform& wave, double sigma, double sp_prob, Rng& rng);

// Scales every spectral bin outside [low_hz, high_hz] by `factor`.
// Throws ConfigError unless 0 <= low_hz < high_hz <= Nyquist.
Waveform BandSuppress(const Waveform& wave, double low_hz, double high_hz,
                      double factor = 0.5);

// Frequency of the strongest spectral peak, refined by parabolic
// interpolation. Returns 0 for silent input.
double DominantFrequency(const Waveform& wave);

// Resamples so the dominant frequency f moves to f + delta_hz, then pads or
// trims back to the input length.
Waveform PitchShift(const Waveform& wave, double delta_hz);

// Pitch shift, band suppression and noise, each applied independently with
// its configured probability and freshly drawn parameters.
Waveform Augment(const Waveform& wave, const AugmentConfig& config, Rng& rng);

}  // namespace vqr

#endif  // VQR_AUGMENT_H_
