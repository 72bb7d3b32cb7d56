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

#include "vqr/augment.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "vqr/errors.h"
#include "vqr/fft.h"

namespace vqr {
namespace {

std::vector<double> ToDouble(const Waveform& wave) {
  return {wave.samples.begin(), wave.samples.end()};
}

}  // namespace

void AugmentConfig::Validate() const {
  if (gauss_sigma < 0) throw ConfigError("augment: gauss_sigma must be >= 0");
  if (!(sp_prob >= 0 && sp_prob <= 1))
    throw ConfigError("augment: sp_prob must lie in [0, 1]");
  if (!(band_low_min >= 0 && band_low_min <= band_low_max &&
        band_low_max < band_high_min && band_high_min <= band_high_max &&
        band_high_max <= kSampleRate / 2))
    throw ConfigError("augment: band ranges must be ordered within [0, 8000] Hz");
  if (suppress_factor != 0.5)
    throw ConfigError("augment: suppress_factor is fixed at 0.5");
  if (pitch_shift_hz != 33.0)
    throw ConfigError("augment: pitch shift magnitude is fixed at 33 Hz");
  for (double p : {noise_prob, band_prob, pitch_prob})
    if (!(p >= 0 && p <= 1))
      throw ConfigError("augment: application probabilities must lie in [0, 1]");
}

Waveform AddNoise(const Waveform& wave, double sigma, double sp_prob, Rng& rng) {
  Waveform out = wave;
  if (sigma > 0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (float& x : out.samples)
      x = static_cast<float>(std::clamp(x + gauss(rng), -1.0, double{kFullScale}));
  }
  if (sp_prob > 0) {
    std::bernoulli_distribution hit(sp_prob);
    std::bernoulli_distribution coin(0.5);
    for (float& x : out.samples)
      if (hit(rng)) x = coin(rng) ? kFullScale : -kFullScale;
  }
  return out;
}

Waveform BandSuppress(const Waveform& wave, double low_hz, double high_hz,
                      double factor) {
  const double nyquist = wave.sample_rate / 2.0;
  if (!(low_hz >= 0 && low_hz < high_hz && high_hz <= nyquist))
    throw ConfigError("band_suppress: need 0 <= a < b <= Nyquist");
  const int n = static_cast<int>(wave.size());
  if (n < 2) return wave;

  const RealFft fft(n);
  const std::vector<double> in = ToDouble(wave);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(fft.num_bins()));
  fft.Forward(in, spectrum);
  for (int k = 0; k < fft.num_bins(); ++k) {
    const double hz = static_cast<double>(k) * wave.sample_rate / n;
    if (hz < low_hz || hz > high_hz) spectrum[k] *= factor;
  }
  std::vector<double> time(static_cast<std::size_t>(n));
  fft.Inverse(spectrum, time);

  Waveform out;
  out.sample_rate = wave.sample_rate;
  out.samples.resize(time.size());
  for (std::size_t i = 0; i < time.size(); ++i)
    out.samples[i] = static_cast<float>(time[i] / n);
  return out;
}

double DominantFrequency(const Waveform& wave) {
  const int n = static_cast<int>(wave.size());
  if (n < 4) return 0.0;
  const RealFft fft(n);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(fft.num_bins()));
  fft.Forward(ToDouble(wave), spectrum);

  int peak = 0;
  double peak_mag = 0.0;
  for (int k = 1; k < fft.num_bins(); ++k) {
    const double mag = std::abs(spectrum[k]);
    if (mag > peak_mag) {
      peak_mag = mag;
      peak = k;
    }
  }
  if (peak == 0) return 0.0;
  double offset = 0.0;
  if (peak + 1 < fft.num_bins()) {
    const double left = std::abs(spectrum[peak - 1]);
    const double right = std::abs(spectrum[peak + 1]);
    const double denom = left - 2.0 * peak_mag + right;
    if (denom != 0.0) offset = 0.5 * (left - right) / denom;
  }
  return (peak + offset) * wave.sample_rate / n;
}

Waveform PitchShift(const Waveform& wave, double delta_hz) {
  if (delta_hz == 0.0) return wave;
  const double f0 = DominantFrequency(wave);
  if (f0 <= 0.0 || f0 + delta_hz <= 0.0) return wave;
  const double ratio = (f0 + delta_hz) / f0;

  // Reading the input at `ratio` times the original rate scales every
  // frequency by `ratio`.
  Waveform out;
  out.sample_rate = wave.sample_rate;
  out.samples.assign(wave.size(), 0.0f);
  const auto last = static_cast<double>(wave.size() - 1);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const double pos = static_cast<double>(i) * ratio;
    if (pos > last) break;
    const auto base = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(base);
    const double next = base + 1 < wave.size() ? wave.samples[base + 1] : 0.0;
    out.samples[i] = static_cast<float>((1.0 - frac) * wave.samples[base] + frac * next);
  }
  return out;
}

Waveform Augment(const Waveform& wave, const AugmentConfig& config, Rng& rng) {
  std::bernoulli_distribution apply_pitch(config.pitch_prob);
  std::bernoulli_distribution apply_band(config.band_prob);
  std::bernoulli_distribution apply_noise(config.noise_prob);
  std::bernoulli_distribution sign(0.5);
  std::uniform_real_distribution<double> low(config.band_low_min, config.band_low_max);
  std::uniform_real_distribution<double> high(config.band_high_min, config.band_high_max);

  // Draw every decision up front so the random stream does not depend on
  // which transforms fire.
  const bool do_pitch = apply_pitch(rng);
  const double delta = sign(rng) ? config.pitch_shift_hz : -config.pitch_shift_hz;
  const bool do_band = apply_band(rng);
  const double a = low(rng);
  const double b = high(rng);
  const bool do_noise = apply_noise(rng);

  Waveform out = wave;
  if (do_pitch) out = PitchShift(out, delta);
  if (do_band) out = BandSuppress(out, a, b, config.suppress_factor);
  if (do_noise) out = AddNoise(out, config.gauss_sigma, config.sp_prob, rng);
  return out;
}

}  // namespace vqr
