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

#include "vqr/frontend.h"

#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "vqr/errors.h"

namespace vqr {

void FrameConfig::Validate() const {
  if (sample_rate <= 0 || window_ms <= 0 || hop_ms <= 0)
    throw ConfigError("frame config: rates and durations must be positive");
  if (num_mels != kMelBands)
    throw ConfigError("frame config: the model expects 40 mel bands");
  if (fft_size < WindowSamples())
    throw ConfigError("frame config: fft_size must cover the window");
}

void PcenConfig::Validate() const {
  if (!(smoothing > 0 && smoothing <= 1))
    throw ConfigError("pcen: smoothing must lie in (0, 1]");
  if (!(alpha > 0 && alpha <= 1)) throw ConfigError("pcen: alpha must lie in (0, 1]");
  if (!(delta > 0)) throw ConfigError("pcen: delta must be positive");
  if (!(root > 0 && root <= 1)) throw ConfigError("pcen: root must lie in (0, 1]");
  if (!(epsilon > 0)) throw ConfigError("pcen: epsilon must be positive");
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Mat<double> MelFilterbank(const FrameConfig& config) {
  const int num_bins = config.fft_size / 2 + 1;
  const double nyquist = config.sample_rate / 2.0;
  const double mel_high = HzToMel(nyquist);
  std::vector<double> edges(static_cast<std::size_t>(config.num_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = MelToHz(mel_high * static_cast<double>(i) /
                       static_cast<double>(config.num_mels + 1));

  Mat<double> bank = Mat<double>::Zero(config.num_mels, num_bins);
  for (int j = 0; j < config.num_mels; ++j) {
    const double lower = edges[j], center = edges[j + 1], upper = edges[j + 2];
    for (int k = 0; k < num_bins; ++k) {
      const double hz = static_cast<double>(k) * config.sample_rate / config.fft_size;
      if (hz > lower && hz <= center) {
        bank(j, k) = (hz - lower) / (center - lower);
      } else if (hz > center && hz < upper) {
        bank(j, k) = (upper - hz) / (upper - center);
      }
    }
  }
  return bank;
}

int NumFrames(std::size_t num_samples, const FrameConfig& config) {
  const auto window = static_cast<std::size_t>(config.WindowSamples());
  if (num_samples < window) return 0;
  return static_cast<int>((num_samples - window) / config.HopSamples()) + 1;
}

std::vector<std::span<const float>> FrameSignal(const Waveform& wave,
                                                const FrameConfig& config) {
  const int count = NumFrames(wave.size(), config);
  if (count == 0)
    throw DataError("audio of " + std::to_string(wave.size()) +
                    " samples is shorter than one " +
                    std::to_string(config.WindowSamples()) + "-sample window");
  std::vector<std::span<const float>> windows;
  windows.reserve(static_cast<std::size_t>(count));
  const std::span<const float> all(wave.samples);
  for (int t = 0; t < count; ++t)
    windows.push_back(all.subspan(static_cast<std::size_t>(t) * config.HopSamples(),
                                  static_cast<std::size_t>(config.WindowSamples())));
  return windows;
}

PcenFrame PcenStep(const MelEnergies& energies, PcenState& state,
                   const PcenConfig& config) {
  const double floor_term = std::pow(config.delta, config.root);
  PcenFrame out;
  for (int j = 0; j < kMelBands; ++j) {
    const double e = energies[j];
    const double m = state.initialized
                         ? (1.0 - config.smoothing) * state.smoother[j] +
                               config.smoothing * e
                         : e;
    state.smoother[j] = static_cast<float>(m);
    const double smoothed = state.smoother[j];
    // (x + delta)^r - delta^r without cancellation when x is small.
    const double x = e / std::pow(config.epsilon + smoothed, config.alpha);
    out[j] = floor_term * std::expm1(config.root * std::log1p(x / config.delta));
  }
  state.initialized = true;
  return out;
}

PcenFrontend::PcenFrontend(FrameConfig frame, PcenConfig pcen)
    : frame_(frame), pcen_(pcen), fft_((frame.Validate(), frame.fft_size)) {
  pcen_.Validate();
  const int window = frame_.WindowSamples();
  hann_.resize(static_cast<std::size_t>(window));
  for (int i = 0; i < window; ++i)
    hann_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window);
  filterbank_ = MelFilterbank(frame_);
}

MelEnergies PcenFrontend::ComputeMelEnergies(std::span<const float> window) const {
  if (window.size() != hann_.size())
    throw std::invalid_argument("ComputeMelEnergies: window must hold " +
                                std::to_string(hann_.size()) + " samples");
  std::vector<double> padded(static_cast<std::size_t>(fft_.size()), 0.0);
  for (std::size_t i = 0; i < window.size(); ++i)
    padded[i] = static_cast<double>(window[i]) * hann_[i];
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(fft_.num_bins()));
  fft_.Forward(padded, spectrum);

  Vec<double> power(fft_.num_bins());
  for (int k = 0; k < fft_.num_bins(); ++k) power[k] = std::norm(spectrum[k]);
  const Vec<double> mel = filterbank_ * power;
  MelEnergies energies;
  for (int j = 0; j < kMelBands; ++j) energies[j] = mel[j];
  return energies;
}

void StoreFrame(const PcenFrame& frame, PcenMatrix& matrix, Eigen::Index row) {
  for (int j = 0; j < kMelBands; ++j)
    matrix(row, j) = static_cast<float>(frame[j]);
}

PcenMatrix PcenFrontend::Compute(const Waveform& wave) const {
  const auto windows = FrameSignal(wave, frame_);
  PcenMatrix features(static_cast<Eigen::Index>(windows.size()), kMelBands);
  PcenState state;
  for (std::size_t t = 0; t < windows.size(); ++t) {
    const PcenFrame frame = PcenStep(ComputeMelEnergies(windows[t]), state, pcen_);
    StoreFrame(frame, features, static_cast<Eigen::Index>(t));
  }
  return features;
}

void WriteFeatureDump(std::ostream& out, const PcenMatrix& features) {
  const auto old_precision = out.precision(9);
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j) out << ' ';
      out << features(t, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

PcenMatrix ReadFeatureDump(std::istream& in) {
  std::vector<float> values;
  std::string line;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    float v;
    int count = 0;
    while (fields >> v) {
      values.push_back(v);
      ++count;
    }
    if (count != kMelBands)
      throw DataError("feature dump: expected 40 values on line " +
                      std::to_string(rows + 1));
    ++rows;
  }
  PcenMatrix features(rows, kMelBands);
  std::copy(values.begin(), values.end(), features.data());
  return features;
}

}  // namespace vqr
