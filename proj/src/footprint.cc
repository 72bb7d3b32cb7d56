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

#include "vqr/footprint.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace vqr {

std::int64_t Footprint::TotalParams() const {
  std::int64_t total = 0;
  for (const LayerFootprint& l : layers) total += l.params;
  return total;
}

std::int64_t Footprint::TotalMultiplies() const {
  std::int64_t total = 0;
  for (const LayerFootprint& l : layers) total += l.multiplies;
  return total;
}

const LayerFootprint& Footprint::Layer(const std::string& name) const {
  for (const LayerFootprint& l : layers)
    if (l.layer == name) return l;
  throw std::out_of_range("footprint has no layer " + name);
}

Footprint ComputeFootprint(const Hyperparams& hp, int frames_per_second,
                           int classifications_per_second) {
  hp.Validate();
  const std::int64_t fps = frames_per_second;
  const std::int64_t cps = classifications_per_second;
  const std::int64_t c = hp.conv_channels, m = hp.conv_time, n = hp.conv_freq;
  const std::int64_t f = hp.FreqPositions();
  const std::int64_t k = hp.gru_units, d = hp.feature_channels;
  const std::int64_t in = hp.GruInput(), ctx = hp.ContextDim();
  const std::int64_t r = hp.hidden_units, classes = hp.num_classes;

  Footprint fp;
  if (hp.HasConv()) {
    fp.layers.push_back({"short-term", "C. Conv", c * m * n + c, fps * f * c * m * n,
                         "c, m, n = " + std::to_string(c) + ", " +
                             std::to_string(m) + ", " + std::to_string(n)});
    fp.layers.push_back({"short-term", "BN", 2 * c, fps * f * c * 2, "-"});
  }
  fp.layers.push_back({"long-term", "GRU", 3 * (k * in + k * k + k),
                       fps * 3 * (k * in + k * k), "k = " + std::to_string(k)});
  if (hp.HasMaxPool())
    fp.layers.push_back({"long-term", "Conv", d * k + d, fps * d * k,
                         "d = " + std::to_string(d)});
  fp.layers.push_back({"classifier", "DNN", ctx * r + r, cps * ctx * r,
                       "r = " + std::to_string(r)});
  fp.layers.push_back({"classifier", "Softmax", r * classes + classes,
                       cps * r * classes, "N + 1 = " + std::to_string(classes)});
  return fp;
}

std::string DisplayCount(std::int64_t value) {
  const double v = static_cast<double>(value);
  const char* suffix = "";
  double scaled = v;
  if (std::abs(v) >= 999500.0) {
    scaled = v / 1e6;
    suffix = "M";
  } else if (std::abs(v) >= 1000.0) {
    scaled = v / 1e3;
    suffix = "K";
  }
  const double mag = std::abs(scaled);
  const int decimals = mag >= 100 ? 0 : (mag >= 10 ? 1 : 2);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f%s", (*suffix ? decimals : 0), scaled, suffix);
  return buf;
}

std::string FormatFootprint(const Hyperparams& hp, const Footprint& footprint) {
  std::string out = "variant " + std::string(VariantName(hp.variant)) + "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-8s %12s %8s %14s %8s  %s\n", "group",
                "layer", "params", "", "mult/s", "", "hyperparameters");
  out += line;
  for (const LayerFootprint& l : footprint.layers) {
    std::snprintf(line, sizeof(line), "%-10s %-8s %12lld %8s %14lld %8s  %s\n",
                  l.group.c_str(), l.layer.c_str(), static_cast<long long>(l.params),
                  DisplayCount(l.params).c_str(),
                  static_cast<long long>(l.multiplies),
                  DisplayCount(l.multiplies).c_str(), l.hyperparams.c_str());
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-10s %-8s %12lld %8s %14lld %8s\n", "total", "",
                static_cast<long long>(footprint.TotalParams()),
                DisplayCount(footprint.TotalParams()).c_str(),
                static_cast<long long>(footprint.TotalMultiplies()),
                DisplayCount(footprint.TotalMultiplies()).c_str());
  out += line;
  return out;
}

}  // namespace vqr
