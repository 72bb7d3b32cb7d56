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

#ifndef VQR_FFT_H_
#define VQR_FFT_H_

#include <complex>
#include <span>

namespace vqr {

// Real-input FFT of a fixed size backed by an FFTW plan. Planning is
// serialized internally; Forward/Inverse are safe to call concurrently on a
// shared instance.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  // `in` has size() samples, `out` has num_bins() entries.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // Unnormalized inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  void Release();

  int size_ = 0;
  void* forward_ = nullptr;
  void* inverse_ = nullptr;
};

}  // namespace vqr

#endif  // VQR_FFT_H_
