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

#include "vqr/fft.h"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vqr {
namespace {

// The FFTW planner is not reentrant.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size < 2) throw std::invalid_argument("RealFft: size must be >= 2");
  std::vector<double> real(static_cast<std::size_t>(size));
  std::vector<fftw_complex> spectrum(static_cast<std::size_t>(num_bins()));
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  forward_ = fftw_plan_dft_r2c_1d(size, real.data(), spectrum.data(), flags);
  inverse_ = fftw_plan_dft_c2r_1d(size, spectrum.data(), real.data(),
                                  flags | FFTW_PRESERVE_INPUT);
  if (forward_ == nullptr || inverse_ == nullptr) {
    if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (inverse_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
    throw std::runtime_error("RealFft: FFTW planning failed");
  }
}

RealFft::~RealFft() { Release(); }

RealFft::RealFft(RealFft&& other) noexcept
    : size_(std::exchange(other.size_, 0)),
      forward_(std::exchange(other.forward_, nullptr)),
      inverse_(std::exchange(other.inverse_, nullptr)) {}

RealFft& RealFft::operator=(RealFft&& other) noexcept {
  if (this != &other) {
    Release();
    size_ = std::exchange(other.size_, 0);
    forward_ = std::exchange(other.forward_, nullptr);
    inverse_ = std::exchange(other.inverse_, nullptr);
  }
  return *this;
}

void RealFft::Release() {
  if (forward_ == nullptr && inverse_ == nullptr) return;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (inverse_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_));
  forward_ = inverse_ = nullptr;
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  if (in.size() != static_cast<std::size_t>(size_) ||
      out.size() != static_cast<std::size_t>(num_bins()))
    throw std::invalid_argument("RealFft::Forward: size mismatch");
  // Out-of-place r2c leaves the input untouched.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_),
                       const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  if (in.size() != static_cast<std::size_t>(num_bins()) ||
      out.size() != static_cast<std::size_t>(size_))
    throw std::invalid_argument("RealFft::Inverse: size mismatch");
  fftw_execute_dft_c2r(
      static_cast<fftw_plan>(inverse_),
      reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
      out.data());
}

}  // namespace vqr
