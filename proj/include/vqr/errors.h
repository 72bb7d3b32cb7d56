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

#ifndef VQR_ERRORS_H_
#define VQR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace vqr {

// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorClass { kConfig, kData, kNumeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass error_class, const std::string& what)
      : std::runtime_error(what), error_class_(error_class) {}
  ErrorClass error_class() const { return error_class_; }

 private:
  ErrorClass error_class_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorClass::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what)
      : Error(ErrorClass::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorClass::kNumeric, what) {}
};

enum class WavErrorKind {
  kMalformedHeader,
  kUnsupportedFormat,
  kUnsupportedRate,
  kUnsupportedBitDepth,
  kUnsupportedChannels,
};

class WavError : public DataError {
 public:
  WavError(WavErrorKind kind, const std::string& what)
      : DataError("wav: " + what), kind_(kind) {}
  WavErrorKind kind() const { return kind_; }

 private:
  WavErrorKind kind_;
};

enum class WeightErrorKind {
  kBadMagic,
  kVersionMismatch,
  kMissingTensor,
  kShapeMismatch,
  kUnexpectedTensor,
  kBadHyperparams,
};

class WeightFormatError : public DataError {
 public:
  WeightFormatError(WeightErrorKind kind, const std::string& what)
      : DataError("weights: " + what), kind_(kind) {}
  WeightErrorKind kind() const { return kind_; }

 private:
  WeightErrorKind kind_;
};

}  // namespace vqr

#endif  // VQR_ERRORS_H_
