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

#ifndef VQR_TENSOR_H_
#define VQR_TENSOR_H_

#include <Eigen/Core>

namespace vqr {

template <typename Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Row-major so that a tensor's data() is its on-disk layout.
template <typename Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// T x 40 PCEN features, one row per 10 ms hop.
using PcenMatrix = Mat<float>;

}  // namespace vqr

#endif  // VQR_TENSOR_H_
