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

#ifndef VQR_EVAL_H_
#define VQR_EVAL_H_

#include <iosfwd>
#include <span>
#include <vector>

#include "vqr/errors.h"
#include "vqr/tensor.h"

namespace vqr {

// One scored example. `pred` is the unthresholded argmax; thresholding only
// needs it together with `top_prob`.
struct EvalRecord {
  int truth = 0;
  int pred = 0;
  double top_prob = 1.0;
};

// Argmax with ties broken towards the lowest class id.
template <typename Real>
int Argmax(const Vec<Real>& probs) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < probs.size(); ++j)
    if (probs[j] > probs[best]) best = j;
  return static_cast<int>(best);
}

template <typename Real>
EvalRecord MakeRecord(const Vec<Real>& probs, int truth) {
  const int pred = Argmax(probs);
  return {truth, pred, static_cast<double>(probs[pred])};
}

// Keeps the argmax when its probability is >= alpha, else `unknown_class`.
int ApplyThreshold(const EvalRecord& record, double alpha, int unknown_class);

template <typename Real>
int ApplyThreshold(const Vec<Real>& probs, double alpha, int unknown_class) {
  return ApplyThreshold(MakeRecord(probs, 0), alpha, unknown_class);
}

struct Rates {
  double far = 0.0;  // misclassified as a known query / all examples
  double qer = 0.0;  // misclassified / all examples

  double Accuracy() const { return 1.0 - qer; }
};

// Scores records at threshold alpha. Throws DataError on an empty list.
Rates Score(std::span<const EvalRecord> records, double alpha, int unknown_class);
double FalseAlarmRate(std::span<const EvalRecord> records, double alpha,
                      int unknown_class);
double QueryErrorRate(std::span<const EvalRecord> records, double alpha,
                      int unknown_class);

struct RocPoint {
  double alpha = 0.0;
  double far = 0.0;
  double qer = 0.0;
};

// 200 thresholds from 0 to 0.9999 inclusive, 1 - 10^(-4 i / 199), so the
// grid is dense close to 1.
std::vector<double> DefaultAlphaGrid();

// One point per alpha. `alphas` must be ascending within [0, 0.9999].
std::vector<RocPoint> RocSweep(std::span<const EvalRecord> records,
                               std::span<const double> alphas, int unknown_class);

struct AlphaChoice {
  double alpha = 0.0;
  double far = 0.0;
  double qer = 0.0;
};

class TargetUnreachableError : public NumericError {
 public:
  TargetUnreachableError(const std::string& what, AlphaChoice best)
      : NumericError(what), best_(best) {}
  // Lowest-FAR point of the sweep (smallest alpha among equals).
  const AlphaChoice& best() const { return best_; }

 private:
  AlphaChoice best_;
};

// Smallest grid alpha whose FAR is <= target_far. Throws
// TargetUnreachableError carrying the best achievable point otherwise.
AlphaChoice PickAlpha(std::span<const EvalRecord> records, double target_far,
                      std::span<const double> alphas, int unknown_class);

// Line-delimited `alpha<TAB>far<TAB>qer`.
void WriteRoc(std::ostream& out, std::span<const RocPoint> points);

}  // namespace vqr

#endif  // VQR_EVAL_H_
