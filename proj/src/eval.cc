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

#include "vqr/eval.h"

#include <cmath>
#include <ostream>
#include <string>

namespace vqr {

int ApplyThreshold(const EvalRecord& record, double alpha, int unknown_class) {
  return record.top_prob >= alpha ? record.pred : unknown_class;
}

Rates Score(std::span<const EvalRecord> records, double alpha, int unknown_class) {
  if (records.empty()) throw DataError("cannot score an empty record list");
  std::size_t false_alarms = 0, query_errors = 0;
  for (const EvalRecord& r : records) {
    const int pred = ApplyThreshold(r, alpha, unknown_class);
    if (pred != r.truth) {
      ++query_errors;
      if (pred != unknown_class) ++false_alarms;
    }
  }
  const auto total = static_cast<double>(records.size());
  return {static_cast<double>(false_alarms) / total,
          static_cast<double>(query_errors) / total};
}

double FalseAlarmRate(std::span<const EvalRecord> records, double alpha,
                      int unknown_class) {
  return Score(records, alpha, unknown_class).far;
}

double QueryErrorRate(std::span<const EvalRecord> records, double alpha,
                      int unknown_class) {
  return Score(records, alpha, unknown_class).qer;
}

std::vector<double> DefaultAlphaGrid() {
  constexpr int kPoints = 200;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i)
    grid[i] = 1.0 - std::pow(10.0, -4.0 * i / (kPoints - 1));
  grid.front() = 0.0;
  grid.back() = 0.9999;
  return grid;
}

std::vector<RocPoint> RocSweep(std::span<const EvalRecord> records,
                               std::span<const double> alphas, int unknown_class) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] < 0.0 || alphas[i] > 0.9999 || (i > 0 && alphas[i] < alphas[i - 1]))
      throw ConfigError("alpha grid must be ascending within [0, 0.9999]");
  }
  std::vector<RocPoint> points;
  points.reserve(alphas.size());
  for (double alpha : alphas) {
    const Rates rates = Score(records, alpha, unknown_class);
    points.push_back({alpha, rates.far, rates.qer});
  }
  return points;
}

AlphaChoice PickAlpha(std::span<const EvalRecord> records, double target_far,
                      std::span<const double> alphas, int unknown_class) {
  const std::vector<RocPoint> points = RocSweep(records, alphas, unknown_class);
  if (points.empty()) throw ConfigError("alpha grid is empty");
  const RocPoint* best = &points.front();
  for (const RocPoint& p : points) {
    if (p.far <= target_far) return {p.alpha, p.far, p.qer};
    if (p.far < best->far) best = &p;
  }
  throw TargetUnreachableError(
      "no alpha reaches FAR <= " + std::to_string(target_far) +
          "; best achievable FAR " + std::to_string(best->far) + " at alpha " +
          std::to_string(best->alpha),
      {best->alpha, best->far, best->qer});
}

void WriteRoc(std::ostream& out, std::span<const RocPoint> points) {
  const auto old_precision = out.precision(10);
  for (const RocPoint& p : points)
    out << p.alpha << '\t' << p.far << '\t' << p.qer << '\n';
  out.precision(old_precision);
}

}  // namespace vqr
