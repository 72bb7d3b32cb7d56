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

#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "vqr/eval.h"

namespace vqr {
namespace {

constexpr int kUnknown = 200;

// Scores straight from the definitions, without the library helpers.
struct BruteRates {
  double far, qer;
};
BruteRates Brute(const std::vector<Vec<double>>& probs, const std::vector<int>& truth,
                 double alpha) {
  int fa = 0, qe = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    int best = 0;
    for (int j = 1; j < probs[i].size(); ++j)
      if (probs[i][j] > probs[i][best]) best = j;
    const int pred = probs[i][best] < alpha ? kUnknown : best;
    if (pred != truth[i]) {
      ++qe;
      if (pred != kUnknown) ++fa;
    }
  }
  const double n = static_cast<double>(probs.size());
  return {fa / n, qe / n};
}

TEST(ThresholdTest, Rules) {
  EXPECT_EQ(ApplyThreshold(EvalRecord{0, 7, 1.0 / 201}, 0.0, kUnknown), 7);
  EXPECT_EQ(ApplyThreshold(EvalRecord{0, 7, 0.4}, 0.5, kUnknown), kUnknown);
  EXPECT_EQ(ApplyThreshold(EvalRecord{0, 7, 0.5}, 0.5, kUnknown), 7);
  Vec<double> p = Vec<double>::Constant(201, 0.6 / 200);
  p[3] = 0.4;
  p[9] = 0.4;  // tie with a later id
  p /= p.sum();
  EXPECT_EQ(Argmax(p), 3);
  EXPECT_EQ(ApplyThreshold(p, 0.0, kUnknown), 3);
  EXPECT_EQ(ApplyThreshold(p, 0.99, kUnknown), kUnknown);
}

TEST(ThresholdTest, LowAlphaIsIdentity) {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> g(0.3, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vec<double> p(201);
    for (auto& v : p) v = g(rng) + 1e-12;
    p /= p.sum();
    EXPECT_EQ(ApplyThreshold(p, 1.0 / 201.0, kUnknown), Argmax(p));
  }
}

TEST(RatesTest, HandEnumeratedExample) {
  const int q1 = 1, q2 = 2, q3 = 3, q5 = 5;
  const std::vector<EvalRecord> records = {
      {q1, q1, 0.9}, {q2, q3, 0.9}, {kUnknown, kUnknown, 0.9}, {q3, kUnknown, 0.9},
      {kUnknown, q5, 0.9}};
  const Rates r = Score(records, 0.0, kUnknown);
  EXPECT_DOUBLE_EQ(r.far, 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.qer, 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(r.Accuracy(), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(FalseAlarmRate(records, 0.0, kUnknown), 0.4);
  EXPECT_DOUBLE_EQ(QueryErrorRate(records, 0.0, kUnknown), 0.6);
}

TEST(RatesTest, EdgeCases) {
  const std::vector<EvalRecord> correct = {{1, 1, 0.5}, {kUnknown, kUnknown, 0.5}};
  EXPECT_EQ(Score(correct, 0.0, kUnknown).far, 0.0);
  EXPECT_EQ(Score(correct, 0.0, kUnknown).qer, 0.0);
  const std::vector<EvalRecord> rejected = {{1, kUnknown, 0.5}, {2, kUnknown, 0.9}};
  EXPECT_EQ(Score(rejected, 0.0, kUnknown).far, 0.0);
  EXPECT_EQ(Score(rejected, 0.0, kUnknown).qer, 1.0);
  EXPECT_THROW(Score({}, 0.0, kUnknown), DataError);
}

TEST(RocTest, GridShape) {
  const std::vector<double> grid = DefaultAlphaGrid();
  ASSERT_EQ(grid.size(), 200u);
  EXPECT_EQ(grid.front(), 0.0);
  EXPECT_EQ(grid.back(), 0.9999);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(grid[i], grid[i - 1]);
  EXPECT_THROW(RocSweep(std::vector<EvalRecord>{{0, 0, 1.0}}, std::vector<double>{0.5, 0.2},
                        kUnknown),
               ConfigError);
}

TEST(RocTest, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  std::gamma_distribution<double> g(0.2, 1.0);
  std::uniform_int_distribution<int> label(0, kUnknown);
  std::vector<Vec<double>> probs;
  std::vector<int> truth;
  std::vector<EvalRecord> records;
  for (int i = 0; i < 1000; ++i) {
    Vec<double> p(201);
    for (auto& v : p) v = g(rng) + 1e-12;
    // Make roughly half the examples confidently right.
    const int t = label(rng);
    if (i % 2 == 0) p[t] += 3.0 * p.sum();
    p /= p.sum();
    probs.push_back(p);
    truth.push_back(t);
    records.push_back(MakeRecord(p, t));
  }
  const std::vector<double> grid = DefaultAlphaGrid();
  const std::vector<RocPoint> roc = RocSweep(records, grid, kUnknown);
  ASSERT_EQ(roc.size(), grid.size());
  const Rates raw = Score(records, 0.0, kUnknown);
  EXPECT_EQ(roc.front().far, raw.far);
  EXPECT_EQ(roc.front().qer, raw.qer);
  for (std::size_t i = 0; i < roc.size(); ++i) {
    const BruteRates want = Brute(probs, truth, grid[i]);
    EXPECT_DOUBLE_EQ(roc[i].far, want.far) << "alpha " << grid[i];
    EXPECT_DOUBLE_EQ(roc[i].qer, want.qer) << "alpha " << grid[i];
    EXPECT_LE(roc[i].far, roc[i].qer);
    if (i > 0) {
      EXPECT_LE(roc[i].far, roc[i - 1].far);
    }
    EXPECT_GE(roc[i].far, roc.back().far);
  }
}

TEST(PickAlphaTest, AlreadyBelowTarget) {
  std::vector<EvalRecord> records(200, EvalRecord{1, 1, 0.3});
  records[0] = {1, 2, 0.3};  // 0.5% FAR
  const AlphaChoice c = PickAlpha(records, 0.01, DefaultAlphaGrid(), kUnknown);
  EXPECT_EQ(c.alpha, 0.0);
  EXPECT_DOUBLE_EQ(c.far, 0.005);
}

TEST(PickAlphaTest, UnreachableReportsBest) {
  // One false alarm at full confidence survives every threshold.
  std::vector<EvalRecord> records(10, EvalRecord{1, 1, 0.9});
  records[0] = {1, 2, 1.0};
  records[1] = {1, 3, 0.5};
  try {
    PickAlpha(records, 0.0, DefaultAlphaGrid(), kUnknown);
    FAIL();
  } catch (const TargetUnreachableError& e) {
    EXPECT_DOUBLE_EQ(e.best().far, 0.1);
    EXPECT_GT(e.best().alpha, 0.5);
  }
}

TEST(PickAlphaTest, CrossingBetweenGridPoints) {
  const std::vector<double> grid = DefaultAlphaGrid();
  const std::size_t k = 120;
  const double between = 0.5 * (grid[k] + grid[k + 1]);
  std::vector<EvalRecord> records(100, EvalRecord{1, 1, 1.0});
  records[0] = {1, 2, between};
  records[1] = {kUnknown, 3, between};
  const AlphaChoice c = PickAlpha(records, 0.01, grid, kUnknown);
  EXPECT_EQ(c.alpha, grid[k + 1]);
  EXPECT_EQ(c.far, 0.0);
  const std::vector<RocPoint> roc = RocSweep(records, grid, kUnknown);
  EXPECT_DOUBLE_EQ(roc[k].far, 0.02);
  EXPECT_EQ(roc[k + 1].far, 0.0);
}

TEST(RocTest, WriteFormat) {
  std::ostringstream out;
  const std::vector<RocPoint> pts = {{0.0, 0.25, 0.5}, {0.9999, 0.0, 0.75}};
  WriteRoc(out, pts);
  EXPECT_EQ(out.str(), "0\t0.25\t0.5\n0.9999\t0\t0.75\n");
}

}  // namespace
}  // namespace vqr
