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

#include <gtest/gtest.h>

#include "vqr/footprint.h"

namespace vqr {
namespace {

TEST(FootprintTest, FullModelParams) {
  const Footprint fp = ComputeFootprint(PresetFor(Variant::kCrnnMaxPool));
  EXPECT_EQ(fp.Layer("C. Conv").params, 250 * 3 * 20 + 250);
  EXPECT_EQ(fp.Layer("C. Conv").params, 15250);
  EXPECT_EQ(fp.Layer("BN").params, 500);
  EXPECT_EQ(fp.Layer("GRU").params, 3377250);
  EXPECT_EQ(fp.Layer("Conv").params, 262850);
  EXPECT_EQ(fp.Layer("DNN").params, 845568);
  EXPECT_EQ(fp.Layer("Softmax").params, 154569);
  EXPECT_EQ(fp.TotalParams(), 4655987);
}

TEST(FootprintTest, FullModelMultiplies) {
  const Footprint fp = ComputeFootprint(PresetFor(Variant::kCrnnMaxPool));
  EXPECT_EQ(fp.Layer("C. Conv").multiplies, 4500000);
  EXPECT_EQ(fp.Layer("BN").multiplies, 150000);
  EXPECT_EQ(fp.Layer("GRU").multiplies, 337500000);
  EXPECT_EQ(fp.Layer("Conv").multiplies, 26250000);
  EXPECT_EQ(fp.Layer("DNN").multiplies, 8448000);
  EXPECT_EQ(fp.Layer("Softmax").multiplies, 1543680);
  EXPECT_EQ(fp.TotalMultiplies(), 378391680);
}

TEST(FootprintTest, VariantTotals) {
  const Footprint rnn = ComputeFootprint(PresetFor(Variant::kRnnMaxPool));
  EXPECT_EQ(rnn.TotalParams(), 3042737);
  EXPECT_EQ(rnn.Layer("GRU").params, 3 * (750 * 40 + 750 * 750 + 750));
  EXPECT_THROW(rnn.Layer("C. Conv"), std::out_of_range);
  const Footprint crnn = ComputeFootprint(PresetFor(Variant::kCrnn));
  EXPECT_EQ(crnn.TotalParams(), 4124337);
  EXPECT_EQ(crnn.Layer("DNN").params, 750 * 768 + 768);
  EXPECT_THROW(crnn.Layer("Conv"), std::out_of_range);
}

TEST(FootprintTest, SelectorConvParams) {
  Hyperparams hp;
  hp.conv_channels = 1;
  hp.conv_time = 1;
  hp.conv_freq = 40;
  EXPECT_EQ(ComputeFootprint(hp).Layer("C. Conv").params, 41);
}

TEST(FootprintTest, RateParameters) {
  const Hyperparams hp = PresetFor(Variant::kCrnnMaxPool);
  const Footprint still = ComputeFootprint(hp, 0, 10);
  for (const char* layer : {"C. Conv", "BN", "GRU", "Conv"})
    EXPECT_EQ(still.Layer(layer).multiplies, 0) << layer;
  EXPECT_EQ(still.Layer("DNN").multiplies, 8448000);
  // One classification per second is a tenth of the 100 ms schedule.
  EXPECT_EQ(ComputeFootprint(hp, 100, 1).Layer("DNN").multiplies, 844800);
}

TEST(FootprintTest, ScaledModelFollowsFormulas) {
  Hyperparams hp;
  hp.conv_channels = 32;
  hp.gru_units = 96;
  hp.feature_channels = 48;
  hp.hidden_units = 64;
  hp.num_classes = 13;
  const int f = 3, in = 32 * f, ctx = 96 + 48;
  const Footprint fp = ComputeFootprint(hp);
  EXPECT_EQ(fp.Layer("C. Conv").params, 32 * 60 + 32);
  EXPECT_EQ(fp.Layer("GRU").params, 3 * (96 * in + 96 * 96 + 96));
  EXPECT_EQ(fp.Layer("GRU").multiplies, 100 * 3 * (96 * in + 96 * 96));
  EXPECT_EQ(fp.Layer("BN").multiplies, 100 * f * 32 * 2);
  EXPECT_EQ(fp.Layer("DNN").params, ctx * 64 + 64);
  EXPECT_EQ(fp.Layer("Softmax").multiplies, 10 * 64 * 13);
}

TEST(FootprintTest, DisplayCount) {
  EXPECT_EQ(DisplayCount(500), "500");
  EXPECT_EQ(DisplayCount(15250), "15.2K");
  EXPECT_EQ(DisplayCount(150000), "150K");
  EXPECT_EQ(DisplayCount(262850), "263K");
  EXPECT_EQ(DisplayCount(4655987), "4.66M");
  EXPECT_EQ(DisplayCount(3042737), "3.04M");
  EXPECT_EQ(DisplayCount(378391680), "378M");
  EXPECT_EQ(DisplayCount(999), "999");
  EXPECT_EQ(DisplayCount(999999), "1.00M");
}

TEST(FootprintTest, TableListsEveryLayer) {
  const Hyperparams hp = PresetFor(Variant::kCrnnMaxPool);
  const std::string table = FormatFootprint(hp, ComputeFootprint(hp));
  for (const char* token : {"C. Conv", "BN", "GRU", "Conv", "DNN", "Softmax", "4655987", "4.66M",
                            "378M"})
    EXPECT_NE(table.find(token), std::string::npos) << token;
}

}  // namespace
}  // namespace vqr
