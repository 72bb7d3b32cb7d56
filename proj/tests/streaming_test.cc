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

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "vqr/errors.h"
#include "vqr/streaming.h"

namespace vqr {
namespace {

Hyperparams Small(Variant v = Variant::kCrnnMaxPool) {
  Hyperparams hp = PresetFor(v);
  hp.conv_channels = 6;
  hp.conv_freq = 16;
  hp.gru_units = 24;
  hp.feature_channels = 10;
  hp.hidden_units = 16;
  hp.num_classes = 7;
  return hp;
}

Waveform RandomClip(std::size_t samples, std::mt19937_64& rng) {
  Waveform w = testing::WhiteNoise(samples, 0.05, rng);
  const Waveform tone = testing::Tone(200.0 + static_cast<double>(rng() % 3000), samples, 0.2);
  for (std::size_t i = 0; i < samples; ++i) w.samples[i] += tone.samples[i];
  return w;
}

struct StreamRun {
  StreamState state;
  std::vector<Prediction> predictions;
};

StreamRun RunChunked(const StreamingRecognizer& rec, const Waveform& clip,
                     const std::vector<std::size_t>& chunks) {
  StreamRun run{rec.Init(), {}};
  std::span<const float> rest(clip.samples);
  std::size_t c = 0;
  while (!rest.empty()) {
    const std::size_t n = std::min(rest.size(), chunks[c++ % chunks.size()]);
    auto out = rec.Push(run.state, rest.first(n));
    run.predictions.insert(run.predictions.end(), out.begin(), out.end());
    rest = rest.subspan(n);
  }
  return run;
}

bool SameState(const StreamState& a, const StreamState& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.size() == y.size() &&
           std::memcmp(x.data(), y.data(), sizeof(*x.data()) * x.size()) == 0;
  };
  return a.pcen == b.pcen && same(a.conv_history, b.conv_history) &&
         same(a.gru_hidden, b.gru_hidden) && same(a.max_state, b.max_state) &&
         a.frames_seen == b.frames_seen && a.samples_seen == b.samples_seen &&
         a.sample_buffer == b.sample_buffer;
}

TEST(StreamStateTest, CoreSizeFullModel) {
  const Hyperparams hp = PresetFor(Variant::kCrnnMaxPool);
  const StreamState s = InitStream(hp);
  // Two history frames of 40, 750 hidden, 350 pooled, 4 bytes each.
  EXPECT_EQ(StateSizeBytes(s, hp), 4u * (2 * 40 + 750 + 350));
  EXPECT_EQ(StateSizeBytes(s, hp), 4720u);
}

TEST(StreamStateTest, CoreSizeFollowsHyperparams) {
  Hyperparams hp = PresetFor(Variant::kCrnnMaxPool);
  hp.gru_units = 1;
  hp.feature_channels = 1;
  EXPECT_EQ(StateSizeBytes(InitStream(hp), hp), 4u * (2 * 40 + 1 + 1));
  const Hyperparams rnn = PresetFor(Variant::kRnnMaxPool);
  EXPECT_EQ(StateSizeBytes(InitStream(rnn), rnn), 4u * (rnn.gru_units + rnn.feature_channels));
  const Hyperparams crnn = PresetFor(Variant::kCrnn);
  EXPECT_EQ(StateSizeBytes(InitStream(crnn), crnn), 4u * (2 * 40 + crnn.gru_units));
}

TEST(StreamStateTest, AuxiliaryBytes) {
  const StreamState s = InitStream(PresetFor(Variant::kCrnnMaxPool));
  EXPECT_EQ(AuxiliaryStateBytes(s, FrameConfig{}), 4u * 40 + 4u * 480);
}

TEST(StreamStateTest, InitIsCanonical) {
  const Hyperparams hp = Small();
  const StreamState a = InitStream(hp), b = InitStream(hp);
  EXPECT_TRUE(SameState(a, b));
  EXPECT_EQ(a.conv_history.cwiseAbs().maxCoeff(), 0.0f);
  EXPECT_EQ(a.gru_hidden.cwiseAbs().maxCoeff(), 0.0f);
  EXPECT_EQ(a.frames_seen, 0);
}

TEST(StreamStateTest, SizeConstantOverLongStream) {
  const Hyperparams hp = Small();
  const Weights<float> w = Weights<float>::Random(hp, 1);
  const PcenFrontend frontend;
  const StreamingRecognizer rec(w, frontend);
  std::mt19937_64 rng(2);
  StreamState s = rec.Init();
  const std::size_t initial = StateSizeBytes(s, hp);
  const Waveform chunk = RandomClip(16000, rng);
  for (int second = 0; second < 100; ++second) {
    rec.Push(s, chunk.samples);
    ASSERT_EQ(StateSizeBytes(s, hp), initial);
    ASSERT_LT(s.sample_buffer.size(), 480u);
    ASSERT_EQ(s.conv_history.rows(), hp.conv_time - 1);
    ASSERT_EQ(s.max_state.size(), hp.feature_channels);
  }
  EXPECT_EQ(s.frames_seen, NumFrames(1600000, FrameConfig{}));
}

TEST(StreamingTest, ProbabilitiesBeforeFirstFrameThrow) {
  const Weights<float> w = Weights<float>::Random(Small(), 3);
  const PcenFrontend frontend;
  const StreamingRecognizer rec(w, frontend);
  StreamState s = rec.Init();
  EXPECT_THROW(rec.Probabilities(s), std::logic_error);
  const std::vector<float> short_input(479, 0.1f);
  rec.Push(s, short_input);
  EXPECT_THROW(rec.Probabilities(s), std::logic_error);
  const float one = 0.1f;
  rec.Push(s, std::span<const float>(&one, 1));
  EXPECT_NO_THROW(rec.Probabilities(s));
}

TEST(StreamingTest, RejectsBadInterval) {
  const Weights<float> w = Weights<float>::Random(Small(), 3);
  const PcenFrontend frontend;
  EXPECT_THROW(StreamingRecognizer(w, frontend, {.interval_ms = 0}), ConfigError);
}

class StreamVsFullTest : public ::testing::TestWithParam<Variant> {};

TEST_P(StreamVsFullTest, MatchesOfflineForward) {
  const Hyperparams hp = Small(GetParam());
  const Weights<float> w = Weights<float>::Random(hp, 4);
  const PcenFrontend frontend;
  const StreamingRecognizer rec(w, frontend);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(480, 40000);
  for (int trial = 0; trial < 20; ++trial) {
    const Waveform clip = RandomClip(len(rng), rng);
    const StreamRun run = RunChunked(rec, clip, {clip.size()});
    const Vec<float> full = ForwardFull(w, frontend.Compute(clip));
    const Vec<float> streamed = rec.Probabilities(run.state);
    EXPECT_LE((full - streamed).cwiseAbs().maxCoeff(), 1e-5f) << "clip " << trial;
    EXPECT_EQ(run.state.frames_seen, NumFrames(clip.size(), FrameConfig{}));
  }
}

INSTANTIATE_TEST_SUITE_P(AllVariants, StreamVsFullTest,
                         ::testing::Values(Variant::kCrnnMaxPool, Variant::kCrnn,
                                           Variant::kRnnMaxPool));

TEST(StreamingTest, ChunkingDoesNotMatter) {
  const Weights<float> w = Weights<float>::Random(Small(), 6);
  const PcenFrontend frontend;
  const StreamingRecognizer rec(w, frontend);
  std::mt19937_64 rng(7);
  const Waveform clip = RandomClip(23456, rng);
  const StreamRun whole = RunChunked(rec, clip, {clip.size()});
  std::vector<std::size_t> random_chunks;
  for (int i = 0; i < 50; ++i) random_chunks.push_back(1 + rng() % 900);
  for (const auto& chunks : std::vector<std::vector<std::size_t>>{
           {1}, {160}, {479, 481}, {1600}, random_chunks}) {
    const StreamRun run = RunChunked(rec, clip, chunks);
    EXPECT_TRUE(SameState(run.state, whole.state)) << "first chunk " << chunks[0];
    ASSERT_EQ(run.predictions.size(), whole.predictions.size());
    for (std::size_t i = 0; i < run.predictions.size(); ++i) {
      EXPECT_EQ(run.predictions[i].at_ms, whole.predictions[i].at_ms);
      EXPECT_EQ(run.predictions[i].label, whole.predictions[i].label);
      EXPECT_TRUE((run.predictions[i].probs.array() == whole.predictions[i].probs.array()).all());
    }
  }
}

TEST(StreamingTest, PredictionSchedule) {
  const Weights<float> w = Weights<float>::Random(Small(), 8);
  const PcenFrontend frontend;
  std::mt19937_64 rng(9);
  const Waveform second = RandomClip(16000, rng);
  {
    const StreamingRecognizer rec(w, frontend);
    const StreamRun run = RunChunked(rec, second, {777});
    ASSERT_EQ(run.predictions.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(run.predictions[i].at_ms, 100 * (i + 1));
    // The last prediction reflects the whole second.
    const Vec<float> last = rec.Probabilities(run.state);
    EXPECT_TRUE((run.predictions.back().probs.array() == last.array()).all());
  }
  {
    const StreamingRecognizer rec(w, frontend, {.interval_ms = 250});
    const StreamRun run = RunChunked(rec, second, {16000});
    ASSERT_EQ(run.predictions.size(), 4u);
    for (const auto& p : run.predictions) EXPECT_EQ(p.at_ms % 250, 0);
  }
  {
    // An interval shorter than one window: nothing before the first frame.
    const StreamingRecognizer rec(w, frontend, {.interval_ms = 10});
    const StreamRun run = RunChunked(rec, second, {16000});
    ASSERT_FALSE(run.predictions.empty());
    EXPECT_EQ(run.predictions.front().at_ms, 30);
    EXPECT_EQ(run.predictions.size(), 98u);
  }
}

TEST(StreamingTest, PredictionFields) {
  const Hyperparams hp = Small();
  const Weights<float> w = Weights<float>::Random(hp, 10);
  const PcenFrontend frontend;
  std::mt19937_64 rng(11);
  const Waveform clip = RandomClip(8000, rng);
  const StreamingRecognizer open(w, frontend, {.alpha = 0.0});
  const StreamingRecognizer closed(w, frontend, {.alpha = 1.01});
  const StreamRun a = RunChunked(open, clip, {8000});
  const StreamRun b = RunChunked(closed, clip, {8000});
  ASSERT_EQ(a.predictions.size(), b.predictions.size());
  for (std::size_t i = 0; i < a.predictions.size(); ++i) {
    const Prediction& p = a.predictions[i];
    Eigen::Index arg;
    const float top = p.probs.maxCoeff(&arg);
    EXPECT_EQ(p.top_prob, top);
    EXPECT_EQ(p.label, static_cast<int>(arg));
    EXPECT_NEAR(p.probs.sum(), 1.0f, 1e-5f);
    EXPECT_EQ(b.predictions[i].label, hp.UnknownClass());
  }
}

}  // namespace
}  // namespace vqr
