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

// Drives the built command-line tool end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"
#include "vqr/wav.h"

namespace vqr {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out, err;
};

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> Fields(const std::string& line) {
  std::vector<std::string> f;
  std::istringstream in(line);
  for (std::string x; std::getline(in, x, '\t');) f.push_back(x);
  return f;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = std::make_unique<testing::TempDir>("cli");
    const Result synth = Run("synth --out " + Path("corpus") +
                             " --num-queries 2 --examples-per-query 10 --num-unknown 10"
                             " --clip-seconds 0.5 --seed 3");
    ASSERT_EQ(synth.code, 0) << synth.err;
    const Result train = Run("train --manifest " + Path("corpus/manifest.tsv") + Model() +
                             " --epochs 2 --batch-size 8 --seed 1 --run-dir " + Path("train"));
    ASSERT_EQ(train.code, 0) << train.err;
  }
  static void TearDownTestSuite() { dir_.reset(); }

  static std::string Path(const std::string& rel) { return (dir_->path() / rel).string(); }
  static std::string Model() {
    return " --num-queries 2 --conv-channels 4 --gru-units 8 --feature-channels 4"
           " --hidden-units 8";
  }
  static std::string Weights() { return Path("train/final.vqrw"); }
  static std::string FirstClip() {
    const std::string rel = Fields(Lines(Slurp(Path("corpus/manifest.tsv")))[0])[0];
    return fs::path(rel).is_absolute() ? rel : Path("corpus/" + rel);
  }

  static Result Run(const std::string& args, const std::string& stdin_path = "") {
    static int counter = 0;
    const std::string base = (dir_->path() / ("io" + std::to_string(counter++))).string();
    std::string cmd = std::string(VQR_CLI_PATH) + " " + args + " >" + base + ".out 2>" + base + ".err";
    if (!stdin_path.empty()) cmd += " <" + stdin_path;
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(base + ".out");
    r.err = Slurp(base + ".err");
    return r;
  }

  static std::unique_ptr<testing::TempDir> dir_;
};

std::unique_ptr<testing::TempDir> CliTest::dir_;

TEST_F(CliTest, FootprintTable) {
  const Result r = Run("footprint");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("4655987"), std::string::npos);
  EXPECT_NE(r.out.find("4.66M"), std::string::npos);
  const Result rnn = Run("footprint --variant rnn-750m");
  ASSERT_EQ(rnn.code, 0);
  EXPECT_NE(rnn.out.find("3042737"), std::string::npos);
  EXPECT_NE(rnn.out.find("3.04M"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Run("").code, 2);
  EXPECT_EQ(Run("no-such-command").code, 2);
  EXPECT_EQ(Run("footprint --variant lstm").code, 2);
  EXPECT_EQ(Run("footprint --gru-units 0").code, 2);
  EXPECT_EQ(Run("eval --weights " + Weights() + " --manifest " + Path("missing.tsv")).code, 3);
  EXPECT_EQ(Run("eval --weights " + Path("missing.vqrw") + " --manifest " +
                Path("corpus/manifest.tsv")).code, 3);
  EXPECT_EQ(Run("eval --weights " + Weights() + " --num-queries 5 --manifest " +
                Path("corpus/manifest.tsv")).code, 2);
  EXPECT_EQ(Run("eval --weights " + Weights() + " --variant rnn-750m --manifest " +
                Path("corpus/manifest.tsv")).code, 2);
  EXPECT_EQ(Run("eval --weights " + Weights() + " --split bogus --alpha 0 --manifest " +
                Path("corpus/manifest.tsv") + " --run-dir " + Path("bogus")).code, 2);
  EXPECT_EQ(Run("footprint --help").code, 0);
}

TEST_F(CliTest, EmptySplitIsDataError) {
  std::ofstream(Path("empty.tsv")) << "# nothing\n";
  const Result r = Run("eval --weights " + Weights() + " --alpha 0 --split all --manifest " +
                       Path("empty.tsv") + " --run-dir " + Path("empty"));
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("empty"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainArtifacts) {
  for (const char* f : {"config.ini", "metrics.tsv", "final.vqrw", "train.tsv", "validation.tsv",
                        "test.tsv", "checkpoints/epoch_01.vqrw", "checkpoints/epoch_02.vqrw"})
    EXPECT_TRUE(fs::exists(Path("train") + "/" + f)) << f;
  const auto metrics = Lines(Slurp(Path("train/metrics.tsv")));
  ASSERT_EQ(metrics.size(), 3u);
  EXPECT_EQ(metrics[0], "epoch\tlr\ttrain_loss\tval_far\tval_qer");
  EXPECT_EQ(Lines(Slurp(Path("train/train.tsv"))).size(), 24u);
  EXPECT_EQ(Lines(Slurp(Path("train/test.tsv"))).size(), 3u);
  EXPECT_EQ(Slurp(Path("train/checkpoints/epoch_02.vqrw")), Slurp(Weights()));
}

TEST_F(CliTest, TrainIsDeterministic) {
  const Result r = Run("train --manifest " + Path("corpus/manifest.tsv") + Model() +
                       " --epochs 2 --batch-size 8 --seed 1 --run-dir " + Path("train2"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Slurp(Path("train2/final.vqrw")), Slurp(Weights()));
  EXPECT_EQ(Slurp(Path("train2/metrics.tsv")), Slurp(Path("train/metrics.tsv")));
}

TEST_F(CliTest, ConfigFileAndPrecedence) {
  std::ofstream(Path("eval.ini")) << "[eval]\nsplit=validation\nalpha=0.5\n";
  const std::string base = "eval --weights " + Weights() + " --manifest " +
                           Path("corpus/manifest.tsv") + " --config " + Path("eval.ini");
  const Result from_file = Run(base + " --run-dir " + Path("cfg1"));
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out.rfind("split validation alpha 0.5 ", 0), 0u) << from_file.out;
  const Result overridden = Run(base + " --split test --run-dir " + Path("cfg2"));
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_EQ(overridden.out.rfind("split test alpha 0.5 ", 0), 0u) << overridden.out;

  // The echoed configuration reproduces the run.
  const Result replay = Run("--config " + Path("cfg2/config.ini") + " eval --run-dir " +
                            Path("cfg3"));
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(replay.out, overridden.out);
  EXPECT_EQ(Slurp(Path("cfg3/records.tsv")), Slurp(Path("cfg2/records.tsv")));
  auto without_run_dir = [](const std::string& text) {
    std::string out;
    for (const auto& line : Lines(text))
      if (line.rfind("run-dir=", 0) != 0) out += line + "\n";
    return out;
  };
  EXPECT_EQ(without_run_dir(Slurp(Path("cfg3/config.ini"))),
            without_run_dir(Slurp(Path("cfg2/config.ini"))));
}

TEST_F(CliTest, EvalOutputs) {
  const Result r = Run("eval --weights " + Weights() + " --manifest " +
                       Path("corpus/manifest.tsv") + " --alpha 0 --split all --run-dir " +
                       Path("evalall"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto records = Lines(Slurp(Path("evalall/records.tsv")));
  ASSERT_EQ(records.size(), 31u);
  EXPECT_EQ(records[0], "path\ttruth\tpred\ttop_prob");
  const auto roc = Lines(Slurp(Path("evalall/roc.tsv")));
  EXPECT_GT(roc.size(), 100u);
  const auto summary = Lines(Slurp(Path("evalall/summary.tsv")));
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(Fields(summary[1])[0], "all");
  EXPECT_EQ(Fields(summary[1]).back(), "30");

  const Result roc_cmd = Run("roc --weights " + Weights() + " --manifest " +
                             Path("corpus/manifest.tsv") + " --split all");
  ASSERT_EQ(roc_cmd.code, 0) << roc_cmd.err;
  EXPECT_EQ(Lines(roc_cmd.out), roc);
}

TEST_F(CliTest, StreamMatchesEvalAndIgnoresChunking) {
  const Result ev = Run("eval --weights " + Weights() + " --manifest " +
                        Path("corpus/manifest.tsv") + " --alpha 0 --split all --run-dir " +
                        Path("evalstream"));
  ASSERT_EQ(ev.code, 0) << ev.err;
  const auto records = Lines(Slurp(Path("evalstream/records.tsv")));
  for (std::size_t i = 1; i < records.size(); i += 7) {
    const auto rec = Fields(records[i]);
    const Result a = Run("stream --weights " + Weights() + " " + rec[0]);
    const Result b = Run("stream --weights " + Weights() + " --chunk 1 " + rec[0]);
    const Result c = Run("stream --weights " + Weights() + " --chunk 4801 " + rec[0]);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    const auto lines = Lines(a.out);
    ASSERT_EQ(lines.size(), 5u);  // 0.5 s at one prediction per 100 ms
    const auto last = Fields(lines.back());
    EXPECT_EQ(last[0], "500");
    EXPECT_EQ(last[1], rec[2]) << rec[0];
    EXPECT_NEAR(std::stod(last[2]), std::stod(rec[3]), 2e-6) << rec[0];
  }
}

TEST_F(CliTest, StreamFromRawPcm) {
  const std::string clip = FirstClip();
  const Waveform w = ReadWavFile(clip);
  const std::vector<std::int16_t> pcm = ToPcm16(w);
  std::ofstream(Path("raw.pcm"), std::ios::binary)
      .write(reinterpret_cast<const char*>(pcm.data()),
             static_cast<std::streamsize>(pcm.size() * 2));
  const Result from_wav = Run("stream --weights " + Weights() + " " + clip);
  const Result from_pcm = Run("stream --weights " + Weights() + " -", Path("raw.pcm"));
  ASSERT_EQ(from_pcm.code, 0) << from_pcm.err;
  EXPECT_EQ(from_pcm.out, from_wav.out);
}

TEST_F(CliTest, StreamProfile) {
  const Result r = Run("stream --profile --weights " + Weights() + " " + FirstClip());
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, std::string> kv;
  for (const auto& line : Lines(r.err)) {
    const auto f = Fields(line);
    if (f.size() == 2) kv[f[0]] = f[1];
  }
  for (const char* key : {"hops", "hop_us_mean", "hop_us_p50", "hop_us_p99",
                          "hop_us_slope_per_hop", "real_time_factor", "state_core_bytes",
                          "state_aux_bytes"})
    EXPECT_TRUE(kv.count(key)) << key;
  EXPECT_EQ(kv["hops"], "48");
  EXPECT_EQ(kv["state_core_bytes"], std::to_string(4 * (2 * 40 + 8 + 4)));
}

TEST_F(CliTest, AugmentPreview) {
  const std::string clip = Path("tone.wav");
  WriteWavFile(clip, testing::Tone(440.0, 8000));
  const Result r = Run("augment-preview --count 2 --seed 4 --run-dir " + Path("aug") + " " + clip);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"tone_orig.wav", "tone_aug0.wav", "tone_aug1.wav"})
    EXPECT_TRUE(fs::exists(Path("aug") + "/" + f)) << f;
  EXPECT_EQ(ReadWavFile(Path("aug/tone_orig.wav")).samples.size(), 8000u);
  const Result again =
      Run("augment-preview --count 2 --seed 4 --run-dir " + Path("aug2") + " " + clip);
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(Slurp(Path("aug/tone_aug1.wav")), Slurp(Path("aug2/tone_aug1.wav")));
}

}  // namespace
}  // namespace vqr
