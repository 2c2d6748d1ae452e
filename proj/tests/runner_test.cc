// tests/runner_test.cc

// Copyright 2026  The avsrbench Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "avsr/runner/checkpoint.h"
#include "avsr/runner/config.h"
#include "avsr/runner/evaluate.h"
#include "avsr/runner/experiment.h"
#include "avsr/runner/metrics.h"
#include "avsr/runner/trainer.h"
#include "oracles.h"

namespace avsr {
namespace {

namespace fs = std::filesystem;

std::string TempPath(const std::string& name) {
  return (fs::temp_directory_path() / ("avsr_runner_test_" + name)).string();
}

TEST(LrScheduleTest, WarmupPeakAndCosineDecay) {
  EXPECT_DOUBLE_EQ(LrSchedule(0, 100, 10, 1e-3), 0.0);
  EXPECT_NEAR(LrSchedule(5, 100, 10, 1e-3), 5e-4, 1e-15);
  EXPECT_NEAR(LrSchedule(10, 100, 10, 1e-3), 1e-3, 1e-15);
  EXPECT_NEAR(LrSchedule(55, 100, 10, 1e-3), 5e-4, 1e-12);
  EXPECT_NEAR(LrSchedule(100, 100, 10, 1e-3), 0.0, 1e-15);
  for (int s = 10; s < 100; ++s) {
    EXPECT_GE(LrSchedule(s, 100, 10, 1.0), LrSchedule(s + 1, 100, 10, 1.0));
  }
}

TEST(LrScheduleTest, RejectsBadArguments) {
  EXPECT_THROW(LrSchedule(0, 10, 10, 1.0), Error);
  EXPECT_THROW(LrSchedule(11, 10, 2, 1.0), Error);
  EXPECT_THROW(LrSchedule(-1, 10, 2, 1.0), Error);
}

SampleRecord RecordWithFrames(const std::string& id, int frames) {
  SampleRecord r;
  r.id = id;
  r.duration_s = frames / 25.0;
  r.transcript = "x";
  return r;
}

TEST(MakeBatchesTest, PacksUnderTheCap) {
  Manifest m;
  m.records = {RecordWithFrames("a", 1000), RecordWithFrames("b", 900)};
  auto batches = MakeBatches(m, 1800);
  ASSERT_EQ(batches.size(), 2u);
  m.records = {RecordWithFrames("a", 800), RecordWithFrames("b", 900)};
  batches = MakeBatches(m, 1800);
  ASSERT_EQ(batches.size(), 1u);
  EXPECT_EQ(batches[0].frames, 1700);
}

TEST(MakeBatchesTest, OversizeRecordIsNamed) {
  Manifest m;
  m.records = {RecordWithFrames("ok", 10), RecordWithFrames("too-long", 2000)};
  try {
    MakeBatches(m, 1800);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("too-long"), std::string::npos);
  }
}

TEST(MakeBatchesTest, EveryRecordOnceAndCapRespected) {
  Rng rng(3);
  Manifest m;
  for (int i = 0; i < 500; ++i) {
    m.records.push_back(RecordWithFrames("r" + std::to_string(i), UniformInt(rng, 1, 300)));
  }
  const auto batches = MakeBatches(m, 700);
  std::vector<int> seen(m.size(), 0);
  for (const auto& b : batches) {
    int frames = 0;
    for (auto i : b.indices) {
      ++seen[i];
      frames += m.records[i].NumFrames();
    }
    EXPECT_EQ(frames, b.frames);
    EXPECT_LE(frames, 700);
  }
  for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(WerTest, HandCases) {
  EXPECT_DOUBLE_EQ(Wer({"a b c d"}, {"a x c"}), 0.5);
  EXPECT_DOUBLE_EQ(Wer({"a"}, {"a b"}), 1.0);
  EXPECT_DOUBLE_EQ(Wer({"a b"}, {"a b"}), 0.0);
  EXPECT_DOUBLE_EQ(Wer({"a b"}, {""}), 1.0);
  const WerStats s = CorpusWer({"a b c d", "e f"}, {"a x c", "e f"});
  EXPECT_EQ(s.edits, 2);
  EXPECT_EQ(s.ref_words, 6);
}

TEST(WerTest, Errors) {
  EXPECT_THROW(CorpusWer({"a"}, {}), Error);
  EXPECT_THROW(CorpusWer({""}, {"a"}), Error);
}

std::vector<std::string> RandomCorpus(Rng& rng, int n, int min_words) {
  const char* words[] = {"a", "b", "c", "d", "e"};
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    std::string s;
    const int len = UniformInt(rng, min_words, 8);
    for (int k = 0; k < len; ++k) {
      if (k) s += ' ';
      s += words[UniformInt(rng, 0, 4)];
    }
    out.push_back(s);
  }
  return out;
}

TEST(WerTest, MatchesQuadraticOracleOnRandomCorpora) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = UniformInt(rng, 1, 10);
    const auto refs = RandomCorpus(rng, n, 1);
    const auto hyps = RandomCorpus(rng, n, 0);
    EXPECT_EQ(Wer(refs, hyps), testing::OracleWer(refs, hyps)) << "trial " << trial;
  }
}

TEST(WerTest, InvariantUnderUtterancePermutation) {
  Rng rng(12);
  auto refs = RandomCorpus(rng, 20, 1);
  auto hyps = RandomCorpus(rng, 20, 0);
  const double w = Wer(refs, hyps);
  std::vector<std::size_t> perm(refs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::string> r2, h2;
  for (auto i : perm) {
    r2.push_back(refs[i]);
    h2.push_back(hyps[i]);
  }
  EXPECT_EQ(Wer(r2, h2), w);
}

TEST(ConfigTest, ParsesCommentsAndReportsErrors) {
  const Config c = Config::Parse("# comment\n\n a = 1 \nb=x y\n");
  EXPECT_EQ(c.GetInt("a", 0), 1);
  EXPECT_EQ(c.GetString("b", ""), "x y");
  EXPECT_THROW(Config::Parse("a=1\na=2\n"), Error);
  EXPECT_THROW(Config::Parse("a=1\nnoequals\n"), Error);
  EXPECT_THROW(c.GetDouble("b", 0), Error);
}

TEST(ConfigTest, UnusedKeysAreReported) {
  const Config c = Config::Parse("model.dim=8\nmodel.dimm=9\n");
  ModelConfig m = ReadModelConfig(c);
  EXPECT_EQ(m.encoder.dim, 8);
  EXPECT_THROW(c.CheckAllUsed("test"), Error);
  ASSERT_EQ(c.UnusedKeys().size(), 1u);
  EXPECT_EQ(c.UnusedKeys()[0], "model.dimm");
}

TEST(ConfigTest, DoublesRoundTripExactly) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(Uniform01(rng) - 0.5, UniformInt(rng, -60, 60));
    EXPECT_EQ(ParseDouble(FormatDouble(v), "v"), v);
  }
  EXPECT_EQ(ParseDouble(FormatDouble(kCleanSnr), "v"), kCleanSnr);
  EXPECT_EQ(ParseDouble(FormatDouble(-kCleanSnr), "v"), -kCleanSnr);
}

TEST(ConfigTest, ExperimentRoundTrip) {
  ExperimentConfig e;
  e.corpus.labelled_hours = 0.25;
  e.model = testing::TinyModelConfig(Modality::kFused, 40, 7);
  e.train.epochs = 3;
  e.train.time_mask.fill = MaskFill::kZeros;
  e.decode.beam = 4;
  e.fractions = {0.0, 0.25};
  e.eval_noises = {NoiseKind::kBabble};
  e.snr_grid = {5.0, kCleanSnr};
  e.seed = 99;
  const Config c = Config::Parse(ExperimentToConfig(e).ToString());
  const ExperimentConfig r = ExperimentFromConfig(c);
  EXPECT_EQ(ExperimentToConfig(r).ToString(), ExperimentToConfig(e).ToString());
  EXPECT_THROW(ExperimentFromConfig(Config::Parse("experiment.bogus=1\n")), Error);
}

#ifdef AVSR_CONFIG_DIR
TEST(ConfigTest, ShippedConfigsParse) {
  int n = 0;
  for (const auto& e : fs::recursive_directory_iterator(AVSR_CONFIG_DIR)) {
    if (e.path().extension() != ".conf") continue;
    EXPECT_NO_THROW(ExperimentFromConfig(Config::Load(e.path().string()))) << e.path();
    ++n;
  }
  EXPECT_GE(n, 6);
}

TEST(ConfigTest, FullScalePresetEchoesTrainingRecipe) {
  const ExperimentConfig e =
      ExperimentFromConfig(Config::Load(std::string(AVSR_CONFIG_DIR) + "/full.conf"));
  const Config echo = ExperimentToConfig(e);
  EXPECT_EQ(echo.GetInt("train.epochs", 0), 75);
  EXPECT_EQ(echo.GetInt("train.warmup_epochs", 0), 5);
  EXPECT_EQ(echo.GetDouble("train.peak_lr", 0), 1e-3);
  EXPECT_EQ(echo.GetInt("train.max_frames_per_batch", 0), 1800);
  EXPECT_EQ(e.model.encoder.dim, 768);
  EXPECT_EQ(e.model.encoder.layers, 12);
  EXPECT_EQ(e.model.decoder.layers, 6);
  EXPECT_EQ(e.vocab_size, 5000);
  RunReport r;
  r.config = echo;
  EXPECT_NE(r.Markdown().find("train.epochs = 75"), std::string::npos);
}
#endif

Vocabulary SmallVocab() {
  return TrainVocabulary(std::vector<std::string>{"ab ba abc", "cab bca"}, 14);
}

TEST(CheckpointTest, RoundTripRestoresIdenticalModel) {
  const Vocabulary vocab = SmallVocab();
  ModelConfig cfg = testing::TinyModelConfig(Modality::kFused, vocab.size(), 21);
  AvsrModel model(cfg);
  Config meta;
  meta.Set("meta.note", std::string("hello"));
  const std::string path = TempPath("roundtrip.ckpt");
  SaveCheckpoint(MakeCheckpoint(model, vocab, meta), path);
  const Checkpoint loaded = LoadCheckpoint(path);
  EXPECT_EQ(loaded.config.GetString("meta.note", ""), "hello");
  EXPECT_EQ(loaded.vocab.size(), vocab.size());
  auto restored = RestoreModel(loaded);
  const auto a = model.params().All();
  const auto b = restored->params().All();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i]->name, b[i]->name);
    EXPECT_EQ(a[i]->value.Vec(), b[i]->value.Vec()) << a[i]->name;
  }
  Rng rng(1);
  const Waveform audio = testing::RandomAudio(kSamplesPerFrame * 12, rng);
  const VideoClip video = testing::RandomVideo(12, 32, rng);
  const auto ha = model.Decode(&audio, &video, DecodeConfig{.beam = 2, .max_len = 4})[0];
  const auto hb = restored->Decode(&audio, &video, DecodeConfig{.beam = 2, .max_len = 4})[0];
  EXPECT_EQ(ha.ids, hb.ids);
  fs::remove(path);
}

TEST(CheckpointTest, RejectsCorruptFilesAndMismatches) {
  const Vocabulary vocab = SmallVocab();
  AvsrModel model(testing::TinyModelConfig(Modality::kAudio, vocab.size(), 2));
  const std::string path = TempPath("corrupt.ckpt");
  SaveCheckpoint(MakeCheckpoint(model, vocab), path);
  const auto full = fs::file_size(path);
  fs::resize_file(path, full / 2);
  EXPECT_THROW(LoadCheckpoint(path), Error);
  {
    std::ofstream os(path, std::ios::binary);
    os << "NOTACKPT";
  }
  EXPECT_THROW(LoadCheckpoint(path), Error);
  EXPECT_THROW(LoadCheckpoint(TempPath("missing.ckpt")), Error);

  Checkpoint c = MakeCheckpoint(model, vocab);
  c.arrays.begin()->second = Tensor({1});
  EXPECT_THROW(RestoreModel(c), Error);
  c = MakeCheckpoint(model, vocab);
  c.arrays["extra"] = Tensor({1});
  EXPECT_THROW(RestoreModel(c), Error);
  c = MakeCheckpoint(model, vocab);
  c.arrays.erase(c.arrays.begin());
  EXPECT_THROW(RestoreModel(c), Error);
  fs::remove(path);
}

TEST(AdamWTest, MatchesHandFormula) {
  nn::ParamStore store(0);
  ad::Parameter* w = store.AddConstant("w", {2, 2}, 0.5);
  ad::Parameter* b = store.AddConstant("b", {2}, -0.25);
  TrainConfig cfg;
  cfg.beta1 = 0.9;
  cfg.beta2 = 0.98;
  cfg.adam_eps = 1e-9;
  cfg.weight_decay = 0.1;
  AdamW opt(store, cfg);
  const std::vector<std::vector<double>> grads = {{0.1, -0.2, 0.3, 0.0}, {1.0, -1.0, 0.5, 2.0}};
  double m = 0, v = 0, wv = 0.5, bv = -0.25, mb = 0, vb = 0;
  for (int step = 1; step <= 2; ++step) {
    const double g = grads[step - 1][0];
    store.ZeroGrad();
    w->grad = Tensor({2, 2});
    b->grad = Tensor({2});
    for (int k = 0; k < 4; ++k) w->grad.Vec()[k] = grads[step - 1][k];
    b->grad.Vec()[0] = g;
    b->grad.Vec()[1] = g;
    const double lr = 0.01;
    opt.Step(lr);
    m = 0.9 * m + 0.1 * g;
    v = 0.98 * v + 0.02 * g * g;
    const double mh = m / (1 - std::pow(0.9, step)), vh = v / (1 - std::pow(0.98, step));
    wv -= lr * (mh / (std::sqrt(vh) + 1e-9) + 0.1 * wv);
    mb = m;
    vb = v;
    bv -= lr * ((mb / (1 - std::pow(0.9, step))) / (std::sqrt(vb / (1 - std::pow(0.98, step))) + 1e-9));
    EXPECT_NEAR(w->value.Vec()[0], wv, 1e-15);
    EXPECT_NEAR(b->value.Vec()[0], bv, 1e-15);
  }
  EXPECT_EQ(opt.steps(), 2);
}

CorpusConfig TinyCorpus() {
  CorpusConfig c;
  c.labelled_hours = 0.02;
  c.unlabelled_hours = 0.01;
  c.other_language_hours = 0.005;
  c.eval_records = 8;
  c.vocab_size_words = 8;
  c.frame_size = 16;
  return c;
}

ModelConfig TinyTrainModel(Modality m) {
  ModelConfig c = testing::TinyModelConfig(m, 0, 4, 16, 1);
  return c;
}

TrainConfig TinyTrain(int epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.warmup_epochs = 1;
  t.peak_lr = 3e-3;
  t.max_frames_per_batch = 200;
  t.seed = 5;
  return t;
}

TEST(TrainTest, LossDecreasesAndRunsAreDeterministic) {
  const DeskCorpus d = GenerateDeskCorpus(TinyCorpus());
  const Vocabulary vocab = TrainDeskVocabulary(d, 40);
  std::vector<double> curve;
  TrainHooks hooks;
  hooks.on_epoch = [&](int, const EpochStats& s) { curve.push_back(s.loss); };
  const auto r1 = Train(d.labelled, vocab, TinyTrainModel(Modality::kAudio), TinyTrain(5), hooks);
  ASSERT_EQ(curve.size(), 5u);
  EXPECT_LT(r1.epochs.back().loss, r1.epochs.front().loss);
  EXPECT_EQ(r1.epochs.front().records + r1.epochs.front().skipped,
            static_cast<int>(d.labelled.size()));
  const auto r2 = Train(d.labelled, vocab, TinyTrainModel(Modality::kAudio), TinyTrain(5));
  for (std::size_t e = 0; e < r1.epochs.size(); ++e) {
    EXPECT_EQ(r1.epochs[e].loss, r2.epochs[e].loss);
  }
  const EvalOptions opts;
  EXPECT_EQ(Evaluate(*r1.model, vocab, d.eval, opts).hyps,
            Evaluate(*r2.model, vocab, d.eval, opts).hyps);
}

TEST(TrainTest, DivergenceSavesFiniteCheckpoint) {
  const DeskCorpus d = GenerateDeskCorpus(TinyCorpus());
  const Vocabulary vocab = TrainDeskVocabulary(d, 40);
  TrainConfig t = TinyTrain(3);
  t.peak_lr = 1e300;
  t.weight_decay = 0;
  TrainHooks hooks;
  hooks.divergence_checkpoint = TempPath("diverged.ckpt");
  EXPECT_THROW(Train(d.labelled, vocab, TinyTrainModel(Modality::kAudio), t, hooks),
               DivergenceError);
  const Checkpoint c = LoadCheckpoint(hooks.divergence_checkpoint);
  for (const auto& [name, a] : c.arrays) {
    for (double v : a.Vec()) ASSERT_TRUE(std::isfinite(v)) << name;
  }
  fs::remove(hooks.divergence_checkpoint);
}

TEST(EvaluateTest, EdgeCases) {
  const DeskCorpus d = GenerateDeskCorpus(TinyCorpus());
  const Vocabulary vocab = TrainDeskVocabulary(d, 40);
  ModelConfig cfg = TinyTrainModel(Modality::kAudio);
  cfg.vocab_size = vocab.size();
  AvsrModel model(cfg);
  EvalOptions opts;
  EXPECT_THROW(Evaluate(model, vocab, Manifest{}, opts), Error);
  EXPECT_THROW(Evaluate(model, SmallVocab(), d.eval, opts), Error);
  EvalOptions babble;
  babble.noise = NoiseSpec{NoiseKind::kBabble, 0.0, 1};
  EXPECT_THROW(Evaluate(model, vocab, d.eval, babble), Error);
  babble.babble_corpus = &d.labelled;
  EXPECT_EQ(Evaluate(model, vocab, d.eval, babble).ids.size(), d.eval.size());

  EvalOptions clean;
  clean.noise = NoiseSpec{NoiseKind::kWhite, kCleanSnr, 1};
  EXPECT_EQ(Evaluate(model, vocab, d.eval, clean).hyps,
            Evaluate(model, vocab, d.eval, opts).hyps);
}

TEST(ReportTest, CsvAndMarkdown) {
  RunReport r;
  r.title = "t";
  r.columns = {"a", "b"};
  r.rows = {{"1", "x,y"}};
  EXPECT_EQ(r.Csv(), "a,b\n1,\"x,y\"\n");
  EXPECT_NE(r.Markdown().find("| a | b |"), std::string::npos);
  EXPECT_EQ(Percent(0.12345), "12.35");
}

}  // namespace
}  // namespace avsr
