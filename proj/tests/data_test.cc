// tests/data_test.cc

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "avsr/base/error.h"
#include "avsr/base/kernels.h"
#include "avsr/data/manifest.h"
#include "avsr/data/media.h"
#include "avsr/data/synth.h"

namespace avsr {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("avsr_data_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

SampleRecord MakeRecord(const std::string& id, double seconds) {
  SampleRecord r;
  r.id = id;
  r.audio = id + ".wav";
  r.video = id + ".avf";
  r.transcript = "x";
  r.language = "eng";
  r.duration_s = seconds;
  r.source = "test";
  return r;
}

Manifest HoursManifest(const std::string& prefix, int n, double seconds_each) {
  Manifest m;
  m.name = prefix;
  for (int i = 0; i < n; ++i) m.records.push_back(MakeRecord(prefix + std::to_string(i), seconds_each));
  return m;
}

TEST(SynthCorpus, ThreeWordRecordLengths) {
  SynthCorpusSpec spec;
  spec.n_samples = 1;
  spec.min_words = spec.max_words = 3;
  spec.seed = 7;
  const Manifest m = GenerateSyntheticCorpus(spec);
  ASSERT_EQ(m.size(), 1u);
  const SampleRecord& r = m.records[0];
  EXPECT_DOUBLE_EQ(r.duration_s, 0.6);
  EXPECT_EQ(r.NumFrames(), 15);
  EXPECT_EQ(LoadAudio(r).size(), 9600u);
  const VideoClip v = LoadVideo(r);
  EXPECT_EQ(v.frames, 15);
  EXPECT_EQ(v.height, 32);
  EXPECT_EQ(v.width, 32);
  EXPECT_EQ(r.provenance.kind, LabelKind::kHuman);
  std::istringstream words(r.transcript);
  std::string w;
  int count = 0;
  while (words >> w) ++count;
  EXPECT_EQ(count, 3);
}

TEST(SynthCorpus, SameSeedGivesByteIdenticalManifests) {
  SynthCorpusSpec spec;
  spec.n_samples = 5;
  spec.seed = 11;
  spec.audio_snr_db = 20;
  spec.video_corruption = 0.2;
  const fs::path dir = TempDir("determinism");
  SaveManifest(GenerateSyntheticCorpus(spec), (dir / "a.jsonl").string());
  SaveManifest(GenerateSyntheticCorpus(spec), (dir / "b.jsonl").string());
  const std::string a = ReadFile(dir / "a.jsonl");
  EXPECT_FALSE(a.empty());
  // Media paths embed the manifest file name; normalize before comparing.
  std::string b = ReadFile(dir / "b.jsonl");
  for (std::size_t pos; (pos = b.find("b.jsonl.media")) != std::string::npos;) {
    b.replace(pos, 13, "a.jsonl.media");
  }
  EXPECT_EQ(a, b);
  for (const auto& e : fs::directory_iterator(dir / "a.jsonl.media")) {
    EXPECT_EQ(ReadFile(e.path()), ReadFile(dir / "b.jsonl.media" / e.path().filename()));
  }
}

TEST(SynthCorpus, LanguageMixIsBinomial) {
  SynthCorpusSpec spec;
  spec.n_samples = 1000;
  spec.seed = 1;
  spec.language_mix = {{"eng", 0.5}, {"deu", 0.5}};
  const Manifest m = GenerateSyntheticCorpus(spec);
  int eng = 0;
  for (const auto& r : m.records) eng += r.language == "eng";
  EXPECT_NEAR(eng, 500, 40);
}

TEST(SynthCorpus, RejectsInvalidSpec) {
  SynthCorpusSpec spec;
  spec.language_mix = {{"eng", 0.5}, {"deu", 0.4}};
  EXPECT_THROW(ValidateSpec(spec), Error);
  spec.language_mix = {{"eng", 1.0}};
  spec.video_corruption = 1.5;
  EXPECT_THROW(ValidateSpec(spec), Error);
  spec.video_corruption = 0;
  spec.min_words = 4;
  spec.max_words = 3;
  EXPECT_THROW(GenerateSyntheticCorpus(spec), Error);
}

TEST(SynthCorpus, LengthInvariantsHoldForEveryRecord) {
  SynthCorpusSpec spec;
  spec.n_samples = 40;
  spec.seed = 3;
  for (const auto& r : GenerateSyntheticCorpus(spec).records) {
    const long samples = std::lround(r.duration_s * kSampleRate);
    const long frames = std::lround(r.duration_s * kVideoFps);
    EXPECT_LE(std::abs(static_cast<long>(LoadAudio(r).size()) - samples), 1);
    EXPECT_LE(std::abs(static_cast<long>(LoadVideo(r).frames) - frames), 1);
  }
}

TEST(SynthCorpus, CorpusSeedsShareOneInventory) {
  SynthCorpusSpec a, b;
  a.seed = 1;
  b.seed = 2;
  EXPECT_EQ(InventoryFor(a).get(), InventoryFor(b).get());
  b.inventory_seed = 9;
  EXPECT_NE(InventoryFor(a)->Words("eng"), InventoryFor(b)->Words("eng"));
}

// Nearest-signature classification written against the inventory directly,
// independent of the pseudo-label recognizer.
TEST(SynthCorpus, AudioSignaturesAreSeparable) {
  SynthCorpusSpec spec;
  spec.n_samples = 50;
  spec.seed = 5;
  const Manifest m = GenerateSyntheticCorpus(spec);
  const auto inv = InventoryFor(spec);
  const auto& words = inv->Words("eng");
  for (const auto& r : m.records) {
    const Waveform wave = LoadAudio(r);
    std::string decoded;
    for (std::size_t off = 0; off < wave.size(); off += kSamplesPerWord) {
      double best = -1e300;
      std::string best_w;
      for (const auto& w : words) {
        const auto& sig = inv->AudioSignature("eng", w);
        double dot = 0, nn = 0;
        for (int n = 0; n < kSamplesPerWord; ++n) {
          dot += wave[off + n] * sig[n];
          nn += sig[n] * sig[n];
        }
        if (dot / std::sqrt(nn) > best) {
          best = dot / std::sqrt(nn);
          best_w = w;
        }
      }
      if (!decoded.empty()) decoded += ' ';
      decoded += best_w;
    }
    EXPECT_EQ(decoded, r.transcript) << r.id;
  }
}

TEST(SynthCorpus, VideoPatternsAreSeparable) {
  SynthCorpusSpec spec;
  spec.n_samples = 50;
  spec.seed = 6;
  const Manifest m = GenerateSyntheticCorpus(spec);
  const auto inv = InventoryFor(spec);
  const auto& words = inv->Words("eng");
  for (const auto& r : m.records) {
    const VideoClip v = LoadVideo(r);
    const std::size_t chunk = kFramesPerWord * v.FrameSize();
    std::string decoded;
    for (std::size_t off = 0; off < v.pixels.size(); off += chunk) {
      double best = 1e300;
      std::string best_w;
      for (const auto& w : words) {
        const auto& pat = inv->VideoPattern("eng", w);
        double d = 0;
        for (std::size_t k = 0; k < chunk; ++k) d += (v.pixels[off + k] - pat[k]) * (v.pixels[off + k] - pat[k]);
        if (d < best) {
          best = d;
          best_w = w;
        }
      }
      if (!decoded.empty()) decoded += ' ';
      decoded += best_w;
    }
    EXPECT_EQ(decoded, r.transcript) << r.id;
  }
}

TEST(SynthCorpus, VideoCorruptionBlanksFrames) {
  SynthCorpusSpec spec;
  spec.n_samples = 20;
  spec.video_corruption = 0.5;
  int blank = 0, total = 0;
  for (const auto& r : GenerateSyntheticCorpus(spec).records) {
    const VideoClip v = LoadVideo(r);
    for (int t = 0; t < v.frames; ++t) {
      bool zero = true;
      for (std::size_t k = 0; k < v.FrameSize(); ++k) zero &= v.Frame(t)[k] == 0.0;
      blank += zero;
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(blank) / total, 0.5, 0.1);
}

TEST(SynthCorpus, RenderingNoiseHitsRequestedSnr) {
  SynthCorpusSpec clean, noisy;
  clean.n_samples = noisy.n_samples = 3;
  noisy.audio_snr_db = 10;
  const Manifest a = GenerateSyntheticCorpus(clean);
  const Manifest b = GenerateSyntheticCorpus(noisy);
  double ps = 0, pn = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Waveform x = LoadAudio(a.records[i]);
    const Waveform y = LoadAudio(b.records[i]);
    for (std::size_t n = 0; n < x.size(); ++n) {
      ps += x[n] * x[n];
      pn += (y[n] - x[n]) * (y[n] - x[n]);
    }
  }
  EXPECT_NEAR(10 * std::log10(ps / pn), 10.0, 0.3);
}

TEST(Manifest, MergeIsExactlyAdditive) {
  const Manifest a = HoursManifest("a", 2 * 3600, 1.0);
  const Manifest b = HoursManifest("b", 3 * 3600, 1.0);
  const Manifest ab = MergeManifests({a, b});
  EXPECT_EQ(TotalHours(a), 2.0);
  EXPECT_EQ(TotalHours(b), 3.0);
  EXPECT_EQ(TotalHours(ab), 5.0);
  EXPECT_EQ(ab.records.front().id, "a0");
  EXPECT_EQ(ab.records.back().id, "b" + std::to_string(3 * 3600 - 1));
}

TEST(Manifest, FullScalePoolHours) {
  // 818 h and 2 630 h as 0.3 s clips would be ~41M records; use 1 h clips.
  const Manifest labelled = HoursManifest("l", 818, 3600.0);
  Manifest extra = HoursManifest("x", 2630, 3600.0);
  const Manifest pool = MergeManifests({labelled, extra});
  EXPECT_EQ(TotalHours(pool), 3448.0);
}

TEST(Manifest, PartitionHoursAreExact) {
  SynthCorpusSpec spec;
  spec.n_samples = 300;
  const Manifest m = GenerateSyntheticCorpus(spec);
  Manifest parts[3];
  for (std::size_t i = 0; i < m.size(); ++i) parts[i % 3].records.push_back(m.records[i]);
  EXPECT_EQ(TotalMicros(parts[0]) + TotalMicros(parts[1]) + TotalMicros(parts[2]), TotalMicros(m));
  EXPECT_EQ(TotalHours(MergeManifests({parts[0], parts[1], parts[2]})), TotalHours(m));
}

TEST(Manifest, MergeRejectsDuplicateIdAndNamesIt) {
  const Manifest a = HoursManifest("a", 3, 1.0);
  try {
    MergeManifests({a, a});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("a0"), std::string::npos);
  }
  EXPECT_THROW(MergeManifests({}), Error);
}

TEST(Manifest, SubsetEdgesAndNesting) {
  SynthCorpusSpec spec;
  spec.n_samples = 97;
  const Manifest m = GenerateSyntheticCorpus(spec);
  EXPECT_TRUE(SubsetByFraction(m, 0.0, 4).empty());
  const Manifest all = SubsetByFraction(m, 1.0, 4);
  EXPECT_EQ(all.size(), m.size());
  EXPECT_EQ(TotalMicros(all), TotalMicros(m));
  std::set<std::string> ids_all, ids_m;
  for (const auto& r : all.records) ids_all.insert(r.id);
  for (const auto& r : m.records) ids_m.insert(r.id);
  EXPECT_EQ(ids_all, ids_m);

  for (std::uint64_t seed : {0, 1, 2, 3}) {
    std::set<std::string> prev;
    for (double f : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const Manifest s = SubsetByFraction(m, f, seed);
      EXPECT_EQ(s.size(), static_cast<std::size_t>(std::ceil(f * 97 - 1e-9)));
      std::set<std::string> ids;
      for (const auto& r : s.records) ids.insert(r.id);
      EXPECT_TRUE(std::includes(ids.begin(), ids.end(), prev.begin(), prev.end()));
      prev = ids;
    }
  }
  EXPECT_THROW(SubsetByFraction(m, 1.5, 0), Error);
}

TEST(Manifest, SubsetIsDeterministic) {
  const Manifest m = HoursManifest("r", 50, 1.0);
  const Manifest a = SubsetByFraction(m, 0.3, 9);
  const Manifest b = SubsetByFraction(m, 0.3, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.records[i].id, b.records[i].id);
}

TEST(ManifestIo, EmptyRoundTrip) {
  const fs::path dir = TempDir("empty");
  const std::string path = (dir / "e.jsonl").string();
  SaveManifest(Manifest{}, path);
  EXPECT_EQ(fs::file_size(path), 0u);
  EXPECT_TRUE(LoadManifest(path).empty());
}

TEST(ManifestIo, GeneratedCorpusRoundTrip) {
  SynthCorpusSpec spec;
  spec.n_samples = 12;
  spec.seed = 21;
  spec.language_mix = {{"eng", 0.7}, {"fra", 0.3}};
  const Manifest m = GenerateSyntheticCorpus(spec);
  const fs::path dir = TempDir("roundtrip");
  const std::string path = (dir / "c.jsonl").string();
  SaveManifest(m, path);
  const Manifest back = LoadManifest(path);
  ASSERT_EQ(back.size(), m.size());
  EXPECT_NEAR(TotalHours(back), TotalHours(m), 1e-9);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto& a = m.records[i];
    const auto& b = back.records[i];
    EXPECT_EQ(a.id, b.id);
    EXPECT_EQ(a.transcript, b.transcript);
    EXPECT_EQ(a.language, b.language);
    EXPECT_EQ(a.duration_s, b.duration_s);
    EXPECT_EQ(a.provenance, b.provenance);
    EXPECT_EQ(a.source, b.source);
    const Waveform wa = LoadAudio(a), wb = LoadAudio(b, back.base_dir);
    ASSERT_EQ(wa.size(), wb.size());
    for (std::size_t n = 0; n < wa.size(); ++n) EXPECT_NEAR(wa[n], wb[n], 1.0 / 32767);
    const VideoClip va = LoadVideo(a), vb = LoadVideo(b, back.base_dir);
    ASSERT_EQ(va.pixels.size(), vb.pixels.size());
    for (std::size_t n = 0; n < va.pixels.size(); ++n) EXPECT_NEAR(va.pixels[n], vb.pixels[n], 1e-6);
  }
  // A second save of the loaded (file-backed) manifest is field-for-field equal.
  const std::string path2 = (dir / "c2.jsonl").string();
  SaveManifest(back, path2);
  const Manifest again = LoadManifest(path2);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_TRUE(SameRecord(back.records[i], again.records[i]));
}

TEST(ManifestIo, MissingTranscriptReportsLine) {
  const fs::path dir = TempDir("missing");
  const fs::path path = dir / "bad.jsonl";
  std::ofstream(path) << R"({"id":"x","audio":"x.wav","video":"x.avf","language":"eng",)"
                      << R"("duration_s":0.4,"provenance":{"kind":"human","transcriber_id":"",)"
                      << R"("corruption_rate":0},"source":"s"})" << "\n";
  try {
    LoadManifest(path.string());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("transcript"), std::string::npos) << msg;
  }
}

TEST(ManifestIo, MalformedJsonReportsLine) {
  const fs::path dir = TempDir("malformed");
  const fs::path path = dir / "bad.jsonl";
  SynthCorpusSpec spec;
  spec.n_samples = 2;
  SaveManifest(GenerateSyntheticCorpus(spec), path.string());
  std::ofstream(path, std::ios::app) << "{not json\n";
  try {
    LoadManifest(path.string());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ManifestIo, ProvenanceInvariantsEnforced) {
  Manifest m = HoursManifest("p", 1, 1.0);
  m.records[0].provenance.kind = LabelKind::kAuto;
  EXPECT_THROW(ValidateManifest(m), Error);
  m.records[0].provenance.transcriber_id = "oracle:wer=0";
  EXPECT_NO_THROW(ValidateManifest(m));
  m.records[0].duration_s = 0;
  EXPECT_THROW(ValidateManifest(m), Error);
}

TEST(Media, WavRoundTripQuantizes) {
  const fs::path dir = TempDir("wav");
  Waveform w = {0.0, 0.5, -0.5, 1.0, -1.0, 1.7};
  WriteWav((dir / "a.wav").string(), w);
  const Waveform r = ReadWav((dir / "a.wav").string());
  ASSERT_EQ(r.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(r[i], std::clamp(w[i], -1.0, 1.0), 1.0 / 32767);
  }
  EXPECT_EQ(fs::file_size(dir / "a.wav"), 44u + 2 * w.size());
}

TEST(Media, AvfHeaderLayout) {
  const fs::path dir = TempDir("avf");
  VideoClip c;
  c.frames = 2;
  c.height = 3;
  c.width = 4;
  for (int i = 0; i < 24; ++i) c.pixels.push_back(i / 24.0);
  WriteAvf((dir / "a.avf").string(), c);
  const std::string bytes = ReadFile(dir / "a.avf");
  ASSERT_EQ(bytes.size(), 16u + 24 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "AVF1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 4);
  const VideoClip back = ReadAvf((dir / "a.avf").string());
  EXPECT_EQ(back.frames, 2);
  for (int i = 0; i < 24; ++i) EXPECT_FLOAT_EQ(back.pixels[i], c.pixels[i]);
  std::ofstream(dir / "bad.avf") << "AVF2xxxxxxxxxxxx";
  EXPECT_THROW(ReadAvf((dir / "bad.avf").string()), Error);
}

}  // namespace
}  // namespace avsr
