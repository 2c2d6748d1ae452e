// tests/augment_test.cc

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
#include <complex>
#include <map>
#include <numbers>

#include <gtest/gtest.h>

#include "avsr/augment/augment.h"
#include "avsr/base/error.h"
#include "avsr/base/random.h"
#include "avsr/data/synth.h"

namespace avsr {
namespace {

// Iterative radix-2 FFT, written independently of FFTW.
void Fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Welch periodogram (Hann, 50% overlap) and a least-squares fit of
// 10*log10(P) against log10(f) over [lo, hi] Hz. Returns dB per decade.
double SpectralSlope(const Waveform& x, double lo, double hi, std::size_t seg = 4096) {
  std::vector<double> psd(seg / 2 + 1, 0.0);
  std::vector<double> win(seg);
  for (std::size_t i = 0; i < seg; ++i) {
    win[i] = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / static_cast<double>(seg));
  }
  int count = 0;
  for (std::size_t off = 0; off + seg <= x.size(); off += seg / 2, ++count) {
    std::vector<std::complex<double>> a(seg);
    for (std::size_t i = 0; i < seg; ++i) a[i] = x[off + i] * win[i];
    Fft(a);
    for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += std::norm(a[k]);
  }
  EXPECT_GT(count, 0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 1; k < psd.size(); ++k) {
    const double f = k * static_cast<double>(kSampleRate) / seg;
    if (f < lo || f > hi) continue;
    const double lx = std::log10(f), ly = 10 * std::log10(psd[k] / count);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Waveform Tone(std::size_t n, double amp, std::uint64_t seed) {
  Rng rng(seed);
  Waveform w(n);
  const double f = 100 + 3000 * Uniform01(rng);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = amp * std::sin(2 * std::numbers::pi * f * i / kSampleRate) + 0.01 * (Uniform01(rng) - 0.5);
  }
  return w;
}

VideoClip Ramp(int frames, int h, int w) {
  VideoClip c;
  c.frames = frames;
  c.height = h;
  c.width = w;
  for (int t = 0; t < frames; ++t) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) c.pixels.push_back(0.01 * t + 0.02 * y + 0.003 * x + 0.1);
    }
  }
  return c;
}

TEST(TimeMask, MaskCountFollowsDuration) {
  TimeMaskConfig cfg;
  EXPECT_EQ(SampleTimeMasks(50, kVideoFps, cfg, 1).size(), 2u);        // 2.0 s
  EXPECT_EQ(SampleTimeMasks(12, kVideoFps, cfg, 1).size(), 0u);        // 0.48 s
  EXPECT_EQ(SampleTimeMasks(32000, kSampleRate, cfg, 1).size(), 2u);  // 2.0 s of audio
  EXPECT_EQ(SampleTimeMasks(0, kVideoFps, cfg, 1).size(), 0u);
  cfg.masks_per_second = 2.5;
  EXPECT_EQ(SampleTimeMasks(100, kVideoFps, cfg, 1).size(), 10u);
}

TEST(TimeMask, ShortUtteranceIsIdentity) {
  const Waveform w = Tone(8000, 0.5, 2);  // 0.5 s
  EXPECT_EQ(TimeMaskAudio(w, {}, 3), w);
  const VideoClip v = Ramp(12, 4, 4);
  EXPECT_EQ(TimeMaskVideo(v, {}, 3).pixels, v.pixels);
}

TEST(TimeMask, MonteCarloBoundsAndMaskedFraction) {
  // 4 s at 25 fps: 4 masks, lengths uniform in [0, 10].
  const int T = 100;
  const TimeMaskConfig cfg;
  double masked = 0;
  int max_len = 0;
  const int draws = 1000;
  for (int s = 0; s < draws; ++s) {
    std::vector<bool> hit(T, false);
    const auto spans = SampleTimeMasks(T, kVideoFps, cfg, s);
    ASSERT_EQ(spans.size(), 4u);
    for (const auto& sp : spans) {
      max_len = std::max(max_len, sp.length);
      ASSERT_GE(sp.start, 0);
      ASSERT_LE(sp.start + sp.length, T);
      for (int t = sp.start; t < sp.start + sp.length; ++t) hit[t] = true;
    }
    masked += std::count(hit.begin(), hit.end(), true);
  }
  EXPECT_LE(max_len, 10);
  EXPECT_EQ(max_len, 10);
  const double analytic = 4 * 5.0 / T;
  const double observed = masked / (draws * T);
  EXPECT_NEAR(observed, analytic, 0.2 * analytic);
}

TEST(TimeMask, OnlyMaskedPositionsChange) {
  const Waveform w = Tone(16000 * 3, 0.5, 4);
  TimeMaskConfig cfg;
  cfg.fill = MaskFill::kZeros;
  const Waveform out = TimeMaskAudio(w, cfg, 5);
  std::vector<bool> in_mask(w.size(), false);
  for (const auto& s : SampleTimeMasks(static_cast<int>(w.size()), kSampleRate, cfg, 5)) {
    EXPECT_LE(s.length, 6400);
    for (int i = s.start; i < s.start + s.length; ++i) in_mask[i] = true;
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(out[i], in_mask[i] ? 0.0 : w[i]);
  }
  cfg.fill = MaskFill::kUtteranceMean;
  double mean = 0;
  for (double v : w) mean += v;
  mean /= w.size();
  const Waveform out2 = TimeMaskAudio(w, cfg, 5);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (in_mask[i]) EXPECT_NEAR(out2[i], mean, 1e-15);
  }
  EXPECT_EQ(TimeMaskAudio(w, cfg, 5), out2);
  EXPECT_EQ(AugmentAudio(w, cfg, false, 5), w);
}

TEST(TimeMask, VideoMasksWholeFrames) {
  const VideoClip v = Ramp(100, 6, 6);
  TimeMaskConfig cfg;
  cfg.fill = MaskFill::kZeros;
  const VideoClip out = TimeMaskVideo(v, cfg, 6);
  int masked_frames = 0;
  for (int t = 0; t < v.frames; ++t) {
    const bool zero = std::all_of(out.Frame(t), out.Frame(t) + out.FrameSize(),
                                  [](double p) { return p == 0.0; });
    const bool same = std::equal(out.Frame(t), out.Frame(t) + out.FrameSize(), v.Frame(t));
    EXPECT_TRUE(zero || same);
    masked_frames += zero;
  }
  EXPECT_LE(masked_frames, 40);
}

TEST(VideoAugment, FlipIsInvolutionAndMirrors) {
  const VideoClip v = Ramp(3, 5, 7);
  const VideoClip f = FlipHorizontal(v);
  EXPECT_EQ(FlipHorizontal(f).pixels, v.pixels);
  EXPECT_EQ(f.Frame(1)[2 * 7 + 0], v.Frame(1)[2 * 7 + 6]);
}

TEST(VideoAugment, FullCropIsIdentityAndOversizeFails) {
  const VideoClip v = Ramp(2, 8, 8);
  const VideoClip c = CropAndResize(v, 0, 0, 8);
  for (std::size_t i = 0; i < v.pixels.size(); ++i) EXPECT_NEAR(c.pixels[i], v.pixels[i], 1e-15);
  EXPECT_THROW(CropAndResize(v, 0, 0, 9), Error);
  VideoAugmentConfig cfg;
  cfg.crop_size = 9;
  EXPECT_THROW(AugmentVideo(v, cfg, true, 1), Error);
}

TEST(VideoAugment, CropResizesLinearContentExactly) {
  // Bilinear resampling reproduces an affine image inside the crop.
  const VideoClip v = Ramp(1, 16, 16);
  const VideoClip c = CropAndResize(v, 2, 3, 8);
  EXPECT_EQ(c.height, 16);
  EXPECT_EQ(c.width, 16);
  const double s = 8.0 / 16.0;
  for (int y = 2; y < 14; ++y) {
    for (int x = 2; x < 14; ++x) {
      const double sy = 2 + (y + 0.5) * s - 0.5, sx = 3 + (x + 0.5) * s - 0.5;
      EXPECT_NEAR(c.Frame(0)[y * 16 + x], 0.02 * sy + 0.003 * sx + 0.1, 1e-12);
    }
  }
}

TEST(VideoAugment, DeterministicAndEvalIdentity) {
  const VideoClip v = Ramp(60, 16, 16);
  const VideoAugmentConfig cfg;
  EXPECT_EQ(AugmentVideo(v, cfg, true, 9).pixels, AugmentVideo(v, cfg, true, 9).pixels);
  EXPECT_NE(AugmentVideo(v, cfg, true, 9).pixels, AugmentVideo(v, cfg, true, 10).pixels);
  EXPECT_EQ(AugmentVideo(v, cfg, false, 9).pixels, v.pixels);
  const VideoClip a = AugmentVideo(v, cfg, true, 9);
  EXPECT_EQ(a.frames, v.frames);
  EXPECT_EQ(a.height, v.height);
  EXPECT_EQ(a.width, v.width);
}

TEST(VideoAugment, FlipProbabilityIsHalf) {
  // With no crop change and no masking, a flipped ramp has a decreasing row.
  const VideoClip v = Ramp(1, 8, 8);
  VideoAugmentConfig cfg;
  cfg.crop_size = 8;
  cfg.time_mask.masks_per_second = 0;
  int flips = 0;
  for (int s = 0; s < 2000; ++s) {
    const VideoClip a = AugmentVideo(v, cfg, true, s);
    flips += a.Frame(0)[0] > a.Frame(0)[7];
  }
  EXPECT_NEAR(flips / 2000.0, 0.5, 0.035);
}

TEST(MixAtSnr, GainFormula) {
  EXPECT_DOUBLE_EQ(SnrGain(1, 1, 0), 1.0);
  EXPECT_NEAR(SnrGain(1, 1, 10), 0.31623, 5e-6);
  EXPECT_NEAR(SnrGain(1, 1, 10), std::pow(10.0, -0.5), 1e-15);
  EXPECT_NEAR(SnrGain(4, 1, 0), 2.0, 1e-15);
}

TEST(MixAtSnr, MeasuredSnrIsExact) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = UniformInt(rng, 100, 5000);
    const Waveform s = Tone(n, 0.1 + Uniform01(rng), trial);
    const Waveform noise = WhiteNoise(UniformInt(rng, 50, 8000), trial);
    const double snr = -20 + 60 * Uniform01(rng);
    const Waveform mixed = MixAtSnr(s, noise, snr, trial);
    Waveform added(n);
    for (std::size_t i = 0; i < n; ++i) added[i] = mixed[i] - s[i];
    EXPECT_NEAR(SnrDb(s, added), snr, 1e-6);
  }
}

TEST(MixAtSnr, CleanIsBitExactAndSilenceFails) {
  const Waveform s = Tone(1000, 0.3, 12);
  const Waveform noise = WhiteNoise(2000, 12);
  EXPECT_EQ(MixAtSnr(s, noise, kCleanSnr, 1), s);
  EXPECT_THROW(MixAtSnr(Waveform(1000, 0.0), noise, 5, 1), Error);
  EXPECT_THROW(MixAtSnr(s, Waveform(2000, 0.0), 5, 1), Error);
  EXPECT_THROW(MixAtSnr(s, noise, std::nan(""), 1), Error);
  EXPECT_EQ(MixAtSnr(s, noise, 5, 3), MixAtSnr(s, noise, 5, 3));
}

TEST(MixAtSnr, ShortNoiseIsLooped) {
  const Waveform s = Tone(1000, 0.3, 13);
  const Waveform noise = {1.0, -1.0, 0.5};
  const Waveform mixed = MixAtSnr(s, noise, 0, 4);
  Waveform added(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) added[i] = mixed[i] - s[i];
  for (std::size_t i = 3; i < s.size(); ++i) EXPECT_NEAR(added[i], added[i - 3], 1e-12);
}

TEST(Noise, WhiteSpectrumIsFlat) {
  const Waveform w = WhiteNoise(1000000, 14);
  EXPECT_NEAR(SpectralSlope(w, 20, 4000), 0.0, 1.0);
  EXPECT_NEAR(MeanPower(MakeNoise(NoiseKind::kWhite, 1000, 1)), 1.0, 1e-12);
}

TEST(Noise, PinkSpectrumFallsTenDbPerDecade) {
  const Waveform p = PinkNoise(1000000, 15);
  EXPECT_NEAR(SpectralSlope(p, 20, 4000), -10.0, 1.0);
  EXPECT_NEAR(MeanPower(p), 1.0, 1e-12);
  EXPECT_EQ(PinkNoise(5000, 3), PinkNoise(5000, 3));
  EXPECT_NE(PinkNoise(5000, 3), PinkNoise(5000, 4));
}

TEST(Noise, BabbleIsDeterministicUnitPower) {
  SynthCorpusSpec spec;
  spec.n_samples = 20;
  const Manifest corpus = GenerateSyntheticCorpus(spec);
  const Waveform b = BabbleNoise(40000, corpus, 16);
  EXPECT_EQ(b, BabbleNoise(40000, corpus, 16));
  EXPECT_NE(b, BabbleNoise(40000, corpus, 17));
  EXPECT_NEAR(MeanPower(b), 1.0, 1e-12);
  EXPECT_THROW(MakeNoise(NoiseKind::kBabble, 100, 1), Error);
  EXPECT_THROW(BabbleNoise(100, Manifest{}, 1), Error);
  EXPECT_EQ(ParseNoiseKind("pink"), NoiseKind::kPink);
  EXPECT_THROW(ParseNoiseKind("brown"), Error);
}

TEST(TrainingNoise, LevelsAreUniform) {
  EXPECT_EQ(EvalSnrGrid(), (std::vector<double>{12.5, 7.5, 2.5, -2.5, -7.5}));
  ASSERT_EQ(TrainingSnrLevels().size(), 7u);
  const TrainingNoisePolicy policy(WhiteNoise(1000, 1));
  std::map<double, int> counts;
  for (int s = 0; s < 7000; ++s) counts[policy.DrawSnr(s)]++;
  ASSERT_EQ(counts.size(), 7u);
  for (double level : TrainingSnrLevels()) {
    EXPECT_NEAR(counts[level], 1000, 100) << level;
  }
}

TEST(TrainingNoise, DrawsMixAtTheirLevel) {
  SynthCorpusSpec spec;
  spec.n_samples = 10;
  const Manifest corpus = GenerateSyntheticCorpus(spec);
  const auto policy = TrainingNoisePolicy::FromCorpus(corpus, 5.0, 18);
  const Waveform s = LoadAudio(corpus.records[0], "");
  bool saw_clean = false, saw_minus5 = false;
  for (int seed = 0; seed < 100; ++seed) {
    double snr = 0;
    const Waveform out = policy.Apply(s, seed, &snr);
    if (snr == kCleanSnr) {
      EXPECT_EQ(out, s);
      saw_clean = true;
      continue;
    }
    Waveform added(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) added[i] = out[i] - s[i];
    EXPECT_NEAR(SnrDb(s, added), snr, 1e-6);
    saw_minus5 |= snr == -5;
  }
  EXPECT_TRUE(saw_clean);
  EXPECT_TRUE(saw_minus5);
}

}  // namespace
}  // namespace avsr
