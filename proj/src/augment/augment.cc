// src/augment/augment.cc

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

#include "avsr/augment/augment.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "avsr/base/error.h"
#include "avsr/base/kernels.h"
#include "avsr/base/random.h"

namespace avsr {

namespace {

constexpr double kSilencePower = 1e-12;

double UtteranceMean(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

std::string ToString(MaskFill fill) {
  return fill == MaskFill::kZeros ? "zeros" : "utterance_mean";
}

MaskFill ParseMaskFill(const std::string& s) {
  if (s == "zeros") return MaskFill::kZeros;
  if (s == "utterance_mean" || s == "mean") return MaskFill::kUtteranceMean;
  Fail("unknown mask fill '", s, "' (expected utterance_mean or zeros)");
}

void TimeMaskConfig::Validate() const {
  AVSR_CHECK(masks_per_second >= 0 && std::isfinite(masks_per_second),
             "masks_per_second must be finite and >= 0");
  AVSR_CHECK(max_mask_s >= 0 && std::isfinite(max_mask_s), "max_mask_s must be finite and >= 0");
}

std::vector<MaskSpan> SampleTimeMasks(int units, double units_per_second,
                                      const TimeMaskConfig& cfg, std::uint64_t seed) {
  cfg.Validate();
  AVSR_CHECK(units >= 0 && units_per_second > 0, "invalid time axis");
  const double duration = units / units_per_second;
  const int n_masks = static_cast<int>(std::floor(duration * cfg.masks_per_second + 1e-9));
  const int max_len =
      std::min(units, static_cast<int>(std::lround(cfg.max_mask_s * units_per_second)));
  std::vector<MaskSpan> spans;
  Rng rng(DeriveSeed(seed, HashString("time-mask")));
  for (int i = 0; i < n_masks; ++i) {
    MaskSpan s;
    s.length = UniformInt(rng, 0, max_len);
    s.start = UniformInt(rng, 0, units - s.length);
    spans.push_back(s);
  }
  return spans;
}

Waveform TimeMaskAudio(const Waveform& wave, const TimeMaskConfig& cfg, std::uint64_t seed) {
  Waveform out = wave;
  const double fill = cfg.fill == MaskFill::kZeros ? 0.0 : UtteranceMean(wave);
  for (const MaskSpan& s :
       SampleTimeMasks(static_cast<int>(wave.size()), kSampleRate, cfg, seed)) {
    std::fill_n(out.begin() + s.start, s.length, fill);
  }
  return out;
}

VideoClip TimeMaskVideo(const VideoClip& clip, const TimeMaskConfig& cfg, std::uint64_t seed) {
  VideoClip out = clip;
  const double fill = cfg.fill == MaskFill::kZeros ? 0.0 : UtteranceMean(clip.pixels);
  for (const MaskSpan& s : SampleTimeMasks(clip.frames, kVideoFps, cfg, seed)) {
    for (int t = s.start; t < s.start + s.length; ++t) {
      std::fill_n(out.Frame(t), out.FrameSize(), fill);
    }
  }
  return out;
}

VideoClip FlipHorizontal(const VideoClip& clip) {
  VideoClip out = clip;
  for (int t = 0; t < clip.frames; ++t) {
    for (int y = 0; y < clip.height; ++y) {
      double* row = out.Frame(t) + static_cast<std::size_t>(y) * clip.width;
      std::reverse(row, row + clip.width);
    }
  }
  return out;
}

VideoClip CropAndResize(const VideoClip& clip, int top, int left, int size) {
  if (size > clip.height || size > clip.width) {
    Fail("crop of ", size, "x", size, " is larger than the ", clip.height, "x", clip.width,
         " frame");
  }
  AVSR_CHECK(size >= 1, "crop size must be >= 1");
  AVSR_CHECK(top >= 0 && left >= 0 && top + size <= clip.height && left + size <= clip.width,
             "crop window outside the frame");
  VideoClip out = clip;
  const double sy = static_cast<double>(size) / clip.height;
  const double sx = static_cast<double>(size) / clip.width;
  for (int t = 0; t < clip.frames; ++t) {
    const double* in = clip.Frame(t);
    double* dst = out.Frame(t);
    for (int y = 0; y < clip.height; ++y) {
      const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, size - 1.0);
      const int y0 = static_cast<int>(fy);
      const int y1 = std::min(y0 + 1, size - 1);
      const double wy = fy - y0;
      for (int x = 0; x < clip.width; ++x) {
        const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, size - 1.0);
        const int x0 = static_cast<int>(fx);
        const int x1 = std::min(x0 + 1, size - 1);
        const double wx = fx - x0;
        auto at = [&](int yy, int xx) {
          return in[static_cast<std::size_t>(top + yy) * clip.width + left + xx];
        };
        dst[static_cast<std::size_t>(y) * clip.width + x] =
            (1 - wy) * ((1 - wx) * at(y0, x0) + wx * at(y0, x1)) +
            wy * ((1 - wx) * at(y1, x0) + wx * at(y1, x1));
      }
    }
  }
  return out;
}

VideoClip AugmentVideo(const VideoClip& clip, const VideoAugmentConfig& cfg, bool training,
                       std::uint64_t seed) {
  if (!training) return clip;
  AVSR_CHECK(cfg.flip_prob >= 0 && cfg.flip_prob <= 1, "flip_prob outside [0,1]");
  const int side = std::min(clip.height, clip.width);
  const int crop =
      cfg.crop_size > 0 ? cfg.crop_size : static_cast<int>(std::lround(side * 88.0 / 96.0));
  if (crop > clip.height || crop > clip.width) {
    Fail("crop size ", crop, " is larger than the ", clip.height, "x", clip.width, " frame");
  }
  Rng rng(DeriveSeed(seed, HashString("video-augment")));
  const bool flip = Uniform01(rng) < cfg.flip_prob;
  const int top = UniformInt(rng, 0, clip.height - crop);
  const int left = UniformInt(rng, 0, clip.width - crop);
  VideoClip out = CropAndResize(flip ? FlipHorizontal(clip) : clip, top, left, crop);
  return TimeMaskVideo(out, cfg.time_mask, DeriveSeed(seed, HashString("video-mask")));
}

Waveform AugmentAudio(const Waveform& wave, const TimeMaskConfig& cfg, bool training,
                      std::uint64_t seed) {
  if (!training) return wave;
  return TimeMaskAudio(wave, cfg, DeriveSeed(seed, HashString("audio-mask")));
}

double MeanPower(const Waveform& x) {
  if (x.empty()) return 0.0;
  return Kernels().sum_squares(x.size(), x.data()) / static_cast<double>(x.size());
}

double SnrDb(const Waveform& signal, const Waveform& noise) {
  return 10.0 * std::log10(MeanPower(signal) / MeanPower(noise));
}

double SnrGain(double p_signal, double p_noise, double snr_db) {
  return std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));
}

Waveform MixAtSnr(const Waveform& signal, const Waveform& noise, double snr_db,
                  std::uint64_t seed) {
  AVSR_CHECK(!std::isnan(snr_db) && snr_db != -kCleanSnr, "snr_db must be finite or +inf");
  if (snr_db == kCleanSnr) return signal;
  const double ps = MeanPower(signal);
  if (!(ps > kSilencePower)) Fail("cannot mix noise into a silent signal");
  if (noise.empty()) Fail("noise is empty");
  const std::size_t n = signal.size();
  Rng rng(DeriveSeed(seed, HashString("noise-offset")));
  const std::size_t max_offset = noise.size() >= n ? noise.size() - n : noise.size() - 1;
  const std::size_t offset =
      std::uniform_int_distribution<std::size_t>(0, max_offset)(rng);
  Waveform segment(n);
  for (std::size_t i = 0; i < n; ++i) segment[i] = noise[(offset + i) % noise.size()];
  const double pn = MeanPower(segment);
  if (!(pn > kSilencePower)) Fail("cannot mix silent noise");
  const double g = SnrGain(ps, pn, snr_db);
  Waveform out = signal;
  for (std::size_t i = 0; i < n; ++i) out[i] += g * segment[i];
  return out;
}

std::string ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kBabble:
      return "babble";
    case NoiseKind::kPink:
      return "pink";
    case NoiseKind::kWhite:
      return "white";
  }
  return "?";
}

NoiseKind ParseNoiseKind(const std::string& s) {
  if (s == "babble") return NoiseKind::kBabble;
  if (s == "pink") return NoiseKind::kPink;
  if (s == "white") return NoiseKind::kWhite;
  Fail("unknown noise kind '", s, "' (expected babble, pink or white)");
}

namespace {

void NormalizePower(Waveform& x) {
  const double p = MeanPower(x);
  if (!(p > kSilencePower)) Fail("generated noise is silent");
  const double s = 1.0 / std::sqrt(p);
  for (double& v : x) v *= s;
}

// The FFTW planner is not reentrant.
std::mutex& FftwMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

Waveform WhiteNoise(std::size_t length, std::uint64_t seed) {
  AVSR_CHECK(length > 0, "noise length must be > 0");
  Rng rng(DeriveSeed(seed, HashString("white")));
  std::normal_distribution<double> nd(0.0, 1.0);
  Waveform x(length);
  for (double& v : x) v = nd(rng);
  return x;
}

Waveform PinkNoise(std::size_t length, std::uint64_t seed) {
  AVSR_CHECK(length > 0, "noise length must be > 0");
  Waveform x = WhiteNoise(length, DeriveSeed(seed, HashString("pink")));
  if (length < 4) return x;
  const std::size_t bins = length / 2 + 1;
  fftw_complex* spec = fftw_alloc_complex(bins);
  fftw_plan fwd, inv;
  {
    std::lock_guard<std::mutex> lock(FftwMutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(length), x.data(), spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(length), spec, x.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  spec[0][0] = spec[0][1] = 0.0;
  for (std::size_t k = 1; k < bins; ++k) {
    const double a = 1.0 / std::sqrt(static_cast<double>(k));
    spec[k][0] *= a;
    spec[k][1] *= a;
  }
  fftw_execute(inv);
  {
    std::lock_guard<std::mutex> lock(FftwMutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(spec);
  NormalizePower(x);
  return x;
}

Waveform BabbleNoise(std::size_t length, const Manifest& corpus, std::uint64_t seed,
                     int talkers) {
  AVSR_CHECK(length > 0, "noise length must be > 0");
  AVSR_CHECK(talkers >= 1, "babble needs at least one talker");
  if (corpus.records.empty()) Fail("babble noise needs a non-empty corpus");
  Rng rng(DeriveSeed(seed, HashString("babble")));
  Waveform out(length, 0.0);
  for (int k = 0; k < talkers; ++k) {
    const auto& r = corpus.records[UniformInt(rng, 0, static_cast<int>(corpus.records.size()) - 1)];
    const Waveform w = LoadAudio(r, corpus.base_dir);
    if (w.empty()) Fail("babble source ", r.id, " has no samples");
    const std::size_t offset = std::uniform_int_distribution<std::size_t>(0, w.size() - 1)(rng);
    for (std::size_t i = 0; i < length; ++i) out[i] += w[(offset + i) % w.size()];
  }
  NormalizePower(out);
  return out;
}

Waveform MakeNoise(NoiseKind kind, std::size_t length, std::uint64_t seed,
                   const Manifest* corpus) {
  switch (kind) {
    case NoiseKind::kWhite: {
      Waveform x = WhiteNoise(length, seed);
      NormalizePower(x);
      return x;
    }
    case NoiseKind::kPink:
      return PinkNoise(length, seed);
    case NoiseKind::kBabble:
      if (!corpus) Fail("babble noise needs a corpus");
      return BabbleNoise(length, *corpus, seed);
  }
  Fail("unknown noise kind");
}

const std::vector<double>& TrainingSnrLevels() {
  static const std::vector<double> levels = {-5, 0, 5, 10, 15, 20, kCleanSnr};
  return levels;
}

const std::vector<double>& EvalSnrGrid() {
  static const std::vector<double> grid = {12.5, 7.5, 2.5, -2.5, -7.5};
  return grid;
}

TrainingNoisePolicy::TrainingNoisePolicy(Waveform babble) : babble_(std::move(babble)) {
  if (!(MeanPower(babble_) > kSilencePower)) Fail("training noise bank is silent");
}

TrainingNoisePolicy TrainingNoisePolicy::FromCorpus(const Manifest& corpus, double seconds,
                                                    std::uint64_t seed) {
  AVSR_CHECK(seconds > 0, "babble bank duration must be > 0");
  const auto length = static_cast<std::size_t>(std::lround(seconds * kSampleRate));
  return TrainingNoisePolicy(BabbleNoise(length, corpus, seed));
}

double TrainingNoisePolicy::DrawSnr(std::uint64_t seed) const {
  Rng rng(DeriveSeed(seed, HashString("snr-level")));
  const auto& levels = TrainingSnrLevels();
  return levels[UniformInt(rng, 0, static_cast<int>(levels.size()) - 1)];
}

Waveform TrainingNoisePolicy::Apply(const Waveform& wave, std::uint64_t seed,
                                    double* snr_db) const {
  const double snr = DrawSnr(seed);
  if (snr_db) *snr_db = snr;
  return MixAtSnr(wave, babble_, snr, seed);
}

}  // namespace avsr
