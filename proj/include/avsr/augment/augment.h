// include/avsr/augment/augment.h

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

#ifndef AVSR_AUGMENT_AUGMENT_H_
#define AVSR_AUGMENT_AUGMENT_H_

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "avsr/data/manifest.h"
#include "avsr/data/media.h"

namespace avsr {

enum class MaskFill { kUtteranceMean, kZeros };

std::string ToString(MaskFill fill);
MaskFill ParseMaskFill(const std::string& s);

struct TimeMaskConfig {
  double masks_per_second = 1.0;
  double max_mask_s = 0.4;
  MaskFill fill = MaskFill::kUtteranceMean;

  void Validate() const;
};

// A masked span [start, start + length) in time units.
struct MaskSpan {
  int start = 0;
  int length = 0;
};

// floor(duration_s * masks_per_second) spans over `units` positions sampled
// at `units_per_second`; lengths are uniform in [0, max_mask_s *
// units_per_second] and starts uniform over the positions the span fits in.
std::vector<MaskSpan> SampleTimeMasks(int units, double units_per_second,
                                      const TimeMaskConfig& cfg, std::uint64_t seed);

// Audio is masked in sample windows (0.4 s = 6400 samples), video in frames.
Waveform TimeMaskAudio(const Waveform& wave, const TimeMaskConfig& cfg, std::uint64_t seed);
VideoClip TimeMaskVideo(const VideoClip& clip, const TimeMaskConfig& cfg, std::uint64_t seed);

struct VideoAugmentConfig {
  double flip_prob = 0.5;
  // Side of the square random crop; 0 selects round(side * 88 / 96).
  int crop_size = 0;
  TimeMaskConfig time_mask;
};

VideoClip FlipHorizontal(const VideoClip& clip);
// Crops a size x size window at (top, left) from every frame and resizes it
// back to the original geometry with bilinear interpolation.
VideoClip CropAndResize(const VideoClip& clip, int top, int left, int size);

// Flip, crop and resize, then time mask. Identity when !training.
VideoClip AugmentVideo(const VideoClip& clip, const VideoAugmentConfig& cfg, bool training,
                       std::uint64_t seed);
Waveform AugmentAudio(const Waveform& wave, const TimeMaskConfig& cfg, bool training,
                      std::uint64_t seed);

inline constexpr double kCleanSnr = std::numeric_limits<double>::infinity();

double MeanPower(const Waveform& x);
double SnrDb(const Waveform& signal, const Waveform& noise);

// Gain applied to noise of power p_noise to reach snr_db against p_signal.
double SnrGain(double p_signal, double p_noise, double snr_db);

// signal + g * segment, where the segment is a seeded window of the noise
// (looped when the noise is shorter than the signal) and g is chosen over the
// whole utterance. snr_db = +inf returns the signal unchanged.
Waveform MixAtSnr(const Waveform& signal, const Waveform& noise, double snr_db,
                  std::uint64_t seed);

enum class NoiseKind { kBabble, kPink, kWhite };

std::string ToString(NoiseKind kind);
NoiseKind ParseNoiseKind(const std::string& s);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kBabble;
  double snr_db = kCleanSnr;
  std::uint64_t seed = 0;
};

inline constexpr int kBabbleTalkers = 6;

Waveform WhiteNoise(std::size_t length, std::uint64_t seed);
// White Gaussian noise shaped to a 1/f power spectrum in the frequency domain.
Waveform PinkNoise(std::size_t length, std::uint64_t seed);
// Unit-power sum of `talkers` utterances drawn from `corpus`, each looped from
// a random offset.
Waveform BabbleNoise(std::size_t length, const Manifest& corpus, std::uint64_t seed,
                     int talkers = kBabbleTalkers);

// Unit power. Babble needs a corpus.
Waveform MakeNoise(NoiseKind kind, std::size_t length, std::uint64_t seed,
                   const Manifest* corpus = nullptr);

// {-5, 0, 5, 10, 15, 20, +inf} dB.
const std::vector<double>& TrainingSnrLevels();
// {12.5, 7.5, 2.5, -2.5, -7.5} dB.
const std::vector<double>& EvalSnrGrid();

// Mixes babble at an SNR drawn uniformly from TrainingSnrLevels().
class TrainingNoisePolicy {
 public:
  explicit TrainingNoisePolicy(Waveform babble);
  // Builds a babble bank of `seconds` from the corpus.
  static TrainingNoisePolicy FromCorpus(const Manifest& corpus, double seconds,
                                        std::uint64_t seed);

  double DrawSnr(std::uint64_t seed) const;
  Waveform Apply(const Waveform& wave, std::uint64_t seed, double* snr_db = nullptr) const;

 private:
  Waveform babble_;
};

}  // namespace avsr

#endif  // AVSR_AUGMENT_AUGMENT_H_
