// src/data/synth.cc

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

#include "avsr/data/synth.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "avsr/base/error.h"
#include "avsr/base/parallel.h"
#include "avsr/base/random.h"

namespace avsr {

void ValidateSpec(const SynthCorpusSpec& s) {
  AVSR_CHECK(s.n_samples >= 0, "n_samples must be >= 0");
  AVSR_CHECK(s.min_words >= 1 && s.max_words >= s.min_words,
             "tokens_per_sample range [", s.min_words, ",", s.max_words, "] invalid");
  AVSR_CHECK(s.vocab_size_words >= 2, "vocab_size_words must be >= 2");
  AVSR_CHECK(s.video_corruption >= 0 && s.video_corruption <= 1,
             "video_corruption outside [0,1]");
  AVSR_CHECK(!std::isnan(s.audio_snr_db), "audio_snr_db is NaN");
  AVSR_CHECK(s.frame_size >= 8, "frame_size must be >= 8");
  AVSR_CHECK(!s.language_mix.empty(), "language_mix is empty");
  double total = 0;
  for (const auto& [lang, frac] : s.language_mix) {
    AVSR_CHECK(!lang.empty(), "empty language code");
    AVSR_CHECK(frac >= 0 && frac <= 1, "language fraction for ", lang, " outside [0,1]");
    total += frac;
  }
  AVSR_CHECK(std::abs(total - 1.0) < 1e-9, "language_mix sums to ", total);
}

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string MakeWord(Rng& rng) {
  const int syllables = UniformInt(rng, 2, 3);
  std::string w;
  for (int s = 0; s < syllables; ++s) {
    w += kConsonants[UniformInt(rng, 0, static_cast<int>(kConsonants.size()) - 1)];
    w += kVowels[UniformInt(rng, 0, static_cast<int>(kVowels.size()) - 1)];
  }
  return w;
}

std::vector<double> RenderChirp(Rng& rng) {
  std::vector<double> sig(kSamplesPerWord, 0.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr int kTones = 3;
  for (int k = 0; k < kTones; ++k) {
    const double f0 = 200.0 + 2800.0 * Uniform01(rng);
    const double f1 = std::clamp(f0 * (0.5 + 1.5 * Uniform01(rng)), 100.0, 6000.0);
    const double amp = 0.4 + 0.6 * Uniform01(rng);
    const double phase = kTwoPi * Uniform01(rng);
    for (int n = 0; n < kSamplesPerWord; ++n) {
      const double t = static_cast<double>(n) / kSampleRate;
      sig[n] += amp * std::sin(kTwoPi * (f0 * t + (f1 - f0) * t * t / (2 * kWordSeconds)) + phase);
    }
  }
  // 8 ms raised-cosine ramps at both ends.
  const int ramp = kSampleRate * 8 / 1000;
  for (int n = 0; n < ramp; ++n) {
    const double w = 0.5 - 0.5 * std::cos(std::numbers::pi * n / ramp);
    sig[n] *= w;
    sig[kSamplesPerWord - 1 - n] *= w;
  }
  double peak = 0;
  for (double v : sig) peak = std::max(peak, std::abs(v));
  for (double& v : sig) v *= 0.6 / peak;
  return sig;
}

std::vector<double> RenderPattern(Rng& rng, int size) {
  struct Blob {
    double x0, y0, x1, y1, sigma, amp;
  };
  std::vector<Blob> blobs(3);
  for (auto& b : blobs) {
    b.x0 = size * (0.2 + 0.6 * Uniform01(rng));
    b.y0 = size * (0.2 + 0.6 * Uniform01(rng));
    b.x1 = size * (0.2 + 0.6 * Uniform01(rng));
    b.y1 = size * (0.2 + 0.6 * Uniform01(rng));
    b.sigma = size * (0.06 + 0.12 * Uniform01(rng));
    b.amp = 0.4 + 0.5 * Uniform01(rng);
  }
  std::vector<double> px(static_cast<std::size_t>(kFramesPerWord) * size * size);
  for (int f = 0; f < kFramesPerWord; ++f) {
    const double a = f / static_cast<double>(kFramesPerWord - 1);
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        double v = 0.1;
        for (const auto& b : blobs) {
          const double cx = b.x0 + (b.x1 - b.x0) * a;
          const double cy = b.y0 + (b.y1 - b.y0) * a;
          const double d2 = (x + 0.5 - cx) * (x + 0.5 - cx) + (y + 0.5 - cy) * (y + 0.5 - cy);
          v += b.amp * std::exp(-d2 / (2 * b.sigma * b.sigma));
        }
        px[(static_cast<std::size_t>(f) * size + y) * size + x] = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return px;
}

std::string Key(const std::string& language, const std::string& word) {
  return language + ":" + word;
}

}  // namespace

WordInventory::WordInventory(int words_per_language, std::uint64_t inventory_seed,
                             const std::vector<std::string>& languages, int frame_size)
    : frame_size_(frame_size) {
  for (const auto& lang : languages) {
    Rng rng(DeriveSeed(inventory_seed, HashString(lang)));
    std::set<std::string> seen;
    auto& list = words_[lang];
    int attempts = 0;
    while (static_cast<int>(list.size()) < words_per_language) {
      AVSR_CHECK(++attempts < 100000, "cannot generate ", words_per_language,
                 " distinct words");
      std::string w = MakeWord(rng);
      if (seen.insert(w).second) list.push_back(std::move(w));
    }
  }
  for (const auto& [lang, list] : words_) {
    for (const auto& w : list) {
      Rng rng(DeriveSeed(inventory_seed, HashString(Key(lang, w))));
      Signatures sig;
      sig.audio = RenderChirp(rng);
      sig.video = RenderPattern(rng, frame_size_);
      signatures_.emplace(Key(lang, w), std::move(sig));
    }
  }
  for (const auto& [lang, list] : words_) {
    for (const auto& w : list) {
      entries_.push_back({lang, w, &signatures_.at(Key(lang, w)).audio});
    }
  }
}

const std::vector<std::string>& WordInventory::Words(const std::string& language) const {
  auto it = words_.find(language);
  if (it == words_.end()) Fail("no words for language '", language, "'");
  return it->second;
}

std::vector<std::string> WordInventory::Languages() const {
  std::vector<std::string> out;
  for (const auto& [lang, list] : words_) out.push_back(lang);
  return out;
}

const WordInventory::Signatures& WordInventory::Lookup(const std::string& language,
                                                       const std::string& word) const {
  auto it = signatures_.find(Key(language, word));
  if (it == signatures_.end()) Fail("unknown word '", word, "' for language ", language);
  return it->second;
}

const std::vector<double>& WordInventory::AudioSignature(const std::string& language,
                                                         const std::string& word) const {
  return Lookup(language, word).audio;
}

const std::vector<double>& WordInventory::VideoPattern(const std::string& language,
                                                       const std::string& word) const {
  return Lookup(language, word).video;
}

std::shared_ptr<const WordInventory> InventoryFor(const SynthCorpusSpec& spec) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const WordInventory>> cache;
  std::vector<std::string> langs;
  for (const auto& [lang, frac] : spec.language_mix) langs.push_back(lang);
  std::ostringstream key;
  key << spec.vocab_size_words << '/' << spec.inventory_seed << '/' << spec.frame_size;
  for (const auto& l : langs) key << '/' << l;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key.str()];
  if (!slot) {
    slot = std::make_shared<WordInventory>(spec.vocab_size_words, spec.inventory_seed,
                                           langs, spec.frame_size);
  }
  return slot;
}

SynthMedia::SynthMedia(std::shared_ptr<const WordInventory> inventory, std::string language,
                       std::vector<std::string> words, std::uint64_t seed, double snr_db,
                       double video_corruption)
    : inventory_(std::move(inventory)),
      language_(std::move(language)),
      words_(std::move(words)),
      seed_(seed),
      snr_db_(snr_db),
      video_corruption_(video_corruption) {}

Waveform SynthMedia::Audio() const {
  Waveform wave;
  wave.reserve(words_.size() * kSamplesPerWord);
  for (const auto& w : words_) {
    const auto& sig = inventory_->AudioSignature(language_, w);
    wave.insert(wave.end(), sig.begin(), sig.end());
  }
  if (std::isfinite(snr_db_)) {
    double power = 0;
    for (double v : wave) power += v * v;
    power /= static_cast<double>(wave.size());
    const double sigma = std::sqrt(power / std::pow(10.0, snr_db_ / 10.0));
    Rng rng(DeriveSeed(seed_, HashString("audio-noise")));
    std::normal_distribution<double> nd(0.0, sigma);
    for (double& v : wave) v += nd(rng);
  }
  return wave;
}

VideoClip SynthMedia::Video() const {
  const int size = inventory_->frame_size();
  VideoClip clip;
  clip.frames = static_cast<int>(words_.size()) * kFramesPerWord;
  clip.height = size;
  clip.width = size;
  clip.pixels.reserve(static_cast<std::size_t>(clip.frames) * clip.FrameSize());
  for (const auto& w : words_) {
    const auto& pat = inventory_->VideoPattern(language_, w);
    clip.pixels.insert(clip.pixels.end(), pat.begin(), pat.end());
  }
  if (video_corruption_ > 0) {
    Rng rng(DeriveSeed(seed_, HashString("video-blank")));
    for (int t = 0; t < clip.frames; ++t) {
      if (Uniform01(rng) < video_corruption_) {
        std::fill_n(clip.Frame(t), clip.FrameSize(), 0.0);
      }
    }
  }
  return clip;
}

Manifest GenerateSyntheticCorpus(const SynthCorpusSpec& spec) {
  ValidateSpec(spec);
  auto inventory = InventoryFor(spec);
  const std::string prefix =
      spec.id_prefix.empty() ? spec.source + "-s" + std::to_string(spec.seed) + "-" : spec.id_prefix;
  Manifest m;
  m.name = spec.source;
  m.records.resize(spec.n_samples);
  ParallelFor(static_cast<std::size_t>(spec.n_samples), [&](std::size_t i) {
    const std::uint64_t rseed = DeriveSeed(spec.seed, HashString("record"), i);
    Rng rng(rseed);
    // Language by inverse CDF over the (sorted) mix.
    const double u = Uniform01(rng);
    std::string lang = spec.language_mix.rbegin()->first;
    double acc = 0;
    for (const auto& [l, frac] : spec.language_mix) {
      acc += frac;
      if (u < acc) {
        lang = l;
        break;
      }
    }
    const int n_words = UniformInt(rng, spec.min_words, spec.max_words);
    const auto& vocab = inventory->Words(lang);
    std::vector<std::string> words(n_words);
    std::string transcript;
    for (int w = 0; w < n_words; ++w) {
      words[w] = vocab[UniformInt(rng, 0, static_cast<int>(vocab.size()) - 1)];
      if (w) transcript += ' ';
      transcript += words[w];
    }
    std::ostringstream id;
    id << prefix << std::setw(6) << std::setfill('0') << i;
    SampleRecord& r = m.records[i];
    r.id = id.str();
    r.transcript = std::move(transcript);
    r.language = lang;
    r.duration_s = n_words * kWordSeconds;
    r.source = spec.source;
    r.provenance = LabelProvenance{};
    r.media = std::make_shared<SynthMedia>(inventory, lang, std::move(words), rseed,
                                           spec.audio_snr_db, spec.video_corruption);
  });
  return m;
}

}  // namespace avsr
