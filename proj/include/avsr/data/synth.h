// include/avsr/data/synth.h

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

#ifndef AVSR_DATA_SYNTH_H_
#define AVSR_DATA_SYNTH_H_

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "avsr/data/manifest.h"

namespace avsr {

inline constexpr double kWordSeconds = 0.2;
inline constexpr int kSamplesPerWord = 3200;  // 0.2 s at 16 kHz
inline constexpr int kFramesPerWord = 5;      // 0.2 s at 25 fps

struct SynthCorpusSpec {
  int n_samples = 100;
  int min_words = 3;  // tokens_per_sample range, inclusive
  int max_words = 8;
  int vocab_size_words = 60;  // words per language
  std::uint64_t seed = 0;
  // Word inventory and signatures depend only on this seed, so corpora drawn
  // with different `seed`s share one vocabulary.
  std::uint64_t inventory_seed = 1;
  double audio_snr_db = std::numeric_limits<double>::infinity();
  double video_corruption = 0.0;  // fraction of frames zeroed
  std::map<std::string, double> language_mix{{"eng", 1.0}};
  int frame_size = 32;  // 96 reproduces the full-size mouth ROI geometry
  std::string source = "synth";
  std::string id_prefix;  // default "<source>-s<seed>-"
};

void ValidateSpec(const SynthCorpusSpec& spec);

// Deterministic per-language word lists with one audio signature (a 0.2 s
// multi-tone chirp) and one visual pattern (5 frames of moving blobs) per word.
class WordInventory {
 public:
  WordInventory(int words_per_language, std::uint64_t inventory_seed,
                const std::vector<std::string>& languages, int frame_size);

  const std::vector<std::string>& Words(const std::string& language) const;
  std::vector<std::string> Languages() const;
  int frame_size() const { return frame_size_; }

  const std::vector<double>& AudioSignature(const std::string& language,
                                            const std::string& word) const;
  // kFramesPerWord * frame_size^2 pixels, frame-major.
  const std::vector<double>& VideoPattern(const std::string& language,
                                          const std::string& word) const;

  struct Entry {
    std::string language;
    std::string word;
    const std::vector<double>* audio;
  };
  // Every (language, word) in a stable order.
  const std::vector<Entry>& Entries() const { return entries_; }

 private:
  struct Signatures {
    std::vector<double> audio;
    std::vector<double> video;
  };
  const Signatures& Lookup(const std::string& language, const std::string& word) const;

  int frame_size_;
  std::map<std::string, std::vector<std::string>> words_;
  std::unordered_map<std::string, Signatures> signatures_;
  std::vector<Entry> entries_;
};

// Shared, memoized inventory for a corpus spec.
std::shared_ptr<const WordInventory> InventoryFor(const SynthCorpusSpec& spec);

// Renders a record on demand from its word sequence.
class SynthMedia : public MediaSource {
 public:
  SynthMedia(std::shared_ptr<const WordInventory> inventory, std::string language,
             std::vector<std::string> words, std::uint64_t seed, double snr_db,
             double video_corruption);
  Waveform Audio() const override;
  VideoClip Video() const override;

 private:
  std::shared_ptr<const WordInventory> inventory_;
  std::string language_;
  std::vector<std::string> words_;
  std::uint64_t seed_;
  double snr_db_;
  double video_corruption_;
};

Manifest GenerateSyntheticCorpus(const SynthCorpusSpec& spec);

}  // namespace avsr

#endif  // AVSR_DATA_SYNTH_H_
