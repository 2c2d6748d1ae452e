// include/avsr/pseudo_label/pseudo_label.h

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

#ifndef AVSR_PSEUDO_LABEL_PSEUDO_LABEL_H_
#define AVSR_PSEUDO_LABEL_PSEUDO_LABEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "avsr/data/manifest.h"
#include "avsr/data/synth.h"

namespace avsr {

// Anything that maps audio to text. Implementations must be safe to call
// concurrently; Transcribe may throw to signal a per-record failure.
class Transcriber {
 public:
  virtual ~Transcriber() = default;
  virtual std::string id() const = 0;
  virtual std::string Transcribe(const Waveform& wave) const = 0;
};

// Nearest-signature recognizer for synthetic audio: each 0.2 s chunk is
// assigned the inventory word whose signature has the highest normalized
// correlation with it.
class SignatureRecognizer {
 public:
  explicit SignatureRecognizer(std::shared_ptr<const WordInventory> inventory);

  struct Word {
    std::string language;
    std::string text;
  };
  std::vector<Word> Recognize(const Waveform& wave) const;
  const WordInventory& inventory() const { return *inventory_; }

 private:
  std::shared_ptr<const WordInventory> inventory_;
  std::vector<double> inv_norms_;
};

struct EditMix {
  double substitution = 0.70;
  double insertion = 0.15;
  double deletion = 0.15;
};

// Simulated transcriber of known quality: recognizes the synthetic audio
// exactly, then applies word edits so that the expected WER equals
// target_wer. The edit stream is seeded from (seed, audio content), so the
// output is a pure function of the waveform.
class CorruptionOracle : public Transcriber {
 public:
  CorruptionOracle(std::shared_ptr<const WordInventory> inventory, double target_wer,
                   EditMix mix = {}, std::uint64_t seed = 0);

  std::string id() const override;
  std::string Transcribe(const Waveform& wave) const override;
  double target_wer() const { return target_wer_; }

 private:
  SignatureRecognizer recognizer_;
  double target_wer_;
  EditMix mix_;
  std::uint64_t seed_;
};

struct LanguageGuess {
  std::string language;
  double confidence = 0.0;
};

class LanguageFilter {
 public:
  virtual ~LanguageFilter() = default;
  virtual LanguageGuess Classify(const SampleRecord& record) const = 0;
};

// Reads the generator's language tag; confidence is a fixed value (1 by
// default) so threshold behaviour can be exercised.
class OracleLanguageFilter : public LanguageFilter {
 public:
  explicit OracleLanguageFilter(double confidence = 1.0) : confidence_(confidence) {}
  LanguageGuess Classify(const SampleRecord& record) const override {
    return {record.language, confidence_};
  }

 private:
  double confidence_;
};

struct AutoLabelStats {
  std::size_t labelled = 0;
  std::vector<std::string> dropped_ids;
};

// Replaces every transcript by the transcriber output and marks provenance
// auto. Records whose transcription throws are dropped (and logged).
Manifest AutoLabel(const Manifest& m, const Transcriber& t,
                   AutoLabelStats* stats = nullptr);

Manifest FilterLanguage(const Manifest& m, const LanguageFilter& f,
                        const std::string& keep, double min_conf);

struct PoolOptions {
  std::string keep_language = "eng";
  double min_conf = 0.0;
  double fraction = 1.0;
  std::uint64_t seed = 0;
};

struct TrainingPool {
  Manifest pool;
  PoolStats stats;
};

// labelled + subset(auto_label(filter(concat(unlabelled)))).
TrainingPool BuildTrainingPool(const Manifest& labelled,
                               const std::vector<Manifest>& unlabelled,
                               const Transcriber& t, const LanguageFilter& f,
                               const PoolOptions& opts);

// Parses "oracle:wer=0.1[,sub=0.7,ins=0.15,del=0.15,seed=3]".
std::unique_ptr<Transcriber> MakeTranscriber(
    const std::string& spec, std::shared_ptr<const WordInventory> inventory);

std::string PoolStatsJson(const PoolStats& stats);

}  // namespace avsr

#endif  // AVSR_PSEUDO_LABEL_PSEUDO_LABEL_H_
