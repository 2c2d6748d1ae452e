// include/avsr/runner/experiment.h

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

#ifndef AVSR_RUNNER_EXPERIMENT_H_
#define AVSR_RUNNER_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "avsr/augment/augment.h"
#include "avsr/data/synth.h"
#include "avsr/pseudo_label/pseudo_label.h"
#include "avsr/runner/config.h"
#include "avsr/runner/evaluate.h"
#include "avsr/runner/trainer.h"

namespace avsr {

// Synthetic stand-in for the labelled / unlabelled / test split. Records
// have a fixed number of words so the hour totals are exact.
struct CorpusConfig {
  double labelled_hours = 2.0;
  double unlabelled_hours = 6.0;  // in the kept language
  // Unlabelled material in other languages, removed by the language filter.
  double other_language_hours = 1.0;
  int eval_records = 200;
  int words_per_record = 5;
  int vocab_size_words = 60;
  int frame_size = 32;
  std::string language = "eng";
  std::string other_language = "deu";
  std::uint64_t seed = 0;
  std::uint64_t inventory_seed = 1;

  void Validate() const;
  int RecordsFor(double hours) const;
};

void WriteCorpusConfig(const CorpusConfig& c, Config& out);
CorpusConfig ReadCorpusConfig(const Config& c, CorpusConfig base = {});

struct DeskCorpus {
  Manifest labelled;    // human transcripts
  Manifest unlabelled;  // transcripts are the hidden ground truth
  Manifest eval;
  std::shared_ptr<const WordInventory> inventory;  // every language
};

DeskCorpus GenerateDeskCorpus(const CorpusConfig& c);
// The word inventory of every language in the corpus.
std::shared_ptr<const WordInventory> DeskInventory(const CorpusConfig& c);

// Every setting of a desk experiment. Keys in config files:
// corpus.*, model.*, train.*, decode.*, and the experiment.* keys below.
struct ExperimentConfig {
  CorpusConfig corpus;
  ModelConfig model;
  TrainConfig train;
  DecodeConfig decode{.beam = 1};
  int vocab_size = 256;
  std::string transcriber = "oracle:wer=0.1";
  PoolOptions pool;
  std::vector<double> fractions = {0.0, 0.5, 1.0};
  std::vector<double> corruption_levels = {0.0, 0.1, 0.3};
  Modality scaling_modality = Modality::kVideo;
  Modality transcriber_modality = Modality::kAudio;
  // Extra-data fraction of the pool used to train the noise-robust models.
  double noise_fraction = 1.0;
  std::vector<NoiseKind> eval_noises = {NoiseKind::kWhite, NoiseKind::kPink};
  std::vector<double> snr_grid = EvalSnrGrid();
  std::uint64_t seed = 0;
};

Config ExperimentToConfig(const ExperimentConfig& e);
// Unknown keys are an error.
ExperimentConfig ExperimentFromConfig(const Config& c, ExperimentConfig base = {});

struct RunReport {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Config config;
  // Per trained model: label -> per-epoch mean training loss.
  std::map<std::string, std::vector<double>> loss_curves;
  double seconds = 0.0;

  std::string Csv() const;
  std::string Markdown() const;
  // Writes <stem>.csv and <stem>.md.
  void Write(const std::string& stem) const;
};

// Percent with two decimals.
std::string Percent(double fraction);

enum class AblationKind { kScaling, kTranscriber, kNoise };
AblationKind ParseAblationKind(const std::string& s);
std::string ToString(AblationKind kind);

struct ScalingRow {
  double fraction;
  PoolStats stats;
  double wer;
};
struct TranscriberRow {
  double corruption;
  double label_wer;  // of the auto transcripts against the hidden truth
  PoolStats stats;
  double wer;
};
struct NoiseRow {
  NoiseKind kind;
  double snr_db;
  double wer_audio;
  double wer_fused;
};

struct AblationResult {
  RunReport report;
  std::vector<ScalingRow> scaling;
  std::vector<TranscriberRow> transcriber;
  std::vector<NoiseRow> noise;
};

// Called after each model is trained; `label` names the run.
using ModelCallback = std::function<void(const std::string& label, const AvsrModel&)>;

AblationResult RunAblation(AblationKind kind, const ExperimentConfig& cfg,
                           const ModelCallback& on_model = {});

// Shared pieces, also used by the command-line verbs.
Vocabulary TrainDeskVocabulary(const DeskCorpus& corpus, int size);
TrainingPool BuildDeskPool(const DeskCorpus& corpus, const std::string& transcriber,
                           const PoolOptions& opts);
// WER of the auto transcripts in `pool` against the hidden truth in `truth`.
double LabelWer(const Manifest& pool, const Manifest& truth);

}  // namespace avsr

#endif  // AVSR_RUNNER_EXPERIMENT_H_
