// include/avsr/runner/trainer.h

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

#ifndef AVSR_RUNNER_TRAINER_H_
#define AVSR_RUNNER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "avsr/augment/augment.h"
#include "avsr/base/error.h"
#include "avsr/data/manifest.h"
#include "avsr/model/avsr_model.h"
#include "avsr/runner/config.h"
#include "avsr/tokenizer/bpe.h"

namespace avsr {

// Linear warmup from 0 to peak over warmup_steps, then cosine decay to 0 at
// total_steps.
double LrSchedule(long long step, long long total_steps, long long warmup_steps, double peak);

struct Batch {
  std::vector<std::size_t> indices;  // into the manifest
  int frames = 0;
};

// Sorts by frame count (longest first, ties by id) and packs greedily so that
// no batch exceeds max_frames. Every record lands in exactly one batch.
std::vector<Batch> MakeBatches(const Manifest& m, int max_frames);

struct TrainConfig {
  int epochs = 10;
  int warmup_epochs = 1;
  double peak_lr = 1e-3;
  int max_frames_per_batch = 1800;
  double weight_decay = 0.03;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-9;
  std::uint64_t seed = 0;
  bool augment = true;
  TimeMaskConfig time_mask;
  VideoAugmentConfig video_augment;
  // Babble mixed into the audio at a level drawn from TrainingSnrLevels().
  bool noise = false;
  double noise_bank_s = 60.0;
  // Recompute the video normalization statistics from the training pool.
  bool video_stats_from_pool = true;

  void Validate() const;
};

void WriteTrainConfig(const TrainConfig& t, Config& c);
TrainConfig ReadTrainConfig(const Config& c, TrainConfig base = {});

struct EpochStats {
  double loss = 0.0;  // mean per-record joint loss
  double ctc = 0.0;
  double attention = 0.0;
  int records = 0;
  int skipped = 0;  // records whose CTC target cannot fit the frames
  int steps = 0;
  double seconds = 0.0;
};

struct TrainResult {
  std::unique_ptr<AvsrModel> model;
  std::vector<EpochStats> epochs;
  double seconds = 0.0;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

struct TrainHooks {
  std::function<void(int epoch, const EpochStats&)> on_epoch;
  // Where the last finite state is written if the loss turns NaN.
  std::string divergence_checkpoint;
};

// Trains a fresh model. Records with empty transcripts are skipped.
TrainResult Train(const Manifest& pool, const Vocabulary& vocab, ModelConfig model_cfg,
                  const TrainConfig& cfg, const TrainHooks& hooks = {});

// One AdamW update over every parameter with a gradient; weight decay is
// decoupled and applied to matrices only.
class AdamW {
 public:
  AdamW(nn::ParamStore& store, const TrainConfig& cfg);
  void Step(double lr);
  long long steps() const { return step_; }

 private:
  std::vector<ad::Parameter*> params_;
  std::vector<Tensor> m_, v_;
  double beta1_, beta2_, eps_, weight_decay_;
  long long step_ = 0;
};

}  // namespace avsr

#endif  // AVSR_RUNNER_TRAINER_H_
