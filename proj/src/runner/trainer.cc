// src/runner/trainer.cc

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

#include "avsr/runner/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <optional>

#include <spdlog/spdlog.h>

#include "avsr/base/parallel.h"
#include "avsr/base/random.h"
#include "avsr/runner/checkpoint.h"
#include "avsr/model/ctc.h"
#include "avsr/runner/metrics.h"

namespace avsr {

double LrSchedule(long long step, long long total_steps, long long warmup_steps, double peak) {
  if (warmup_steps >= total_steps) {
    Fail("warmup (", warmup_steps, " steps) must be shorter than training (", total_steps,
         " steps)");
  }
  AVSR_CHECK(warmup_steps >= 0, "warmup_steps must be >= 0");
  AVSR_CHECK(step >= 0 && step <= total_steps, "step ", step, " outside [0, ", total_steps, "]");
  if (step < warmup_steps) return peak * static_cast<double>(step) / warmup_steps;
  const double progress =
      static_cast<double>(step - warmup_steps) / static_cast<double>(total_steps - warmup_steps);
  return peak * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

std::vector<Batch> MakeBatches(const Manifest& m, int max_frames) {
  AVSR_CHECK(max_frames > 0, "max_frames must be > 0");
  std::vector<std::size_t> order(m.records.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> frames(m.records.size());
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    frames[i] = m.records[i].NumFrames();
    if (frames[i] > max_frames) {
      Fail("record ", m.records[i].id, " has ", frames[i], " frames, more than the batch cap of ",
           max_frames);
    }
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (frames[a] != frames[b]) return frames[a] > frames[b];
    return m.records[a].id < m.records[b].id;
  });
  std::vector<Batch> batches;
  for (std::size_t i : order) {
    if (batches.empty() || batches.back().frames + frames[i] > max_frames) batches.emplace_back();
    batches.back().indices.push_back(i);
    batches.back().frames += frames[i];
  }
  return batches;
}

void TrainConfig::Validate() const {
  AVSR_CHECK(epochs >= 1, "epochs must be >= 1");
  AVSR_CHECK(warmup_epochs >= 0 && warmup_epochs < epochs, "warmup_epochs (", warmup_epochs,
             ") must be in [0, epochs)");
  AVSR_CHECK(peak_lr > 0, "peak_lr must be > 0");
  AVSR_CHECK(max_frames_per_batch > 0, "max_frames_per_batch must be > 0");
  AVSR_CHECK(weight_decay >= 0, "weight_decay must be >= 0");
  AVSR_CHECK(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1, "Adam betas must be in [0,1)");
  AVSR_CHECK(adam_eps > 0, "adam_eps must be > 0");
  AVSR_CHECK(noise_bank_s > 0, "noise_bank_s must be > 0");
  time_mask.Validate();
  video_augment.time_mask.Validate();
}

void WriteTrainConfig(const TrainConfig& t, Config& c) {
  c.Set("train.epochs", t.epochs);
  c.Set("train.warmup_epochs", t.warmup_epochs);
  c.Set("train.peak_lr", t.peak_lr);
  c.Set("train.max_frames_per_batch", t.max_frames_per_batch);
  c.Set("train.weight_decay", t.weight_decay);
  c.Set("train.beta1", t.beta1);
  c.Set("train.beta2", t.beta2);
  c.Set("train.adam_eps", t.adam_eps);
  c.Set("train.seed", t.seed);
  c.Set("train.augment", t.augment);
  c.Set("train.masks_per_second", t.time_mask.masks_per_second);
  c.Set("train.max_mask_s", t.time_mask.max_mask_s);
  c.Set("train.mask_fill", ToString(t.time_mask.fill));
  c.Set("train.flip_prob", t.video_augment.flip_prob);
  c.Set("train.crop_size", t.video_augment.crop_size);
  c.Set("train.noise", t.noise);
  c.Set("train.noise_bank_s", t.noise_bank_s);
  c.Set("train.video_stats_from_pool", t.video_stats_from_pool);
}

TrainConfig ReadTrainConfig(const Config& c, TrainConfig t) {
  t.epochs = c.GetInt("train.epochs", t.epochs);
  t.warmup_epochs = c.GetInt("train.warmup_epochs", t.warmup_epochs);
  t.peak_lr = c.GetDouble("train.peak_lr", t.peak_lr);
  t.max_frames_per_batch = c.GetInt("train.max_frames_per_batch", t.max_frames_per_batch);
  t.weight_decay = c.GetDouble("train.weight_decay", t.weight_decay);
  t.beta1 = c.GetDouble("train.beta1", t.beta1);
  t.beta2 = c.GetDouble("train.beta2", t.beta2);
  t.adam_eps = c.GetDouble("train.adam_eps", t.adam_eps);
  t.seed = c.GetU64("train.seed", t.seed);
  t.augment = c.GetBool("train.augment", t.augment);
  t.time_mask.masks_per_second = c.GetDouble("train.masks_per_second", t.time_mask.masks_per_second);
  t.time_mask.max_mask_s = c.GetDouble("train.max_mask_s", t.time_mask.max_mask_s);
  if (c.Has("train.mask_fill")) t.time_mask.fill = ParseMaskFill(c.GetString("train.mask_fill", ""));
  t.video_augment.time_mask = t.time_mask;
  t.video_augment.flip_prob = c.GetDouble("train.flip_prob", t.video_augment.flip_prob);
  t.video_augment.crop_size = c.GetInt("train.crop_size", t.video_augment.crop_size);
  t.noise = c.GetBool("train.noise", t.noise);
  t.noise_bank_s = c.GetDouble("train.noise_bank_s", t.noise_bank_s);
  t.video_stats_from_pool = c.GetBool("train.video_stats_from_pool", t.video_stats_from_pool);
  t.Validate();
  return t;
}

AdamW::AdamW(nn::ParamStore& store, const TrainConfig& cfg)
    : params_(store.All()),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      eps_(cfg.adam_eps),
      weight_decay_(cfg.weight_decay) {
  for (auto* p : params_) {
    m_.emplace_back(p->value.Shape());
    v_.emplace_back(p->value.Shape());
  }
}

void AdamW::Step(double lr) {
  ++step_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ad::Parameter* p = params_[i];
    if (p->grad.Size() != p->value.Size()) continue;
    double* w = p->value.Data();
    const double* g = p->grad.Data();
    double* m = m_[i].Data();
    double* v = v_[i].Data();
    const double decay = p->value.Rank() >= 2 ? weight_decay_ : 0.0;
    for (std::size_t k = 0; k < p->value.Size(); ++k) {
      m[k] = beta1_ * m[k] + (1 - beta1_) * g[k];
      v[k] = beta2_ * v[k] + (1 - beta2_) * g[k] * g[k];
      w[k] -= lr * ((m[k] / c1) / (std::sqrt(v[k] / c2) + eps_) + decay * w[k]);
    }
  }
}

namespace {

struct Prepared {
  Waveform audio;
  VideoClip video;
};

bool UsesAudio(Modality m) { return m != Modality::kVideo; }
bool UsesVideo(Modality m) { return m != Modality::kAudio; }

}  // namespace

TrainResult Train(const Manifest& pool, const Vocabulary& vocab, ModelConfig model_cfg,
                  const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.Validate();
  const auto t_start = std::chrono::steady_clock::now();
  Manifest usable;
  usable.name = pool.name;
  usable.base_dir = pool.base_dir;
  for (const auto& r : pool.records) {
    if (!SplitWords(r.transcript).empty()) usable.records.push_back(r);
  }
  if (usable.records.size() != pool.records.size()) {
    spdlog::warn("skipping {} records with empty transcripts",
                 pool.records.size() - usable.records.size());
  }
  if (usable.records.empty()) Fail("training pool has no usable records");
  model_cfg.vocab_size = vocab.size();
  const Modality modality = model_cfg.modality;
  if (UsesVideo(modality) && cfg.video_stats_from_pool) {
    model_cfg.video_stats = ComputeVideoStats(usable);
  }
  TrainResult result;
  result.model = std::make_unique<AvsrModel>(model_cfg);
  AvsrModel& model = *result.model;

  const std::vector<Batch> batches = MakeBatches(usable, cfg.max_frames_per_batch);
  std::vector<TokenSequence> targets(usable.records.size());
  ParallelFor(usable.records.size(),
              [&](std::size_t i) { targets[i] = vocab.Encode(usable.records[i].transcript); });

  std::optional<TrainingNoisePolicy> noise;
  if (cfg.noise && UsesAudio(modality)) {
    noise = TrainingNoisePolicy::FromCorpus(usable, cfg.noise_bank_s,
                                            DeriveSeed(cfg.seed, HashString("babble-bank")));
  }

  const long long per_epoch = static_cast<long long>(batches.size());
  const long long total_steps = per_epoch * cfg.epochs;
  const long long warmup_steps = per_epoch * cfg.warmup_epochs;
  AdamW opt(model.params(), cfg);
  spdlog::info("training {} on {} records ({:.3f} h), {} batches/epoch, {} parameters",
               ModalityCode(modality), usable.records.size(), TotalHours(usable), per_epoch,
               model.params().NumValues());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t_epoch = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(batches.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(cfg.seed, HashString("batch-order"), epoch));
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    for (std::size_t b : order) {
      const Batch& batch = batches[b];
      std::vector<Prepared> inputs(batch.indices.size());
      ParallelFor(batch.indices.size(), [&](std::size_t j) {
        const SampleRecord& r = usable.records[batch.indices[j]];
        const std::uint64_t seed = DeriveSeed(cfg.seed, HashString(r.id), epoch);
        Prepared& in = inputs[j];
        if (UsesAudio(modality)) {
          in.audio = LoadAudio(r, usable.base_dir);
          if (noise) in.audio = noise->Apply(in.audio, DeriveSeed(seed, HashString("noise")));
          in.audio = AugmentAudio(in.audio, cfg.time_mask, cfg.augment, seed);
        }
        if (UsesVideo(modality)) {
          in.video = AugmentVideo(LoadVideo(r, usable.base_dir), cfg.video_augment, cfg.augment,
                                  seed);
        }
      });
      model.params().ZeroGrad();
      int used = 0;
      double sum = 0, sum_ctc = 0, sum_att = 0;
      for (std::size_t j = 0; j < batch.indices.size(); ++j) {
        const SampleRecord& r = usable.records[batch.indices[j]];
        const TokenSequence& y = targets[batch.indices[j]];
        int frames = std::numeric_limits<int>::max();
        if (UsesAudio(modality)) {
          frames = static_cast<int>(inputs[j].audio.size() / kSamplesPerFrame);
        }
        if (UsesVideo(modality)) frames = std::min(frames, inputs[j].video.frames);
        if (CtcMinFrames(y) > frames) {
          ++stats.skipped;
          continue;
        }
        ad::Tape tape;
        const LossParts parts =
            model.Loss(tape, UsesAudio(modality) ? &inputs[j].audio : nullptr,
                       UsesVideo(modality) ? &inputs[j].video : nullptr, y);
        const double loss = parts.total.value()[0];
        if (!std::isfinite(loss)) {
          if (!hooks.divergence_checkpoint.empty()) {
            Config meta;
            meta.Set("meta.status", std::string("diverged"));
            meta.Set("meta.epoch", epoch);
            SaveCheckpoint(MakeCheckpoint(model, vocab, meta), hooks.divergence_checkpoint);
          }
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                " on record " + r.id +
                                (hooks.divergence_checkpoint.empty()
                                     ? std::string()
                                     : "; last finite state saved to " +
                                           hooks.divergence_checkpoint));
        }
        tape.Backward(parts.total);
        ++used;
        sum += loss;
        sum_ctc += parts.ctc.value()[0];
        sum_att += parts.attention.value()[0];
      }
      if (used == 0) continue;
      bool finite = true;
      for (auto* p : model.params().All()) {
        for (double& g : p->grad.Vec()) {
          g /= used;
          finite &= std::isfinite(g);
        }
      }
      if (!finite) {
        if (!hooks.divergence_checkpoint.empty()) {
          SaveCheckpoint(MakeCheckpoint(model, vocab), hooks.divergence_checkpoint);
        }
        throw DivergenceError("non-finite gradient at epoch " + std::to_string(epoch + 1));
      }
      opt.Step(LrSchedule(opt.steps() + 1, total_steps, warmup_steps, cfg.peak_lr));
      stats.records += used;
      stats.loss += sum;
      stats.ctc += sum_ctc;
      stats.attention += sum_att;
      ++stats.steps;
    }
    if (stats.records > 0) {
      stats.loss /= stats.records;
      stats.ctc /= stats.records;
      stats.attention /= stats.records;
    }
    stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_epoch).count();
    spdlog::info("epoch {}/{}: loss {:.4f} (ctc {:.4f}, att {:.4f}), {} records, {:.1f} s",
                 epoch + 1, cfg.epochs, stats.loss, stats.ctc, stats.attention, stats.records,
                 stats.seconds);
    if (stats.skipped > 0) {
      spdlog::warn("epoch {}: {} records skipped (target longer than the frames allow)",
                   epoch + 1, stats.skipped);
    }
    result.epochs.push_back(stats);
    if (hooks.on_epoch) hooks.on_epoch(epoch, stats);
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

}  // namespace avsr
