// include/avsr/model/avsr_model.h

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

#ifndef AVSR_MODEL_AVSR_MODEL_H_
#define AVSR_MODEL_AVSR_MODEL_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "avsr/frontend/frontend.h"
#include "avsr/model/conformer.h"
#include "avsr/model/decoder.h"
#include "avsr/model/fusion.h"
#include "avsr/model/losses.h"
#include "avsr/model/search.h"

namespace avsr {

// kAudio = A (ASR), kVideo = V (VSR), kFused = A+V (AV-ASR).
Modality ParseModality(const std::string& s);
std::string ModalityCode(Modality m);  // "A", "V", "AV"

struct ModelConfig {
  Modality modality = Modality::kAudio;
  FrontendConfig frontend;
  EncoderConfig encoder;
  FusionConfig fusion;
  DecoderConfig decoder;
  JointLossConfig loss;
  int vocab_size = 256;
  VideoStats video_stats;
  std::uint64_t init_seed = 0;

  void Validate() const;
};

struct LossParts {
  ad::Var total, ctc, attention;
};

// Front-ends, per-modality Conformer encoders, optional MLP fusion, CTC head
// and Transformer decoder.
class AvsrModel {
 public:
  explicit AvsrModel(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  nn::ParamStore& params() { return *store_; }
  const nn::ParamStore& params() const { return *store_; }

  // Normalizes the raw inputs, runs the front-ends and encoders and fuses.
  // Inputs the modality does not use may be null.
  FeatureSequence Encode(ad::Tape& t, const Waveform* audio, const VideoClip* video) const;
  ad::Var CtcLogProbs(ad::Tape& t, const FeatureSequence& encoded) const;
  ad::Var DecoderLogits(ad::Tape& t, const TokenSequence& inputs, ad::Var memory) const;

  LossParts Loss(ad::Tape& t, const Waveform* audio, const VideoClip* video,
                 const TokenSequence& target) const;

  std::vector<Hypothesis> Decode(const Waveform* audio, const VideoClip* video,
                                 const DecodeConfig& cfg, const LanguageModel* lm = nullptr) const;

 private:
  ModelConfig cfg_;
  std::unique_ptr<nn::ParamStore> store_;
  std::optional<AudioFrontend> audio_frontend_;
  std::optional<VideoFrontend> video_frontend_;
  std::optional<ConformerEncoder> audio_encoder_, video_encoder_;
  std::optional<FusionMlp> fusion_;
  nn::Linear ctc_head_;
  TransformerDecoder decoder_;
};

// Attention scorer backed by a model's decoder and a fixed encoder output.
class ModelAttentionScorer : public AttentionScorer {
 public:
  ModelAttentionScorer(const AvsrModel& model, Tensor memory)
      : model_(model), memory_(std::move(memory)) {}
  std::vector<double> NextLogProbs(const TokenSequence& prefix) const override;
  int vocab_size() const override { return model_.config().vocab_size; }

 private:
  const AvsrModel& model_;
  Tensor memory_;
};

}  // namespace avsr

#endif  // AVSR_MODEL_AVSR_MODEL_H_
