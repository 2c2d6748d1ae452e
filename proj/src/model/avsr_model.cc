// src/model/avsr_model.cc

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

#include "avsr/model/avsr_model.h"

#include "avsr/base/error.h"
#include "avsr/model/ctc.h"

namespace avsr {

Modality ParseModality(const std::string& s) {
  if (s == "A" || s == "a" || s == "audio") return Modality::kAudio;
  if (s == "V" || s == "v" || s == "video") return Modality::kVideo;
  if (s == "AV" || s == "av" || s == "A+V" || s == "fused") return Modality::kFused;
  Fail("unknown modality '", s, "' (expected A, V or AV)");
}

std::string ModalityCode(Modality m) {
  switch (m) {
    case Modality::kAudio: return "A";
    case Modality::kVideo: return "V";
    case Modality::kFused: return "AV";
  }
  return "?";
}

void ModelConfig::Validate() const {
  frontend.Validate();
  encoder.Validate();
  loss.Validate();
  AVSR_CHECK(frontend.encoder_dim == encoder.dim, "front-end width ", frontend.encoder_dim,
             " != encoder width ", encoder.dim);
  AVSR_CHECK(decoder.dim == encoder.dim, "decoder width ", decoder.dim, " != encoder width ",
             encoder.dim);
  if (modality == Modality::kFused) {
    AVSR_CHECK(fusion.output == encoder.dim, "fusion output ", fusion.output,
               " != encoder width ", encoder.dim);
  }
  AVSR_CHECK(vocab_size > kNumReserved, "vocab_size must exceed the reserved ids");
  AVSR_CHECK(video_stats.stddev > 0, "video stddev must be > 0");
}

AvsrModel::AvsrModel(const ModelConfig& cfg)
    : cfg_(cfg), store_(std::make_unique<nn::ParamStore>(cfg.init_seed)) {
  cfg.Validate();
  nn::ParamStore& s = *store_;
  const bool audio = cfg.modality != Modality::kVideo;
  const bool video = cfg.modality != Modality::kAudio;
  if (audio) {
    audio_frontend_.emplace(s, "audio_frontend", cfg.frontend);
    audio_encoder_.emplace(s, "audio_encoder", cfg.encoder);
  }
  if (video) {
    video_frontend_.emplace(s, "video_frontend", cfg.frontend);
    video_encoder_.emplace(s, "video_encoder", cfg.encoder);
  }
  if (audio && video) fusion_.emplace(s, "fusion", cfg.encoder.dim, cfg.fusion);
  ctc_head_ = nn::Linear(s, "ctc", cfg.encoder.dim, cfg.vocab_size);
  decoder_ = TransformerDecoder(s, "decoder", cfg.decoder, cfg.vocab_size);
}

FeatureSequence AvsrModel::Encode(ad::Tape& t, const Waveform* audio,
                                  const VideoClip* video) const {
  std::optional<FeatureSequence> a, v;
  if (audio_frontend_) {
    AVSR_CHECK(audio != nullptr, "modality ", ModalityCode(cfg_.modality), " needs audio");
    a = (*audio_encoder_)(t, (*audio_frontend_)(t, PreprocessAudio(*audio)));
  }
  if (video_frontend_) {
    AVSR_CHECK(video != nullptr, "modality ", ModalityCode(cfg_.modality), " needs video");
    v = (*video_encoder_)(t, (*video_frontend_)(t, PreprocessVideo(*video, cfg_.video_stats)));
  }
  if (a && v) return (*fusion_)(t, *a, *v);
  return a ? *a : *v;
}

ad::Var AvsrModel::CtcLogProbs(ad::Tape& t, const FeatureSequence& encoded) const {
  return ad::LogSoftmax(ctc_head_(t, encoded.frames));
}

ad::Var AvsrModel::DecoderLogits(ad::Tape& t, const TokenSequence& inputs,
                                 ad::Var memory) const {
  return decoder_(t, inputs, memory);
}

LossParts AvsrModel::Loss(ad::Tape& t, const Waveform* audio, const VideoClip* video,
                          const TokenSequence& target) const {
  AVSR_CHECK(!target.empty(), "empty target sequence");
  const FeatureSequence enc = Encode(t, audio, video);
  LossParts out;
  out.ctc = CtcLoss(CtcLogProbs(t, enc), target);
  TokenSequence in{kSosId}, out_ids = target;
  in.insert(in.end(), target.begin(), target.end());
  out_ids.push_back(kEosId);
  out.attention = LabelSmoothedCrossEntropy(decoder_(t, in, enc.frames), out_ids,
                                            cfg_.loss.label_smoothing);
  out.total = JointLoss(out.ctc, out.attention, cfg_.loss);
  return out;
}

std::vector<Hypothesis> AvsrModel::Decode(const Waveform* audio, const VideoClip* video,
                                          const DecodeConfig& dc,
                                          const LanguageModel* lm) const {
  ad::Tape t(false);
  const FeatureSequence enc = Encode(t, audio, video);
  const Tensor ctc_lp = CtcLogProbs(t, enc).value();
  ModelAttentionScorer scorer(*this, enc.frames.value());
  if (dc.beam == 1) {
    return {GreedySearch(scorer, &ctc_lp, lm, dc, enc.length())};
  }
  return BeamSearch(scorer, &ctc_lp, lm, dc, enc.length());
}

std::vector<double> ModelAttentionScorer::NextLogProbs(const TokenSequence& prefix) const {
  ad::Tape t(false);
  TokenSequence in{kSosId};
  in.insert(in.end(), prefix.begin(), prefix.end());
  ad::Var logits = model_.DecoderLogits(t, in, t.Constant(memory_));
  const ad::Var lp = ad::LogSoftmax(ad::SliceRows(logits, logits.rows() - 1, 1));
  return lp.value().Vec();
}

}  // namespace avsr
