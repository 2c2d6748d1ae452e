// include/avsr/frontend/frontend.h

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

#ifndef AVSR_FRONTEND_FRONTEND_H_
#define AVSR_FRONTEND_FRONTEND_H_

#include <string>
#include <vector>

#include "avsr/data/manifest.h"
#include "avsr/nn/layers.h"

namespace avsr {

enum class Modality { kAudio, kVideo, kFused };
std::string ToString(Modality m);

// Time-major [T x D] features at 25 frames per second.
struct FeatureSequence {
  static constexpr int kRateHz = 25;
  ad::Var frames;
  Modality modality = Modality::kAudio;
  int length() const { return frames.rows(); }
  int dim() const { return frames.cols(); }
};

// Per-utterance z-normalization. A constant input (variance below eps) comes
// back as zeros and is logged.
Waveform PreprocessAudio(const Waveform& wave, double eps = 1e-8);

struct VideoStats {
  double mean = 0.0;
  double stddev = 1.0;
};

// Pixel mean and standard deviation over every frame of the manifest.
// Throws when the deviation is zero.
VideoStats ComputeVideoStats(const Manifest& m);
VideoClip PreprocessVideo(const VideoClip& clip, const VideoStats& stats);

struct FrontendConfig {
  int encoder_dim = 64;
  // Audio: strided 1D convolutions; entry 0 is the stem. The product of the
  // strides must be 640 (16 kHz in, 25 Hz out).
  std::vector<int> audio_channels = {16, 32, 32};
  std::vector<int> audio_kernels = {80, 8, 8};
  std::vector<int> audio_strides = {40, 4, 4};
  int audio_blocks = 1;  // residual blocks after each strided layer
  // Video: 5x7x7 stem (stride 1x2x2), 2x2 pooling, then residual stages with
  // spatial stride 2 from the second stage on.
  int video_stem_channels = 8;
  std::vector<int> video_stage_channels = {8, 16};
  int video_blocks = 1;

  void Validate() const;
};

inline constexpr int kMinVideoSide = 7;
inline constexpr int kMinAudioSamples = kSamplesPerFrame;

class AudioFrontend {
 public:
  AudioFrontend() = default;
  AudioFrontend(nn::ParamStore& store, const std::string& name, const FrontendConfig& cfg);
  // `wave` is [n x 1]; output has floor(n / 640) frames.
  FeatureSequence operator()(ad::Tape& t, ad::Var wave) const;
  FeatureSequence operator()(ad::Tape& t, const Waveform& wave) const;

 private:
  struct Block {
    nn::Conv a, b;
  };
  std::vector<nn::Conv> strided_;
  std::vector<std::vector<Block>> blocks_;
  nn::Linear proj_;
};

class VideoFrontend {
 public:
  VideoFrontend() = default;
  VideoFrontend(nn::ParamStore& store, const std::string& name, const FrontendConfig& cfg);
  // `frames` is [T x H x W x 1]; output has T frames.
  FeatureSequence operator()(ad::Tape& t, ad::Var frames) const;
  FeatureSequence operator()(ad::Tape& t, const VideoClip& clip) const;

 private:
  struct Block {
    nn::Conv a, b;
    nn::Conv shortcut;  // only when shape changes
    bool project = false;
  };
  nn::Conv stem_;
  std::vector<Block> blocks_;
  nn::Linear proj_;
};

}  // namespace avsr

#endif  // AVSR_FRONTEND_FRONTEND_H_
