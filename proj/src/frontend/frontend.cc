// src/frontend/frontend.cc

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

#include "avsr/frontend/frontend.h"

#include <cmath>

#include <spdlog/spdlog.h>

#include "avsr/base/error.h"

namespace avsr {

std::string ToString(Modality m) {
  switch (m) {
    case Modality::kAudio: return "audio";
    case Modality::kVideo: return "video";
    case Modality::kFused: return "fused";
  }
  return "?";
}

Waveform PreprocessAudio(const Waveform& wave, double eps) {
  AVSR_CHECK(!wave.empty(), "cannot normalize an empty waveform");
  const double n = static_cast<double>(wave.size());
  double mean = 0;
  for (double v : wave) mean += v;
  mean /= n;
  double var = 0;
  for (double v : wave) var += (v - mean) * (v - mean);
  var /= n;
  Waveform out(wave.size(), 0.0);
  if (var < eps) {
    spdlog::warn("constant waveform of {} samples normalized to zeros", wave.size());
    return out;
  }
  const double inv = 1.0 / std::sqrt(var);
  for (std::size_t i = 0; i < wave.size(); ++i) out[i] = (wave[i] - mean) * inv;
  return out;
}

VideoStats ComputeVideoStats(const Manifest& m) {
  AVSR_CHECK(!m.empty(), "cannot compute video statistics of an empty manifest");
  // Two passes in long double keep the variance exact enough to reproduce.
  long double sum = 0, count = 0;
  for (const auto& r : m.records) {
    const VideoClip c = LoadVideo(r, m.base_dir);
    for (double v : c.pixels) sum += v;
    count += c.pixels.size();
  }
  AVSR_CHECK(count > 0, "manifest has no video pixels");
  const long double mean = sum / count;
  long double sq = 0;
  for (const auto& r : m.records) {
    const VideoClip c = LoadVideo(r, m.base_dir);
    for (double v : c.pixels) sq += (v - mean) * (v - mean);
  }
  VideoStats s;
  s.mean = static_cast<double>(mean);
  s.stddev = static_cast<double>(std::sqrt(sq / count));
  if (!(s.stddev > 0)) Fail("video pixel standard deviation is zero; cannot normalize");
  return s;
}

VideoClip PreprocessVideo(const VideoClip& clip, const VideoStats& stats) {
  AVSR_CHECK(stats.stddev > 0, "video stddev must be > 0");
  VideoClip out = clip;
  const double inv = 1.0 / stats.stddev;
  for (double& v : out.pixels) v = (v - stats.mean) * inv;
  return out;
}

void FrontendConfig::Validate() const {
  AVSR_CHECK(encoder_dim > 0, "encoder_dim must be > 0");
  AVSR_CHECK(!audio_strides.empty(), "audio front-end needs at least one layer");
  AVSR_CHECK(audio_channels.size() == audio_strides.size() &&
                 audio_kernels.size() == audio_strides.size(),
             "audio channels/kernels/strides lengths differ");
  long product = 1;
  for (std::size_t i = 0; i < audio_strides.size(); ++i) {
    AVSR_CHECK(audio_strides[i] >= 1 && audio_kernels[i] >= audio_strides[i],
               "audio layer ", i, ": need kernel >= stride >= 1");
    AVSR_CHECK(audio_channels[i] > 0, "audio layer ", i, ": channels must be > 0");
    product *= audio_strides[i];
  }
  AVSR_CHECK(product == kSamplesPerFrame, "audio stride product is ", product,
             ", must be ", kSamplesPerFrame);
  AVSR_CHECK(audio_blocks >= 0 && video_blocks >= 0, "block counts must be >= 0");
  AVSR_CHECK(video_stem_channels > 0, "video stem channels must be > 0");
  for (int c : video_stage_channels) AVSR_CHECK(c > 0, "video stage channels must be > 0");
}

namespace {

ad::UnfoldSpec TimeConv(int k, int s) {
  ad::UnfoldSpec u;
  u.kt = k;
  u.st = s;
  u.pad_t0 = (k - s) / 2;
  u.pad_t1 = k - s - u.pad_t0;
  return u;
}

ad::UnfoldSpec SpatialConv(int k, int s) {
  ad::UnfoldSpec u;
  u.kh = u.kw = k;
  u.sh = u.sw = s;
  u.pad_h0 = u.pad_h1 = u.pad_w0 = u.pad_w1 = k / 2;
  return u;
}

}  // namespace

AudioFrontend::AudioFrontend(nn::ParamStore& store, const std::string& name,
                             const FrontendConfig& cfg) {
  cfg.Validate();
  int c_in = 1;
  for (std::size_t i = 0; i < cfg.audio_strides.size(); ++i) {
    const std::string layer = name + ".conv" + std::to_string(i);
    const int c = cfg.audio_channels[i];
    strided_.emplace_back(store, layer, c_in, c,
                          TimeConv(cfg.audio_kernels[i], cfg.audio_strides[i]));
    auto& stage = blocks_.emplace_back();
    for (int b = 0; b < cfg.audio_blocks; ++b) {
      const std::string bn = layer + ".block" + std::to_string(b);
      stage.push_back({nn::Conv(store, bn + ".a", c, c, TimeConv(3, 1)),
                       nn::Conv(store, bn + ".b", c, c, TimeConv(3, 1))});
    }
    c_in = c;
  }
  proj_ = nn::Linear(store, name + ".proj", c_in, cfg.encoder_dim);
}

FeatureSequence AudioFrontend::operator()(ad::Tape& t, ad::Var wave) const {
  const int n = wave.rows();
  if (n < kMinAudioSamples) {
    Fail("audio of ", n, " samples is shorter than one ", kMinAudioSamples, "-sample frame");
  }
  ad::Var x = ad::Reshape(wave, {n, 1, 1, 1});
  for (std::size_t i = 0; i < strided_.size(); ++i) {
    x = ad::Swish(strided_[i](t, x));
    for (const Block& b : blocks_[i]) {
      x = ad::Swish(ad::Add(x, b.b(t, ad::Swish(b.a(t, x)))));
    }
  }
  const int frames = x.shape()[0];
  x = ad::Reshape(x, {frames, x.cols()});
  return {proj_(t, x), Modality::kAudio};
}

FeatureSequence AudioFrontend::operator()(ad::Tape& t, const Waveform& wave) const {
  return (*this)(t, t.Constant(Tensor({static_cast<int>(wave.size()), 1}, wave)));
}

VideoFrontend::VideoFrontend(nn::ParamStore& store, const std::string& name,
                             const FrontendConfig& cfg) {
  cfg.Validate();
  ad::UnfoldSpec stem;
  stem.kt = 5;
  stem.kh = stem.kw = 7;
  stem.st = 1;
  stem.sh = stem.sw = 2;
  stem.pad_t0 = stem.pad_t1 = 2;
  stem.pad_h0 = stem.pad_h1 = stem.pad_w0 = stem.pad_w1 = 3;
  stem_ = nn::Conv(store, name + ".stem", 1, cfg.video_stem_channels, stem);
  int c_in = cfg.video_stem_channels;
  for (std::size_t s = 0; s < cfg.video_stage_channels.size(); ++s) {
    const int c = cfg.video_stage_channels[s];
    for (int b = 0; b < cfg.video_blocks; ++b) {
      const int stride = (s > 0 && b == 0) ? 2 : 1;
      const std::string bn = name + ".stage" + std::to_string(s) + ".block" + std::to_string(b);
      Block blk;
      blk.a = nn::Conv(store, bn + ".a", c_in, c, SpatialConv(3, stride));
      blk.b = nn::Conv(store, bn + ".b", c, c, SpatialConv(3, 1));
      if (stride != 1 || c_in != c) {
        blk.project = true;
        blk.shortcut = nn::Conv(store, bn + ".shortcut", c_in, c, SpatialConv(1, stride));
      }
      blocks_.push_back(std::move(blk));
      c_in = c;
    }
  }
  proj_ = nn::Linear(store, name + ".proj", c_in, cfg.encoder_dim);
}

FeatureSequence VideoFrontend::operator()(ad::Tape& t, ad::Var frames) const {
  const auto& shape = frames.shape();
  AVSR_CHECK(shape.size() == 4 && shape[3] == 1, "video front-end expects [T x H x W x 1], got ",
             frames.value().ShapeString());
  AVSR_CHECK(shape[0] >= 1, "video needs at least one frame");
  if (shape[1] < kMinVideoSide || shape[2] < kMinVideoSide) {
    Fail("video frames ", shape[1], "x", shape[2], " are below the ", kMinVideoSide, "x",
         kMinVideoSide, " minimum");
  }
  ad::Var x = ad::AvgPool2x2(ad::Swish(stem_(t, frames)));
  for (const Block& b : blocks_) {
    ad::Var skip = b.project ? b.shortcut(t, x) : x;
    x = ad::Swish(ad::Add(skip, b.b(t, ad::Swish(b.a(t, x)))));
  }
  return {proj_(t, ad::MeanSpatial(x)), Modality::kVideo};
}

FeatureSequence VideoFrontend::operator()(ad::Tape& t, const VideoClip& clip) const {
  return (*this)(t, t.Constant(Tensor({clip.frames, clip.height, clip.width, 1}, clip.pixels)));
}

}  // namespace avsr
