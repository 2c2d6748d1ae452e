// include/avsr/data/media.h

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

#ifndef AVSR_DATA_MEDIA_H_
#define AVSR_DATA_MEDIA_H_

#include <string>
#include <vector>

namespace avsr {

inline constexpr int kSampleRate = 16000;
inline constexpr int kVideoFps = 25;
inline constexpr int kSamplesPerFrame = kSampleRate / kVideoFps;  // 640

// Mono waveform at 16 kHz, nominally in [-1, 1].
using Waveform = std::vector<double>;

// Grayscale frame stack, [frames x height x width], values in [0, 1] before
// normalization.
struct VideoClip {
  int frames = 0;
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  double* Frame(int t) {
    return pixels.data() + static_cast<std::size_t>(t) * height * width;
  }
  const double* Frame(int t) const {
    return pixels.data() + static_cast<std::size_t>(t) * height * width;
  }
  std::size_t FrameSize() const {
    return static_cast<std::size_t>(height) * width;
  }
};

// 16-bit PCM mono WAV at 16 kHz. Samples are clipped to [-1, 1].
void WriteWav(const std::string& path, const Waveform& wave);
Waveform ReadWav(const std::string& path);

// Raw frame container: magic "AVF1", u32 T, u32 H, u32 W, then T*H*W float32,
// all little-endian.
void WriteAvf(const std::string& path, const VideoClip& clip);
VideoClip ReadAvf(const std::string& path);

}  // namespace avsr

#endif  // AVSR_DATA_MEDIA_H_
