// src/data/media.cc

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

#include "avsr/data/media.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "avsr/base/error.h"

namespace avsr {
namespace {

static_assert(std::endian::native == std::endian::little,
              "media containers assume a little-endian host");

template <typename T>
void Put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T Get(std::istream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) Fail("truncated file: ", path);
  return v;
}

}  // namespace

void WriteWav(const std::string& path, const Waveform& wave) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail("cannot open for writing: ", path);
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.size() * 2);
  os.write("RIFF", 4);
  Put<std::uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  Put<std::uint32_t>(os, 16);
  Put<std::uint16_t>(os, 1);  // PCM
  Put<std::uint16_t>(os, 1);  // mono
  Put<std::uint32_t>(os, kSampleRate);
  Put<std::uint32_t>(os, kSampleRate * 2);
  Put<std::uint16_t>(os, 2);
  Put<std::uint16_t>(os, 16);
  os.write("data", 4);
  Put<std::uint32_t>(os, data_bytes);
  for (double s : wave) {
    const double c = std::clamp(s, -1.0, 1.0);
    Put<std::int16_t>(os, static_cast<std::int16_t>(std::lround(c * 32767.0)));
  }
  if (!os) Fail("write failed: ", path);
}

Waveform ReadWav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open: ", path);
  std::array<char, 4> tag{};
  is.read(tag.data(), 4);
  if (!is || std::memcmp(tag.data(), "RIFF", 4) != 0) Fail("not a RIFF file: ", path);
  Get<std::uint32_t>(is, path);
  is.read(tag.data(), 4);
  if (!is || std::memcmp(tag.data(), "WAVE", 4) != 0) Fail("not a WAVE file: ", path);
  bool have_fmt = false;
  while (true) {
    is.read(tag.data(), 4);
    if (!is) Fail("no data chunk in ", path);
    const auto size = Get<std::uint32_t>(is, path);
    if (std::memcmp(tag.data(), "fmt ", 4) == 0) {
      const auto format = Get<std::uint16_t>(is, path);
      const auto channels = Get<std::uint16_t>(is, path);
      const auto rate = Get<std::uint32_t>(is, path);
      Get<std::uint32_t>(is, path);
      Get<std::uint16_t>(is, path);
      const auto bits = Get<std::uint16_t>(is, path);
      if (format != 1 || channels != 1 || bits != 16 || rate != kSampleRate) {
        Fail(path, ": expected 16-bit PCM mono at 16 kHz");
      }
      is.ignore(size - 16);
      have_fmt = true;
    } else if (std::memcmp(tag.data(), "data", 4) == 0) {
      if (!have_fmt) Fail(path, ": data chunk before fmt chunk");
      Waveform wave(size / 2);
      for (auto& s : wave) s = Get<std::int16_t>(is, path) / 32767.0;
      return wave;
    } else {
      is.ignore(size + (size & 1));
    }
  }
}

void WriteAvf(const std::string& path, const VideoClip& clip) {
  AVSR_CHECK(clip.pixels.size() == static_cast<std::size_t>(clip.frames) * clip.FrameSize(),
             "clip pixel count mismatch");
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail("cannot open for writing: ", path);
  os.write("AVF1", 4);
  Put<std::uint32_t>(os, clip.frames);
  Put<std::uint32_t>(os, clip.height);
  Put<std::uint32_t>(os, clip.width);
  for (double v : clip.pixels) Put<float>(os, static_cast<float>(v));
  if (!os) Fail("write failed: ", path);
}

VideoClip ReadAvf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail("cannot open: ", path);
  std::array<char, 4> magic{};
  is.read(magic.data(), 4);
  if (!is || std::memcmp(magic.data(), "AVF1", 4) != 0) Fail("bad AVF1 magic in ", path);
  VideoClip clip;
  clip.frames = static_cast<int>(Get<std::uint32_t>(is, path));
  clip.height = static_cast<int>(Get<std::uint32_t>(is, path));
  clip.width = static_cast<int>(Get<std::uint32_t>(is, path));
  clip.pixels.resize(static_cast<std::size_t>(clip.frames) * clip.FrameSize());
  for (auto& v : clip.pixels) v = Get<float>(is, path);
  return clip;
}

}  // namespace avsr
