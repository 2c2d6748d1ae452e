// include/avsr/data/manifest.h

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

#ifndef AVSR_DATA_MANIFEST_H_
#define AVSR_DATA_MANIFEST_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "avsr/data/media.h"

namespace avsr {

enum class LabelKind { kHuman, kAuto };

struct LabelProvenance {
  LabelKind kind = LabelKind::kHuman;
  std::string transcriber_id;  // empty iff human
  double corruption_rate = 0.0;

  bool operator==(const LabelProvenance&) const = default;
};

// Media that lives in memory or is rendered on demand (synthetic corpora).
class MediaSource {
 public:
  virtual ~MediaSource() = default;
  virtual Waveform Audio() const = 0;
  virtual VideoClip Video() const = 0;
};

// Holds already-materialized media.
class InlineMedia : public MediaSource {
 public:
  InlineMedia(Waveform audio, VideoClip video)
      : audio_(std::move(audio)), video_(std::move(video)) {}
  Waveform Audio() const override { return audio_; }
  VideoClip Video() const override { return video_; }

 private:
  Waveform audio_;
  VideoClip video_;
};

struct SampleRecord {
  std::string id;
  // File references; used when `media` is null. Relative paths resolve
  // against the owning manifest's base_dir.
  std::string audio;
  std::string video;
  std::shared_ptr<const MediaSource> media;
  std::string transcript;
  std::string language;
  double duration_s = 0.0;
  LabelProvenance provenance;
  std::string source;

  int NumFrames() const;  // round(duration_s * 25)
};

// Field-for-field comparison (media compared by identity).
bool SameRecord(const SampleRecord& a, const SampleRecord& b);

struct Manifest {
  std::string name;
  std::vector<SampleRecord> records;
  std::string base_dir;  // where relative media paths resolve; not serialized

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

// Durations are accumulated in integer microseconds so that totals are exactly
// additive over any partition.
std::int64_t DurationMicros(double seconds);
std::int64_t TotalMicros(const Manifest& m);
double TotalHours(const Manifest& m);

// Checks the invariants of every record plus id uniqueness.
void ValidateManifest(const Manifest& m);

Waveform LoadAudio(const SampleRecord& r, const std::string& base_dir = "");
VideoClip LoadVideo(const SampleRecord& r, const std::string& base_dir = "");

// Concatenation in order of parts. Throws on a duplicate id, naming it.
Manifest MergeManifests(const std::vector<Manifest>& parts,
                        const std::string& name = "");

// Seeded shuffle of the whole manifest, then the first ceil(fraction * N)
// records. For a fixed seed, a smaller fraction always yields a subset of a
// larger one.
Manifest SubsetByFraction(const Manifest& m, double fraction, std::uint64_t seed);

// Hours per provenance kind and per source.
struct PoolStats {
  double total_hours = 0.0;
  std::map<std::string, double> hours_by_provenance;  // "human" / "auto"
  std::map<std::string, double> hours_by_source;
  std::size_t records = 0;
  std::size_t dropped = 0;  // transcriber failures upstream
};
PoolStats ComputePoolStats(const Manifest& m);

// JSON-lines persistence. Records with in-memory media have their audio and
// video written next to the manifest (<path>.media/<id>.wav|.avf) and are
// referenced by relative path.
void SaveManifest(const Manifest& m, const std::string& path);
Manifest LoadManifest(const std::string& path);

std::string ToString(LabelKind kind);

}  // namespace avsr

#endif  // AVSR_DATA_MANIFEST_H_
