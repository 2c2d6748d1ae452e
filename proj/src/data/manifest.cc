// src/data/manifest.cc

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

#include "avsr/data/manifest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "json.hpp"

#include "avsr/base/error.h"
#include "avsr/base/random.h"

namespace avsr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string ToString(LabelKind kind) {
  return kind == LabelKind::kHuman ? "human" : "auto";
}

int SampleRecord::NumFrames() const {
  return static_cast<int>(std::lround(duration_s * kVideoFps));
}

bool SameRecord(const SampleRecord& a, const SampleRecord& b) {
  return a.id == b.id && a.audio == b.audio && a.video == b.video &&
         a.media == b.media && a.transcript == b.transcript &&
         a.language == b.language && a.duration_s == b.duration_s &&
         a.provenance == b.provenance && a.source == b.source;
}

std::int64_t DurationMicros(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * 1e6));
}

std::int64_t TotalMicros(const Manifest& m) {
  std::int64_t total = 0;
  for (const auto& r : m.records) total += DurationMicros(r.duration_s);
  return total;
}

double TotalHours(const Manifest& m) {
  return static_cast<double>(TotalMicros(m)) / 3.6e9;
}

void ValidateManifest(const Manifest& m) {
  std::unordered_set<std::string> seen;
  for (const auto& r : m.records) {
    if (r.id.empty()) Fail("record with empty id in manifest '", m.name, "'");
    if (!seen.insert(r.id).second) Fail("duplicate id: ", r.id);
    if (!(r.duration_s > 0)) Fail("record ", r.id, ": duration_s must be > 0");
    if (r.provenance.kind == LabelKind::kAuto && r.provenance.transcriber_id.empty()) {
      Fail("record ", r.id, ": auto provenance without transcriber_id");
    }
    if (r.provenance.kind == LabelKind::kHuman && !r.provenance.transcriber_id.empty()) {
      Fail("record ", r.id, ": human provenance with transcriber_id");
    }
    if (r.provenance.corruption_rate < 0 || r.provenance.corruption_rate > 1) {
      Fail("record ", r.id, ": corruption_rate outside [0,1]");
    }
  }
}

namespace {

std::string Resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).string();
}

}  // namespace

Waveform LoadAudio(const SampleRecord& r, const std::string& base_dir) {
  if (r.media) return r.media->Audio();
  if (r.audio.empty()) Fail("record ", r.id, " has no audio");
  return ReadWav(Resolve(r.audio, base_dir));
}

VideoClip LoadVideo(const SampleRecord& r, const std::string& base_dir) {
  if (r.media) return r.media->Video();
  if (r.video.empty()) Fail("record ", r.id, " has no video");
  return ReadAvf(Resolve(r.video, base_dir));
}

Manifest MergeManifests(const std::vector<Manifest>& parts, const std::string& name) {
  AVSR_CHECK(!parts.empty(), "merge needs at least one manifest");
  Manifest out;
  out.name = name.empty() ? parts.front().name : name;
  out.base_dir = parts.front().base_dir;
  std::unordered_set<std::string> seen;
  for (const auto& p : parts) {
    if (!p.base_dir.empty() && p.base_dir != out.base_dir) {
      Fail("cannot merge manifests with different media base directories: '",
           out.base_dir, "' vs '", p.base_dir, "'");
    }
    for (const auto& r : p.records) {
      if (!seen.insert(r.id).second) Fail("duplicate id across manifests: ", r.id);
      out.records.push_back(r);
    }
  }
  return out;
}

Manifest SubsetByFraction(const Manifest& m, double fraction, std::uint64_t seed) {
  AVSR_CHECK(fraction >= 0.0 && fraction <= 1.0, "fraction ", fraction,
             " outside [0,1]");
  std::vector<std::size_t> order(m.records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, HashString("subset")));
  std::shuffle(order.begin(), order.end(), rng);
  const double want = fraction * static_cast<double>(order.size());
  // Guard against 0.6 * 5 = 3.0000000000000004 style overshoot.
  const auto keep = static_cast<std::size_t>(std::ceil(want - 1e-9));
  Manifest out;
  out.name = m.name;
  out.base_dir = m.base_dir;
  out.records.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.records.push_back(m.records[order[i]]);
  return out;
}

PoolStats ComputePoolStats(const Manifest& m) {
  PoolStats s;
  std::map<std::string, std::int64_t> by_prov, by_source;
  for (const auto& r : m.records) {
    by_prov[ToString(r.provenance.kind)] += DurationMicros(r.duration_s);
    by_source[r.source] += DurationMicros(r.duration_s);
  }
  for (const auto& [k, v] : by_prov) s.hours_by_provenance[k] = v / 3.6e9;
  for (const auto& [k, v] : by_source) s.hours_by_source[k] = v / 3.6e9;
  s.total_hours = TotalHours(m);
  s.records = m.records.size();
  return s;
}

namespace {

json RecordToJson(const SampleRecord& r) {
  return json{{"id", r.id},
              {"audio", r.audio},
              {"video", r.video},
              {"transcript", r.transcript},
              {"language", r.language},
              {"duration_s", r.duration_s},
              {"provenance",
               {{"kind", ToString(r.provenance.kind)},
                {"transcriber_id", r.provenance.transcriber_id},
                {"corruption_rate", r.provenance.corruption_rate}}},
              {"source", r.source}};
}

template <typename T>
T Field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) Fail("manifest line ", line, ": missing field '", key, "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    Fail("manifest line ", line, ": field '", key, "' has the wrong type");
  }
}

SampleRecord RecordFromJson(const json& j, std::size_t line) {
  if (!j.is_object()) Fail("manifest line ", line, ": expected a JSON object");
  SampleRecord r;
  r.id = Field<std::string>(j, "id", line);
  r.audio = Field<std::string>(j, "audio", line);
  r.video = Field<std::string>(j, "video", line);
  r.transcript = Field<std::string>(j, "transcript", line);
  r.language = Field<std::string>(j, "language", line);
  r.duration_s = Field<double>(j, "duration_s", line);
  r.source = Field<std::string>(j, "source", line);
  const json prov = Field<json>(j, "provenance", line);
  const std::string kind = Field<std::string>(prov, "kind", line);
  if (kind == "human") {
    r.provenance.kind = LabelKind::kHuman;
  } else if (kind == "auto") {
    r.provenance.kind = LabelKind::kAuto;
  } else {
    Fail("manifest line ", line, ": unknown provenance kind '", kind, "'");
  }
  r.provenance.transcriber_id = Field<std::string>(prov, "transcriber_id", line);
  r.provenance.corruption_rate = Field<double>(prov, "corruption_rate", line);
  return r;
}

}  // namespace

void SaveManifest(const Manifest& m, const std::string& path) {
  ValidateManifest(m);
  const fs::path manifest_path(path);
  const fs::path dir = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
  const std::string media_dir_name = manifest_path.filename().string() + ".media";
  std::ofstream os(path);
  if (!os) Fail("cannot open for writing: ", path);
  bool made_dir = false;
  for (const auto& r : m.records) {
    SampleRecord out = r;
    if (r.media) {
      if (!made_dir) {
        fs::create_directories(dir / media_dir_name);
        made_dir = true;
      }
      out.audio = (fs::path(media_dir_name) / (r.id + ".wav")).string();
      out.video = (fs::path(media_dir_name) / (r.id + ".avf")).string();
      WriteWav((dir / out.audio).string(), r.media->Audio());
      WriteAvf((dir / out.video).string(), r.media->Video());
    } else if (!m.base_dir.empty() && fs::absolute(m.base_dir) != fs::absolute(dir)) {
      // Keep file references valid when saving to another directory.
      if (!out.audio.empty()) out.audio = fs::absolute(Resolve(r.audio, m.base_dir)).string();
      if (!out.video.empty()) out.video = fs::absolute(Resolve(r.video, m.base_dir)).string();
    }
    os << RecordToJson(out).dump() << '\n';
  }
  if (!os) Fail("write failed: ", path);
}

Manifest LoadManifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open manifest: ", path);
  Manifest m;
  m.name = fs::path(path).stem().string();
  const fs::path p(path);
  m.base_dir = p.has_parent_path() ? p.parent_path().string() : ".";
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      Fail("manifest line ", lineno, ": malformed JSON (", e.what(), ")");
    }
    m.records.push_back(RecordFromJson(j, lineno));
  }
  ValidateManifest(m);
  return m;
}

}  // namespace avsr
