// src/pseudo_label/pseudo_label.cc

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

#include "avsr/pseudo_label/pseudo_label.h"

#include <cmath>
#include <cstring>
#include <iomanip>
#include <optional>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"

#include "avsr/base/error.h"
#include "avsr/base/kernels.h"
#include "avsr/base/parallel.h"
#include "avsr/base/random.h"

namespace avsr {

SignatureRecognizer::SignatureRecognizer(std::shared_ptr<const WordInventory> inventory)
    : inventory_(std::move(inventory)) {
  for (const auto& e : inventory_->Entries()) {
    inv_norms_.push_back(1.0 / std::sqrt(Kernels().sum_squares(e.audio->size(), e.audio->data())));
  }
}

std::vector<SignatureRecognizer::Word> SignatureRecognizer::Recognize(
    const Waveform& wave) const {
  if (wave.size() % kSamplesPerWord != 0) {
    Fail("waveform of ", wave.size(), " samples is not a whole number of words");
  }
  const auto& entries = inventory_->Entries();
  std::vector<Word> out;
  for (std::size_t off = 0; off < wave.size(); off += kSamplesPerWord) {
    double best = -1e300;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double score =
          Kernels().dot(kSamplesPerWord, wave.data() + off, entries[i].audio->data()) *
          inv_norms_[i];
      if (score > best) {
        best = score;
        best_i = i;
      }
    }
    out.push_back({entries[best_i].language, entries[best_i].word});
  }
  return out;
}

CorruptionOracle::CorruptionOracle(std::shared_ptr<const WordInventory> inventory,
                                   double target_wer, EditMix mix, std::uint64_t seed)
    : recognizer_(std::move(inventory)), target_wer_(target_wer), mix_(mix), seed_(seed) {
  AVSR_CHECK(target_wer >= 0 && target_wer <= 1, "target_wer outside [0,1]");
  AVSR_CHECK(mix.substitution >= 0 && mix.insertion >= 0 && mix.deletion >= 0,
             "negative edit fraction");
  AVSR_CHECK(std::abs(mix.substitution + mix.insertion + mix.deletion - 1.0) < 1e-9,
             "edit mix must sum to 1");
}

std::string CorruptionOracle::id() const {
  std::ostringstream os;
  os << "oracle:wer=" << target_wer_;
  return os.str();
}

std::string CorruptionOracle::Transcribe(const Waveform& wave) const {
  const auto words = recognizer_.Recognize(wave);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : wave) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = Mix64(h ^ bits);
  }
  Rng rng(DeriveSeed(seed_, h));
  const auto& inv = recognizer_.inventory();
  auto random_word = [&](const std::string& lang, const std::string& avoid) {
    const auto& list = inv.Words(lang);
    while (true) {
      const auto& w = list[UniformInt(rng, 0, static_cast<int>(list.size()) - 1)];
      if (w != avoid) return w;
    }
  };
  std::vector<std::string> out;
  for (const auto& w : words) {
    if (Uniform01(rng) >= target_wer_) {
      out.push_back(w.text);
      continue;
    }
    const double u = Uniform01(rng);
    if (u < mix_.substitution) {
      out.push_back(random_word(w.language, w.text));
    } else if (u < mix_.substitution + mix_.insertion) {
      out.push_back(w.text);
      out.push_back(random_word(w.language, ""));
    }
    // else: deletion
  }
  std::string text;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i) text += ' ';
    text += out[i];
  }
  return text;
}

Manifest AutoLabel(const Manifest& m, const Transcriber& t, AutoLabelStats* stats) {
  std::vector<std::optional<std::string>> texts(m.records.size());
  ParallelFor(m.records.size(), [&](std::size_t i) {
    try {
      texts[i] = t.Transcribe(LoadAudio(m.records[i], m.base_dir));
    } catch (const std::exception& e) {
      spdlog::warn("transcriber {} failed on {}: {}", t.id(), m.records[i].id, e.what());
    }
  });
  Manifest out;
  out.name = m.name;
  out.base_dir = m.base_dir;
  AutoLabelStats local;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    if (!texts[i]) {
      local.dropped_ids.push_back(m.records[i].id);
      continue;
    }
    SampleRecord r = m.records[i];
    r.transcript = std::move(*texts[i]);
    r.provenance.kind = LabelKind::kAuto;
    r.provenance.transcriber_id = t.id();
    if (const auto* oracle = dynamic_cast<const CorruptionOracle*>(&t)) {
      r.provenance.corruption_rate = oracle->target_wer();
    }
    out.records.push_back(std::move(r));
  }
  local.labelled = out.records.size();
  if (!local.dropped_ids.empty()) {
    spdlog::warn("auto-label dropped {} of {} records", local.dropped_ids.size(),
                 m.records.size());
  }
  if (stats) *stats = std::move(local);
  return out;
}

Manifest FilterLanguage(const Manifest& m, const LanguageFilter& f,
                        const std::string& keep, double min_conf) {
  AVSR_CHECK(min_conf >= 0 && min_conf <= 1, "min_conf outside [0,1]");
  Manifest out;
  out.name = m.name;
  out.base_dir = m.base_dir;
  for (const auto& r : m.records) {
    const LanguageGuess g = f.Classify(r);
    AVSR_CHECK(g.confidence >= 0 && g.confidence <= 1, "language confidence outside [0,1]");
    if (g.language == keep && g.confidence >= min_conf) out.records.push_back(r);
  }
  return out;
}

TrainingPool BuildTrainingPool(const Manifest& labelled,
                               const std::vector<Manifest>& unlabelled,
                               const Transcriber& t, const LanguageFilter& f,
                               const PoolOptions& opts) {
  Manifest extra;
  extra.name = "auto";
  extra.base_dir = labelled.base_dir;
  if (!unlabelled.empty()) {
    const Manifest all = MergeManifests(unlabelled, "unlabelled");
    AutoLabelStats stats;
    const Manifest labelled_extra =
        AutoLabel(FilterLanguage(all, f, opts.keep_language, opts.min_conf), t, &stats);
    extra = SubsetByFraction(labelled_extra, opts.fraction, opts.seed);
    TrainingPool out{MergeManifests({labelled, extra}, labelled.name), {}};
    out.stats = ComputePoolStats(out.pool);
    out.stats.dropped = stats.dropped_ids.size();
    return out;
  }
  TrainingPool out{labelled, ComputePoolStats(labelled)};
  return out;
}

std::unique_ptr<Transcriber> MakeTranscriber(const std::string& spec,
                                             std::shared_ptr<const WordInventory> inventory) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  if (kind != "oracle") Fail("unknown transcriber '", kind, "' (only 'oracle' ships)");
  double wer = 0;
  EditMix mix;
  std::uint64_t seed = 0;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) Fail("transcriber option '", kv, "' needs key=value");
      const std::string k = kv.substr(0, eq);
      const std::string v = kv.substr(eq + 1);
      try {
        if (k == "wer") wer = std::stod(v);
        else if (k == "sub") mix.substitution = std::stod(v);
        else if (k == "ins") mix.insertion = std::stod(v);
        else if (k == "del") mix.deletion = std::stod(v);
        else if (k == "seed") seed = std::stoull(v);
        else Fail("unknown transcriber option '", k, "'");
      } catch (const std::invalid_argument&) {
        Fail("bad value for transcriber option '", k, "': ", v);
      }
    }
  }
  return std::make_unique<CorruptionOracle>(std::move(inventory), wer, mix, seed);
}

std::string PoolStatsJson(const PoolStats& stats) {
  nlohmann::json j;
  j["total_hours"] = stats.total_hours;
  j["records"] = stats.records;
  j["dropped"] = stats.dropped;
  j["hours_by_provenance"] = stats.hours_by_provenance;
  j["hours_by_source"] = stats.hours_by_source;
  nlohmann::json share;
  for (const auto& [k, v] : stats.hours_by_provenance) {
    share[k] = stats.total_hours > 0 ? v / stats.total_hours : 0.0;
  }
  j["share_by_provenance"] = share;
  return j.dump(2);
}

}  // namespace avsr
