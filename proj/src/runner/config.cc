// src/runner/config.cc

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

#include "avsr/runner/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "avsr/base/error.h"

namespace avsr {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long ParseInteger(const std::string& s, const std::string& what) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    Fail(what, ": expected an integer, got '", s, "'");
  }
  return v;
}

}  // namespace

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double ParseDouble(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || std::isnan(v)) {
    Fail(what, ": expected a number, got '", s, "'");
  }
  return v;
}

Config Config::Parse(const std::string& text, const std::string& origin) {
  Config c;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) Fail(origin, ":", lineno, ": expected key=value");
    const std::string key = Trim(t.substr(0, eq));
    if (key.empty()) Fail(origin, ":", lineno, ": empty key");
    if (c.values_.count(key)) Fail(origin, ":", lineno, ": duplicate key '", key, "'");
    c.values_[key] = Trim(t.substr(eq + 1));
  }
  return c;
}

Config Config::Load(const std::string& path) {
  std::ifstream is(path);
  if (!is) Fail("cannot open config: ", path);
  std::stringstream ss;
  ss << is.rdbuf();
  return Parse(ss.str(), path);
}

void Config::Save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) Fail("cannot open for writing: ", path);
  os << ToString();
  if (!os) Fail("write failed: ", path);
}

std::string Config::ToString() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

void Config::Set(const std::string& key, const std::string& value) { values_[key] = value; }
void Config::Set(const std::string& key, double value) { values_[key] = FormatDouble(value); }
void Config::Set(const std::string& key, int value) { values_[key] = std::to_string(value); }
void Config::Set(const std::string& key, std::uint64_t value) {
  values_[key] = std::to_string(value);
}
void Config::Set(const std::string& key, bool value) { values_[key] = value ? "true" : "false"; }

void Config::Set(const std::string& key, const std::vector<int>& value) {
  std::string s;
  for (std::size_t i = 0; i < value.size(); ++i) s += (i ? "," : "") + std::to_string(value[i]);
  values_[key] = s;
}

void Config::Set(const std::string& key, const std::vector<double>& value) {
  std::string s;
  for (std::size_t i = 0; i < value.size(); ++i) s += (i ? "," : "") + FormatDouble(value[i]);
  values_[key] = s;
}

void Config::Merge(const Config& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

const std::string* Config::Find(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string Config::GetString(const std::string& key, const std::string& fallback) const {
  const std::string* v = Find(key);
  return v ? *v : fallback;
}

double Config::GetDouble(const std::string& key, double fallback) const {
  const std::string* v = Find(key);
  return v ? ParseDouble(*v, key) : fallback;
}

int Config::GetInt(const std::string& key, int fallback) const {
  const std::string* v = Find(key);
  if (!v) return fallback;
  const long long x = ParseInteger(*v, key);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    Fail(key, ": value out of range");
  }
  return static_cast<int>(x);
}

std::uint64_t Config::GetU64(const std::string& key, std::uint64_t fallback) const {
  const std::string* v = Find(key);
  if (!v) return fallback;
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
  if (ec != std::errc() || p != v->data() + v->size()) {
    Fail(key, ": expected a non-negative integer, got '", *v, "'");
  }
  return x;
}

bool Config::GetBool(const std::string& key, bool fallback) const {
  const std::string* v = Find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  Fail(key, ": expected true or false, got '", *v, "'");
}

std::vector<int> Config::GetInts(const std::string& key, const std::vector<int>& fallback) const {
  const std::string* v = Find(key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& item : SplitList(*v)) out.push_back(static_cast<int>(ParseInteger(item, key)));
  return out;
}

std::vector<double> Config::GetDoubles(const std::string& key,
                                       const std::vector<double>& fallback) const {
  const std::string* v = Find(key);
  if (!v) return fallback;
  std::vector<double> out;
  for (const auto& item : SplitList(*v)) out.push_back(ParseDouble(item, key));
  return out;
}

std::vector<std::string> Config::UnusedKeys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) out.push_back(k);
  }
  return out;
}

void Config::CheckAllUsed(const std::string& what) const {
  const auto unused = UnusedKeys();
  if (!unused.empty()) Fail("unknown ", what, " key '", unused.front(), "'");
}

void WriteModelConfig(const ModelConfig& m, Config& c) {
  c.Set("model.modality", ModalityCode(m.modality));
  c.Set("model.dim", m.encoder.dim);
  c.Set("model.vocab_size", m.vocab_size);
  c.Set("model.init_seed", m.init_seed);
  c.Set("model.audio_channels", m.frontend.audio_channels);
  c.Set("model.audio_kernels", m.frontend.audio_kernels);
  c.Set("model.audio_strides", m.frontend.audio_strides);
  c.Set("model.audio_blocks", m.frontend.audio_blocks);
  c.Set("model.video_stem_channels", m.frontend.video_stem_channels);
  c.Set("model.video_stage_channels", m.frontend.video_stage_channels);
  c.Set("model.video_blocks", m.frontend.video_blocks);
  c.Set("model.video_mean", m.video_stats.mean);
  c.Set("model.video_std", m.video_stats.stddev);
  c.Set("model.encoder_layers", m.encoder.layers);
  c.Set("model.encoder_ffn", m.encoder.ffn_dim);
  c.Set("model.encoder_heads", m.encoder.heads);
  c.Set("model.conv_kernel", m.encoder.conv_kernel);
  c.Set("model.position",
        std::string(m.encoder.position == PositionEncoding::kRelative ? "relative" : "absolute"));
  c.Set("model.max_rel_distance", m.encoder.max_rel_distance);
  c.Set("model.fusion_hidden", m.fusion.hidden);
  c.Set("model.decoder_layers", m.decoder.layers);
  c.Set("model.decoder_ffn", m.decoder.ffn_dim);
  c.Set("model.decoder_heads", m.decoder.heads);
  c.Set("model.ctc_weight", m.loss.ctc_weight);
  c.Set("model.label_smoothing", m.loss.label_smoothing);
}

ModelConfig ReadModelConfig(const Config& c, ModelConfig m) {
  if (c.Has("model.modality")) m.modality = ParseModality(c.GetString("model.modality", ""));
  const int dim = c.GetInt("model.dim", m.encoder.dim);
  m.frontend.encoder_dim = m.encoder.dim = m.decoder.dim = m.fusion.output = dim;
  m.vocab_size = c.GetInt("model.vocab_size", m.vocab_size);
  m.init_seed = c.GetU64("model.init_seed", m.init_seed);
  m.frontend.audio_channels = c.GetInts("model.audio_channels", m.frontend.audio_channels);
  m.frontend.audio_kernels = c.GetInts("model.audio_kernels", m.frontend.audio_kernels);
  m.frontend.audio_strides = c.GetInts("model.audio_strides", m.frontend.audio_strides);
  m.frontend.audio_blocks = c.GetInt("model.audio_blocks", m.frontend.audio_blocks);
  m.frontend.video_stem_channels =
      c.GetInt("model.video_stem_channels", m.frontend.video_stem_channels);
  m.frontend.video_stage_channels =
      c.GetInts("model.video_stage_channels", m.frontend.video_stage_channels);
  m.frontend.video_blocks = c.GetInt("model.video_blocks", m.frontend.video_blocks);
  m.video_stats.mean = c.GetDouble("model.video_mean", m.video_stats.mean);
  m.video_stats.stddev = c.GetDouble("model.video_std", m.video_stats.stddev);
  m.encoder.layers = c.GetInt("model.encoder_layers", m.encoder.layers);
  m.encoder.ffn_dim = c.GetInt("model.encoder_ffn", m.encoder.ffn_dim);
  m.encoder.heads = c.GetInt("model.encoder_heads", m.encoder.heads);
  m.encoder.conv_kernel = c.GetInt("model.conv_kernel", m.encoder.conv_kernel);
  if (c.Has("model.position")) {
    const std::string p = c.GetString("model.position", "");
    if (p == "relative") {
      m.encoder.position = PositionEncoding::kRelative;
    } else if (p == "absolute") {
      m.encoder.position = PositionEncoding::kAbsolute;
    } else {
      Fail("model.position: expected relative or absolute, got '", p, "'");
    }
  }
  m.encoder.max_rel_distance = c.GetInt("model.max_rel_distance", m.encoder.max_rel_distance);
  m.fusion.hidden = c.GetInt("model.fusion_hidden", m.fusion.hidden);
  m.decoder.layers = c.GetInt("model.decoder_layers", m.decoder.layers);
  m.decoder.ffn_dim = c.GetInt("model.decoder_ffn", m.decoder.ffn_dim);
  m.decoder.heads = c.GetInt("model.decoder_heads", m.decoder.heads);
  m.loss.ctc_weight = c.GetDouble("model.ctc_weight", m.loss.ctc_weight);
  m.loss.label_smoothing = c.GetDouble("model.label_smoothing", m.loss.label_smoothing);
  m.Validate();
  return m;
}

void WriteDecodeConfig(const DecodeConfig& d, Config& c) {
  c.Set("decode.beam", d.beam);
  c.Set("decode.ctc_weight", d.ctc_weight);
  c.Set("decode.lm_weight", d.lm_weight);
  c.Set("decode.length_penalty", d.length_penalty);
  c.Set("decode.max_len", d.max_len);
}

DecodeConfig ReadDecodeConfig(const Config& c, DecodeConfig d) {
  d.beam = c.GetInt("decode.beam", d.beam);
  d.ctc_weight = c.GetDouble("decode.ctc_weight", d.ctc_weight);
  d.lm_weight = c.GetDouble("decode.lm_weight", d.lm_weight);
  d.length_penalty = c.GetDouble("decode.length_penalty", d.length_penalty);
  d.max_len = c.GetInt("decode.max_len", d.max_len);
  AVSR_CHECK(d.beam >= 1, "decode.beam must be >= 1");
  AVSR_CHECK(d.max_len >= 0, "decode.max_len must be >= 0");
  return d;
}

}  // namespace avsr
