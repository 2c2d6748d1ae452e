// include/avsr/runner/config.h

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

#ifndef AVSR_RUNNER_CONFIG_H_
#define AVSR_RUNNER_CONFIG_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "avsr/model/avsr_model.h"
#include "avsr/model/search.h"

namespace avsr {

// Flat key=value configuration. Lines starting with '#' and blank lines are
// ignored. Reads are tracked so that misspelled keys can be reported.
class Config {
 public:
  static Config Parse(const std::string& text, const std::string& origin = "<string>");
  static Config Load(const std::string& path);
  void Save(const std::string& path) const;
  std::string ToString() const;

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  void Set(const std::string& key, const std::string& value);
  void Set(const std::string& key, double value);
  void Set(const std::string& key, int value);
  void Set(const std::string& key, std::uint64_t value);
  void Set(const std::string& key, bool value);
  void Set(const std::string& key, const std::vector<int>& value);
  void Set(const std::string& key, const std::vector<double>& value);
  // Later keys override earlier ones.
  void Merge(const Config& other);

  std::string GetString(const std::string& key, const std::string& fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  int GetInt(const std::string& key, int fallback) const;
  std::uint64_t GetU64(const std::string& key, std::uint64_t fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;
  std::vector<int> GetInts(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<double> GetDoubles(const std::string& key,
                                 const std::vector<double>& fallback) const;

  std::vector<std::string> UnusedKeys() const;
  // Throws naming the first key that was never read.
  void CheckAllUsed(const std::string& what) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const std::string* Find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

// Round-trip exact decimal form of a double ("inf" for infinities).
std::string FormatDouble(double v);
double ParseDouble(const std::string& s, const std::string& what);

void WriteModelConfig(const ModelConfig& m, Config& c);
ModelConfig ReadModelConfig(const Config& c, ModelConfig base = {});

void WriteDecodeConfig(const DecodeConfig& d, Config& c);
DecodeConfig ReadDecodeConfig(const Config& c, DecodeConfig base = {});

}  // namespace avsr

#endif  // AVSR_RUNNER_CONFIG_H_
