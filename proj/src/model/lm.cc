// src/model/lm.cc

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

#include "avsr/model/lm.h"

#include <cmath>
#include <set>

#include "avsr/base/error.h"

namespace avsr {

CharBigramLm::CharBigramLm(const Vocabulary& vocab, const std::vector<std::string>& texts,
                           double add_k)
    : vocab_(vocab), add_k_(add_k) {
  AVSR_CHECK(add_k > 0, "add_k must be > 0");
  std::set<std::string> alphabet;
  for (const auto& text : texts) {
    std::string prev;
    for (const auto& cp : SplitCodePoints(text)) {
      alphabet.insert(cp);
      counts_[prev][cp] += 1;
      totals_[prev] += 1;
      prev = cp;
    }
    counts_[prev][""] += 1;
    totals_[prev] += 1;
  }
  for (int id = kNumReserved; id < vocab.size(); ++id) {
    for (const auto& cp : SplitCodePoints(vocab.Decode({id}))) alphabet.insert(cp);
  }
  symbols_ = static_cast<double>(alphabet.size()) + 1;
}

double CharBigramLm::CharLogProb(const std::string& prev, const std::string& next) const {
  double c = 0, total = 0;
  if (auto it = counts_.find(prev); it != counts_.end()) {
    if (auto jt = it->second.find(next); jt != it->second.end()) c = jt->second;
    total = totals_.at(prev);
  }
  return std::log((c + add_k_) / (total + add_k_ * symbols_));
}

double CharBigramLm::Score(const TokenSequence& prefix, int token) const {
  std::string prev;
  if (!prefix.empty()) {
    const auto cps = SplitCodePoints(vocab_.Decode({prefix.back()}));
    if (!cps.empty()) prev = cps.back();
  }
  if (token == kEosId) return CharLogProb(prev, "");
  double lp = 0;
  const std::string text = vocab_.Decode({token});
  for (const auto& cp : SplitCodePoints(text)) {
    lp += CharLogProb(prev, cp);
    prev = cp;
  }
  return lp;
}

}  // namespace avsr
