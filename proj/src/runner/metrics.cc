// src/runner/metrics.cc

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

#include "avsr/runner/metrics.h"

#include <algorithm>
#include <sstream>

#include "avsr/base/error.h"

namespace avsr {

std::vector<std::string> SplitWords(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

int WordEditDistance(const std::vector<std::string>& ref,
                     const std::vector<std::string>& hyp) {
  // Two-row DP.
  std::vector<int> prev(hyp.size() + 1), cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const int sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

WerStats CorpusWer(const std::vector<std::string>& refs,
                   const std::vector<std::string>& hyps) {
  AVSR_CHECK(refs.size() == hyps.size(), "wer: ", refs.size(), " references vs ",
             hyps.size(), " hypotheses");
  WerStats s;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto r = SplitWords(refs[i]);
    if (r.empty()) Fail("wer: reference ", i, " is empty");
    s.edits += WordEditDistance(r, SplitWords(hyps[i]));
    s.ref_words += static_cast<long long>(r.size());
  }
  return s;
}

double Wer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  return CorpusWer(refs, hyps).wer();
}

}  // namespace avsr
