// include/avsr/runner/metrics.h

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

#ifndef AVSR_RUNNER_METRICS_H_
#define AVSR_RUNNER_METRICS_H_

#include <string>
#include <vector>

namespace avsr {

std::vector<std::string> SplitWords(const std::string& text);

// Levenshtein distance over words with unit costs.
int WordEditDistance(const std::vector<std::string>& ref,
                     const std::vector<std::string>& hyp);

struct WerStats {
  long long edits = 0;
  long long ref_words = 0;
  double wer() const { return ref_words ? static_cast<double>(edits) / ref_words : 0.0; }
};

// Corpus-level WER: total edits over total reference words. Throws on a size
// mismatch or an empty reference.
WerStats CorpusWer(const std::vector<std::string>& refs,
                   const std::vector<std::string>& hyps);
double Wer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps);

}  // namespace avsr

#endif  // AVSR_RUNNER_METRICS_H_
