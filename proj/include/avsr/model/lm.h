// include/avsr/model/lm.h

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

#ifndef AVSR_MODEL_LM_H_
#define AVSR_MODEL_LM_H_

#include <map>
#include <string>
#include <vector>

#include "avsr/tokenizer/bpe.h"

namespace avsr {

// Shallow-fusion interface: log probability of `token` (eos allowed) after
// `prefix` (no sos).
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual double Score(const TokenSequence& prefix, int token) const = 0;
};

// Add-k smoothed character bigram model. A token is scored as the product of
// its characters' bigram probabilities; eos as the end-of-text transition.
class CharBigramLm : public LanguageModel {
 public:
  CharBigramLm(const Vocabulary& vocab, const std::vector<std::string>& texts, double add_k = 0.1);
  double Score(const TokenSequence& prefix, int token) const override;

  // log p(next | prev) over code points; "" is the text boundary.
  double CharLogProb(const std::string& prev, const std::string& next) const;

 private:
  Vocabulary vocab_;
  double add_k_;
  std::map<std::string, std::map<std::string, double>> counts_;
  std::map<std::string, double> totals_;
  double symbols_ = 0;  // alphabet size + boundary
};

}  // namespace avsr

#endif  // AVSR_MODEL_LM_H_
