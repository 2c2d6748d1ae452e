// include/avsr/model/search.h

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

#ifndef AVSR_MODEL_SEARCH_H_
#define AVSR_MODEL_SEARCH_H_

#include <vector>

#include "avsr/base/tensor.h"
#include "avsr/model/lm.h"
#include "avsr/tokenizer/bpe.h"

namespace avsr {

struct DecodeConfig {
  int beam = 10;
  double ctc_weight = 0.1;
  double lm_weight = 0.0;
  double length_penalty = 0.0;
  int max_len = 0;  // 0: number of encoder frames
};

// Score components are cumulative over the whole hypothesis:
// score = attention + w_ctc * ctc + w_lm * lm + w_len * length.
struct Hypothesis {
  TokenSequence ids;  // without sos/eos
  double score = 0.0;
  double attention = 0.0;
  double ctc = 0.0;
  double lm = 0.0;
  int length = 0;
};

double CombineScore(const Hypothesis& h, const DecodeConfig& cfg);

// Next-token attention log-probabilities over the whole vocabulary given a
// prefix (without sos).
class AttentionScorer {
 public:
  virtual ~AttentionScorer() = default;
  virtual std::vector<double> NextLogProbs(const TokenSequence& prefix) const = 0;
  virtual int vocab_size() const = 0;
};

// Joint attention/CTC beam search. At each step the best `beam` expansions
// are kept; those ending in eos are moved to the final list. blank, unk and
// sos are never emitted. `ctc_log_probs` ([T x V]) may be null when the CTC
// weight is zero; `lm` may be null when the LM weight is zero. Returns the
// finished hypotheses, best first.
std::vector<Hypothesis> BeamSearch(const AttentionScorer& att, const Tensor* ctc_log_probs,
                                   const LanguageModel* lm, const DecodeConfig& cfg,
                                   int encoder_frames);

// Picks the single best increment at every step.
Hypothesis GreedySearch(const AttentionScorer& att, const Tensor* ctc_log_probs,
                        const LanguageModel* lm, const DecodeConfig& cfg, int encoder_frames);

}  // namespace avsr

#endif  // AVSR_MODEL_SEARCH_H_
