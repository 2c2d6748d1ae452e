// include/avsr/model/ctc.h

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

#ifndef AVSR_MODEL_CTC_H_
#define AVSR_MODEL_CTC_H_

#include <vector>

#include "avsr/nn/autodiff.h"
#include "avsr/tokenizer/bpe.h"

namespace avsr {

// log P(target | log_probs) by the forward algorithm in log space; -inf when
// the target cannot be emitted in T frames. If `grad` is non-null it receives
// d(log P)/d(log_probs) (zeros when infeasible).
double CtcLogLikelihood(const Tensor& log_probs, const TokenSequence& target,
                        int blank = kBlankId, Tensor* grad = nullptr);

// -log P(target | log_probs) as a tape node. Rows of `log_probs` [T x V] must
// be normalized; an unsatisfiable target gives +inf and no gradient.
ad::Var CtcLoss(ad::Var log_probs, const TokenSequence& target, int blank = kBlankId);

// Prefix probabilities for joint CTC/attention decoding: psi(h) is the log
// probability that the CTC output sequence starts with h; for h + eos it is
// the probability of exactly h.
class CtcPrefixScorer {
 public:
  struct State {
    std::vector<double> r_nonblank;  // prefix ends at t with its last label
    std::vector<double> r_blank;     // prefix ends at t with a blank
    double psi = 0.0;
    int last = -1;  // -1 for the empty prefix
  };

  explicit CtcPrefixScorer(const Tensor& log_probs, int blank = kBlankId, int eos = kEosId);
  State Initial() const;
  State Extend(const State& prefix, int token) const;
  int frames() const { return frames_; }

 private:
  const Tensor& lp_;
  int blank_, eos_, frames_;
};

double LogAdd(double a, double b);

// Fewest frames that can emit `target`: one per label plus a blank between
// repeated labels.
int CtcMinFrames(const TokenSequence& target);

}  // namespace avsr

#endif  // AVSR_MODEL_CTC_H_
