// src/model/losses.cc

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

#include "avsr/model/losses.h"

#include "avsr/base/error.h"

namespace avsr {

void JointLossConfig::Validate() const {
  AVSR_CHECK(ctc_weight >= 0 && ctc_weight <= 1, "ctc_weight outside [0,1]");
  AVSR_CHECK(label_smoothing >= 0 && label_smoothing < 1, "label_smoothing outside [0,1)");
}

ad::Var LabelSmoothedCrossEntropy(ad::Var logits, const std::vector<int>& targets,
                                  double smoothing) {
  const int L = logits.rows(), V = logits.cols();
  AVSR_CHECK(static_cast<int>(targets.size()) == L, "cross-entropy: ", L,
             " logit rows vs ", targets.size(), " targets");
  AVSR_CHECK(L > 0 && V > 1, "cross-entropy needs at least one row and two classes");
  AVSR_CHECK(smoothing >= 0 && smoothing < 1, "label smoothing outside [0,1)");
  Tensor q = Tensor::Matrix(L, V, smoothing / (V - 1));
  for (int i = 0; i < L; ++i) {
    AVSR_CHECK(targets[i] >= 0 && targets[i] < V, "target id ", targets[i], " out of range");
    q.At(i, targets[i]) = 1.0 - smoothing;
  }
  ad::Var weighted = ad::Mul(ad::LogSoftmax(logits), logits.tape()->Constant(std::move(q)));
  return ad::Scale(ad::Sum(weighted), -1.0 / L);
}

ad::Var JointLoss(ad::Var ctc, ad::Var attention, const JointLossConfig& cfg) {
  cfg.Validate();
  // Skip a zero-weight branch entirely so an infinite CTC loss cannot leak
  // in as 0 * inf.
  if (cfg.ctc_weight == 0.0) return attention;
  if (cfg.ctc_weight == 1.0) return ctc;
  return ad::Add(ad::Scale(ctc, cfg.ctc_weight), ad::Scale(attention, 1.0 - cfg.ctc_weight));
}

}  // namespace avsr
