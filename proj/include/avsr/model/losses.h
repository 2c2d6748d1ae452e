// include/avsr/model/losses.h

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

#ifndef AVSR_MODEL_LOSSES_H_
#define AVSR_MODEL_LOSSES_H_

#include <vector>

#include "avsr/nn/autodiff.h"

namespace avsr {

struct JointLossConfig {
  double ctc_weight = 0.1;       // alpha
  double label_smoothing = 0.1;  // epsilon

  void Validate() const;
};

// Cross-entropy of logits [L x V] against targets [L] with smoothing eps:
// the target class gets 1 - eps and every other class eps / (V - 1).
// Averaged over the L positions.
ad::Var LabelSmoothedCrossEntropy(ad::Var logits, const std::vector<int>& targets,
                                  double smoothing);

// alpha * ctc + (1 - alpha) * attention.
ad::Var JointLoss(ad::Var ctc, ad::Var attention, const JointLossConfig& cfg);

}  // namespace avsr

#endif  // AVSR_MODEL_LOSSES_H_
