// include/avsr/model/attention.h

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

#ifndef AVSR_MODEL_ATTENTION_H_
#define AVSR_MODEL_ATTENTION_H_

#include <string>

#include "avsr/nn/layers.h"

namespace avsr {

// Scaled dot-product attention over `heads` heads. With max_rel_distance > 0
// every head adds a learned bias indexed by the clipped offset j - i (self
// attention only).
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(nn::ParamStore& store, const std::string& name, int dim, int heads,
                     int max_rel_distance = 0);

  // query [Tq x D], memory [Tk x D]; `mask` is added to the scores if given
  // (use a large negative value to hide a position).
  ad::Var operator()(ad::Tape& t, ad::Var query, ad::Var memory,
                     const Tensor* mask = nullptr) const;

 private:
  nn::Linear q_, k_, v_, out_;
  ad::Parameter* rel_table_ = nullptr;
  int dim_ = 0, heads_ = 0;
};

// [T x D] sinusoidal position table.
Tensor SinusoidalPositions(int length, int dim);

// Additive causal mask: 0 on and below the diagonal, -1e9 above.
Tensor CausalMask(int length);

}  // namespace avsr

#endif  // AVSR_MODEL_ATTENTION_H_
