// include/avsr/model/conformer.h

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

#ifndef AVSR_MODEL_CONFORMER_H_
#define AVSR_MODEL_CONFORMER_H_

#include <string>
#include <vector>

#include "avsr/frontend/frontend.h"
#include "avsr/model/attention.h"
#include "avsr/nn/layers.h"

namespace avsr {

enum class PositionEncoding { kRelative, kAbsolute };

struct EncoderConfig {
  int layers = 2;
  int dim = 64;
  int ffn_dim = 256;
  int heads = 4;
  int conv_kernel = 15;
  PositionEncoding position = PositionEncoding::kRelative;
  int max_rel_distance = 16;

  void Validate() const;
};

// Conformer block: x + FFN/2, x + MHSA, x + Conv, x + FFN/2, then LayerNorm.
class ConformerBlock {
 public:
  ConformerBlock() = default;
  ConformerBlock(nn::ParamStore& store, const std::string& name, const EncoderConfig& cfg);
  ad::Var operator()(ad::Tape& t, ad::Var x) const;

 private:
  nn::FeedForward ff1_, ff2_;
  nn::LayerNormLayer attn_norm_, conv_norm_, conv_inner_norm_, out_norm_;
  MultiHeadAttention attn_;
  nn::Linear pointwise_in_, pointwise_out_;
  ad::Parameter* depthwise_ = nullptr;
};

class ConformerEncoder {
 public:
  ConformerEncoder() = default;
  ConformerEncoder(nn::ParamStore& store, const std::string& name, const EncoderConfig& cfg);
  FeatureSequence operator()(ad::Tape& t, const FeatureSequence& in) const;

 private:
  EncoderConfig cfg_;
  std::vector<ConformerBlock> blocks_;
};

}  // namespace avsr

#endif  // AVSR_MODEL_CONFORMER_H_
