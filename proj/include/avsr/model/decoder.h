// include/avsr/model/decoder.h

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

#ifndef AVSR_MODEL_DECODER_H_
#define AVSR_MODEL_DECODER_H_

#include <string>
#include <vector>

#include "avsr/model/attention.h"
#include "avsr/nn/layers.h"
#include "avsr/tokenizer/bpe.h"

namespace avsr {

struct DecoderConfig {
  int layers = 2;
  int dim = 64;
  int ffn_dim = 256;
  int heads = 4;
};

// Pre-norm Transformer decoder with causal self attention and cross attention
// over the encoder output.
class TransformerDecoder {
 public:
  TransformerDecoder() = default;
  TransformerDecoder(nn::ParamStore& store, const std::string& name, const DecoderConfig& cfg,
                     int vocab_size);

  // Logits [L x V] for input tokens [L] (sos-prefixed) and memory [T x D].
  ad::Var operator()(ad::Tape& t, const std::vector<int>& inputs, ad::Var memory) const;
  int vocab_size() const { return vocab_size_; }

 private:
  struct Layer {
    nn::LayerNormLayer self_norm, cross_norm, ff_norm;
    MultiHeadAttention self_attn, cross_attn;
    nn::Linear up, down;
  };
  DecoderConfig cfg_;
  int vocab_size_ = 0;
  ad::Parameter* embedding_ = nullptr;
  std::vector<Layer> layers_;
  nn::LayerNormLayer final_norm_;
  nn::Linear classifier_;
};

}  // namespace avsr

#endif  // AVSR_MODEL_DECODER_H_
