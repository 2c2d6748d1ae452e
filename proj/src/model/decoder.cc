// src/model/decoder.cc

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

#include "avsr/model/decoder.h"

#include <cmath>

#include "avsr/base/error.h"

namespace avsr {

TransformerDecoder::TransformerDecoder(nn::ParamStore& store, const std::string& name,
                                       const DecoderConfig& cfg, int vocab_size)
    : cfg_(cfg), vocab_size_(vocab_size) {
  AVSR_CHECK(cfg.layers >= 0, "decoder layers must be >= 0");
  AVSR_CHECK(cfg.heads > 0 && cfg.dim % cfg.heads == 0, "decoder dim ", cfg.dim,
             " not divisible by heads ", cfg.heads);
  AVSR_CHECK(vocab_size > kNumReserved, "decoder vocabulary too small");
  embedding_ = store.AddXavier(name + ".embedding", {vocab_size, cfg.dim}, vocab_size, cfg.dim);
  for (int i = 0; i < cfg.layers; ++i) {
    const std::string ln = name + ".layer" + std::to_string(i);
    Layer l;
    l.self_norm = nn::LayerNormLayer(store, ln + ".self_norm", cfg.dim);
    l.self_attn = MultiHeadAttention(store, ln + ".self_attn", cfg.dim, cfg.heads);
    l.cross_norm = nn::LayerNormLayer(store, ln + ".cross_norm", cfg.dim);
    l.cross_attn = MultiHeadAttention(store, ln + ".cross_attn", cfg.dim, cfg.heads);
    l.ff_norm = nn::LayerNormLayer(store, ln + ".ff_norm", cfg.dim);
    l.up = nn::Linear(store, ln + ".up", cfg.dim, cfg.ffn_dim);
    l.down = nn::Linear(store, ln + ".down", cfg.ffn_dim, cfg.dim);
    layers_.push_back(std::move(l));
  }
  final_norm_ = nn::LayerNormLayer(store, name + ".final_norm", cfg.dim);
  classifier_ = nn::Linear(store, name + ".classifier", cfg.dim, vocab_size);
}

ad::Var TransformerDecoder::operator()(ad::Tape& t, const std::vector<int>& inputs,
                                       ad::Var memory) const {
  AVSR_CHECK(!inputs.empty(), "decoder needs at least one input token");
  AVSR_CHECK(memory.cols() == cfg_.dim, "decoder memory width ", memory.cols(), " != ",
             cfg_.dim);
  const int len = static_cast<int>(inputs.size());
  ad::Var x = ad::Scale(ad::Embedding(t.Param(embedding_), inputs), std::sqrt(cfg_.dim));
  x = ad::AddConstant(x, SinusoidalPositions(len, cfg_.dim));
  const Tensor mask = CausalMask(len);
  for (const Layer& l : layers_) {
    ad::Var s = l.self_norm(t, x);
    x = ad::Add(x, l.self_attn(t, s, s, &mask));
    x = ad::Add(x, l.cross_attn(t, l.cross_norm(t, x), memory));
    x = ad::Add(x, l.down(t, ad::Swish(l.up(t, l.ff_norm(t, x)))));
  }
  return classifier_(t, final_norm_(t, x));
}

}  // namespace avsr
