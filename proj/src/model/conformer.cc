// src/model/conformer.cc

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

#include "avsr/model/conformer.h"

#include "avsr/base/error.h"

namespace avsr {

void EncoderConfig::Validate() const {
  AVSR_CHECK(layers >= 0, "encoder layers must be >= 0");
  AVSR_CHECK(dim > 0 && ffn_dim > 0, "encoder widths must be > 0");
  AVSR_CHECK(heads > 0 && dim % heads == 0, "encoder dim ", dim,
             " not divisible by heads ", heads);
  AVSR_CHECK(conv_kernel > 0 && conv_kernel % 2 == 1, "conv_kernel must be odd");
  AVSR_CHECK(position == PositionEncoding::kAbsolute || max_rel_distance > 0,
             "relative positions need max_rel_distance > 0");
}

ConformerBlock::ConformerBlock(nn::ParamStore& store, const std::string& name,
                               const EncoderConfig& cfg) {
  ff1_ = nn::FeedForward(store, name + ".ff1", cfg.dim, cfg.ffn_dim);
  ff2_ = nn::FeedForward(store, name + ".ff2", cfg.dim, cfg.ffn_dim);
  attn_norm_ = nn::LayerNormLayer(store, name + ".attn_norm", cfg.dim);
  attn_ = MultiHeadAttention(store, name + ".attn", cfg.dim, cfg.heads,
                             cfg.position == PositionEncoding::kRelative ? cfg.max_rel_distance : 0);
  conv_norm_ = nn::LayerNormLayer(store, name + ".conv_norm", cfg.dim);
  pointwise_in_ = nn::Linear(store, name + ".conv_in", cfg.dim, 2 * cfg.dim);
  depthwise_ = store.AddXavier(name + ".depthwise", {cfg.conv_kernel, cfg.dim}, cfg.conv_kernel,
                               cfg.conv_kernel);
  conv_inner_norm_ = nn::LayerNormLayer(store, name + ".conv_inner_norm", cfg.dim);
  pointwise_out_ = nn::Linear(store, name + ".conv_out", cfg.dim, cfg.dim);
  out_norm_ = nn::LayerNormLayer(store, name + ".out_norm", cfg.dim);
}

ad::Var ConformerBlock::operator()(ad::Tape& t, ad::Var x) const {
  x = ad::Add(x, ad::Scale(ff1_(t, x), 0.5));
  ad::Var a = attn_norm_(t, x);
  x = ad::Add(x, attn_(t, a, a));
  ad::Var c = ad::Glu(pointwise_in_(t, conv_norm_(t, x)));
  c = ad::DepthwiseConv1d(c, t.Param(depthwise_));
  c = pointwise_out_(t, ad::Swish(conv_inner_norm_(t, c)));
  x = ad::Add(x, c);
  x = ad::Add(x, ad::Scale(ff2_(t, x), 0.5));
  return out_norm_(t, x);
}

ConformerEncoder::ConformerEncoder(nn::ParamStore& store, const std::string& name,
                                   const EncoderConfig& cfg)
    : cfg_(cfg) {
  cfg.Validate();
  for (int i = 0; i < cfg.layers; ++i) {
    blocks_.emplace_back(store, name + ".layer" + std::to_string(i), cfg);
  }
}

FeatureSequence ConformerEncoder::operator()(ad::Tape& t, const FeatureSequence& in) const {
  if (in.dim() != cfg_.dim) Fail("encoder expects width ", cfg_.dim, ", got ", in.dim());
  ad::Var x = in.frames;
  if (!blocks_.empty() && cfg_.position == PositionEncoding::kAbsolute) {
    x = ad::AddConstant(x, SinusoidalPositions(in.length(), cfg_.dim));
  }
  for (const auto& b : blocks_) x = b(t, x);
  return {x, in.modality};
}

}  // namespace avsr
