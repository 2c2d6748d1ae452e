// src/model/fusion.cc

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

#include "avsr/model/fusion.h"

#include <algorithm>
#include <cstdlib>

#include "avsr/base/error.h"

namespace avsr {

FusionMlp::FusionMlp(nn::ParamStore& store, const std::string& name, int dim,
                     const FusionConfig& cfg)
    : dim_(dim) {
  AVSR_CHECK(cfg.output == dim, "fusion output width ", cfg.output,
             " must equal encoder width ", dim);
  AVSR_CHECK(cfg.hidden > 0, "fusion hidden width must be > 0");
  hidden_ = nn::Linear(store, name + ".hidden", 2 * dim, cfg.hidden);
  out_ = nn::Linear(store, name + ".out", cfg.hidden, cfg.output);
}

FeatureSequence FusionMlp::operator()(ad::Tape& t, const FeatureSequence& audio,
                                      const FeatureSequence& video) const {
  AVSR_CHECK(audio.dim() == dim_ && video.dim() == dim_, "fusion expects width ", dim_);
  const int ta = audio.length(), tv = video.length();
  if (std::abs(ta - tv) > 1) {
    Fail("audio (", ta, " frames) and video (", tv, " frames) are misaligned by more than 1");
  }
  const int len = std::min(ta, tv);
  ad::Var a = ta == len ? audio.frames : ad::SliceRows(audio.frames, 0, len);
  ad::Var v = tv == len ? video.frames : ad::SliceRows(video.frames, 0, len);
  ad::Var h = ad::Swish(hidden_(t, ad::ConcatCols({a, v})));
  return {out_(t, h), Modality::kFused};
}

}  // namespace avsr
