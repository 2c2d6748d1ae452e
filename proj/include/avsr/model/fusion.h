// include/avsr/model/fusion.h

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

#ifndef AVSR_MODEL_FUSION_H_
#define AVSR_MODEL_FUSION_H_

#include <string>

#include "avsr/frontend/frontend.h"
#include "avsr/nn/layers.h"

namespace avsr {

struct FusionConfig {
  int hidden = 256;
  int output = 64;  // must equal the encoder width
};

// Per-frame concatenation [T x 2D] -> hidden -> D. The longer stream is
// truncated when the lengths differ by one frame.
class FusionMlp {
 public:
  FusionMlp() = default;
  FusionMlp(nn::ParamStore& store, const std::string& name, int dim, const FusionConfig& cfg);
  FeatureSequence operator()(ad::Tape& t, const FeatureSequence& audio,
                             const FeatureSequence& video) const;

 private:
  int dim_ = 0;
  nn::Linear hidden_, out_;
};

}  // namespace avsr

#endif  // AVSR_MODEL_FUSION_H_
