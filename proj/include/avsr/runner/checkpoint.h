// include/avsr/runner/checkpoint.h

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

#ifndef AVSR_RUNNER_CHECKPOINT_H_
#define AVSR_RUNNER_CHECKPOINT_H_

#include <map>
#include <memory>
#include <string>

#include "avsr/base/tensor.h"
#include "avsr/model/avsr_model.h"
#include "avsr/runner/config.h"
#include "avsr/tokenizer/bpe.h"

namespace avsr {

// Binary layout (little-endian):
//   "AVSRCKPT" u32 version
//   u64 n, config text (key=value lines, model.* keys plus metadata)
//   u64 n, vocabulary text (one piece per line)
//   u32 count, then per array: u32 n, name, u32 rank, i32 dims[rank],
//   f64 values[prod(dims)]
struct Checkpoint {
  Config config;
  Vocabulary vocab;
  std::map<std::string, Tensor> arrays;
};

void SaveCheckpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

// Snapshot of a model's parameters and configuration. `meta` keys are copied
// into the embedded config.
Checkpoint MakeCheckpoint(const AvsrModel& model, const Vocabulary& vocab,
                          const Config& meta = {});

// Rebuilds the model from the embedded config and copies every array; names
// and shapes must match exactly.
std::unique_ptr<AvsrModel> RestoreModel(const Checkpoint& ckpt);

}  // namespace avsr

#endif  // AVSR_RUNNER_CHECKPOINT_H_
