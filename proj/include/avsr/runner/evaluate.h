// include/avsr/runner/evaluate.h

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

#ifndef AVSR_RUNNER_EVALUATE_H_
#define AVSR_RUNNER_EVALUATE_H_

#include <optional>
#include <string>
#include <vector>

#include "avsr/augment/augment.h"
#include "avsr/data/manifest.h"
#include "avsr/model/avsr_model.h"
#include "avsr/model/lm.h"
#include "avsr/runner/metrics.h"
#include "avsr/tokenizer/bpe.h"

namespace avsr {

struct EvalOptions {
  DecodeConfig decode;
  // Noise mixed into the audio of every record; the noise segment and offset
  // are seeded from (noise.seed, record id).
  std::optional<NoiseSpec> noise;
  // Source utterances for babble noise.
  const Manifest* babble_corpus = nullptr;
  const LanguageModel* lm = nullptr;
};

struct EvalResult {
  WerStats wer;
  std::vector<std::string> ids, refs, hyps;
};

// Decodes every record and scores corpus-level WER against the transcripts.
EvalResult Evaluate(const AvsrModel& model, const Vocabulary& vocab, const Manifest& m,
                    const EvalOptions& opts);

}  // namespace avsr

#endif  // AVSR_RUNNER_EVALUATE_H_
