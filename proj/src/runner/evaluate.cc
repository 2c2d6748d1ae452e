// src/runner/evaluate.cc

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

#include "avsr/runner/evaluate.h"

#include "avsr/base/error.h"
#include "avsr/base/parallel.h"
#include "avsr/base/random.h"

namespace avsr {

EvalResult Evaluate(const AvsrModel& model, const Vocabulary& vocab, const Manifest& m,
                    const EvalOptions& opts) {
  if (m.records.empty()) Fail("cannot evaluate on an empty manifest");
  if (vocab.size() != model.config().vocab_size) {
    Fail("vocabulary has ", vocab.size(), " pieces but the model expects ",
         model.config().vocab_size);
  }
  if (opts.noise && opts.noise->kind == NoiseKind::kBabble && !opts.babble_corpus) {
    Fail("babble noise needs a source corpus");
  }
  const Modality modality = model.config().modality;
  const bool audio = modality != Modality::kVideo;
  const bool video = modality != Modality::kAudio;
  EvalResult out;
  out.ids.resize(m.records.size());
  out.refs.resize(m.records.size());
  out.hyps.resize(m.records.size());
  ParallelFor(m.records.size(), [&](std::size_t i) {
    const SampleRecord& r = m.records[i];
    Waveform a;
    VideoClip v;
    if (audio) {
      a = LoadAudio(r, m.base_dir);
      if (opts.noise && opts.noise->snr_db != kCleanSnr) {
        const std::uint64_t seed = DeriveSeed(opts.noise->seed, HashString(r.id));
        const Waveform n = MakeNoise(opts.noise->kind, a.size(), seed, opts.babble_corpus);
        a = MixAtSnr(a, n, opts.noise->snr_db, seed);
      }
    }
    if (video) v = LoadVideo(r, m.base_dir);
    const auto hyps = model.Decode(audio ? &a : nullptr, video ? &v : nullptr, opts.decode, opts.lm);
    out.ids[i] = r.id;
    out.refs[i] = r.transcript;
    out.hyps[i] = hyps.empty() ? std::string() : vocab.Decode(hyps.front().ids);
  });
  out.wer = CorpusWer(out.refs, out.hyps);
  return out;
}

}  // namespace avsr
