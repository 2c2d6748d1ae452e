// tests/oracles.h

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

#ifndef AVSR_TESTS_ORACLES_H_
#define AVSR_TESTS_ORACLES_H_

// Independent reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "avsr/base/random.h"
#include "avsr/data/media.h"
#include "avsr/model/avsr_model.h"
#include "avsr/model/ctc.h"
#include "grad_check.h"

namespace avsr::testing {

// Sum over all (V+1)^T frame labelings whose collapse equals `target`.
inline double BruteForceCtcProb(const Tensor& log_probs, const std::vector<int>& target,
                                int blank = 0) {
  const int T = log_probs.Rows(), V = log_probs.Cols();
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int k : path) {
      if (k != prev && k != blank) collapsed.push_back(k);
      prev = k;
    }
    if (collapsed == target) {
      double lp = 0.0;
      for (int t = 0; t < T; ++t) lp += log_probs.At(t, path[t]);
      total += std::exp(lp);
    }
    int t = 0;
    while (t < T && ++path[t] == V) path[t++] = 0;
    if (t == T) break;
  }
  return total;
}

// Probability that the collapsed labeling starts with `prefix`.
inline double BruteForceCtcPrefixProb(const Tensor& log_probs, const std::vector<int>& prefix,
                                      int blank = 0) {
  const int T = log_probs.Rows(), V = log_probs.Cols();
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    std::vector<int> collapsed;
    int prev = -1;
    for (int k : path) {
      if (k != prev && k != blank) collapsed.push_back(k);
      prev = k;
    }
    if (collapsed.size() >= prefix.size() &&
        std::equal(prefix.begin(), prefix.end(), collapsed.begin())) {
      double lp = 0.0;
      for (int t = 0; t < T; ++t) lp += log_probs.At(t, path[t]);
      total += std::exp(lp);
    }
    int t = 0;
    while (t < T && ++path[t] == V) path[t++] = 0;
    if (t == T) break;
  }
  return total;
}

inline Tensor RandomLogProbs(int T, int V, Rng& rng, double spread = 2.0) {
  Tensor lp = Tensor::Matrix(T, V);
  std::normal_distribution<double> nd(0.0, spread);
  for (int t = 0; t < T; ++t) {
    double z = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < V; ++k) {
      lp.At(t, k) = nd(rng);
      const double m = std::max(z, lp.At(t, k));
      z = m + std::log(std::exp(z - m) + std::exp(lp.At(t, k) - m));
    }
    for (int k = 0; k < V; ++k) lp.At(t, k) -= z;
  }
  return lp;
}

// Quadratic word-level Levenshtein with an explicit full table.
inline long long OracleEditDistance(const std::vector<std::string>& r,
                                    const std::vector<std::string>& h) {
  std::vector<std::vector<long long>> d(r.size() + 1, std::vector<long long>(h.size() + 1));
  for (std::size_t i = 0; i <= r.size(); ++i) d[i][0] = static_cast<long long>(i);
  for (std::size_t j = 0; j <= h.size(); ++j) d[0][j] = static_cast<long long>(j);
  for (std::size_t i = 1; i <= r.size(); ++i) {
    for (std::size_t j = 1; j <= h.size(); ++j) {
      long long best = d[i - 1][j - 1] + (r[i - 1] != h[j - 1]);
      best = std::min(best, d[i - 1][j] + 1);
      best = std::min(best, d[i][j - 1] + 1);
      d[i][j] = best;
    }
  }
  return d[r.size()][h.size()];
}

inline std::vector<std::string> OracleSplit(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline double OracleWer(const std::vector<std::string>& refs, const std::vector<std::string>& hyps) {
  long long edits = 0, words = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto r = OracleSplit(refs[i]);
    edits += OracleEditDistance(r, OracleSplit(hyps[i]));
    words += static_cast<long long>(r.size());
  }
  return static_cast<double>(edits) / words;
}

// A small model for gradient and decoding checks.
inline ModelConfig TinyModelConfig(Modality modality, int vocab_size, std::uint64_t seed,
                                   int dim = 8, int layers = 2) {
  ModelConfig c;
  c.modality = modality;
  c.vocab_size = vocab_size;
  c.init_seed = seed;
  c.frontend.encoder_dim = dim;
  c.frontend.audio_channels = {3, 3, 3};
  c.frontend.audio_blocks = 1;
  c.frontend.video_stem_channels = 2;
  c.frontend.video_stage_channels = {2, 3};
  c.frontend.video_blocks = 1;
  c.encoder.layers = layers;
  c.encoder.dim = dim;
  c.encoder.ffn_dim = 2 * dim;
  c.encoder.heads = 2;
  c.encoder.conv_kernel = 3;
  c.encoder.max_rel_distance = 4;
  c.fusion.hidden = 2 * dim;
  c.fusion.output = dim;
  c.decoder.layers = layers;
  c.decoder.dim = dim;
  c.decoder.ffn_dim = 2 * dim;
  c.decoder.heads = 2;
  c.video_stats = {0.4, 0.25};
  return c;
}

inline Waveform RandomAudio(int samples, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 0.3);
  Waveform w(samples);
  for (double& v : w) v = nd(rng);
  return w;
}

inline VideoClip RandomVideo(int frames, int side, Rng& rng) {
  VideoClip c{frames, side, side, std::vector<double>(static_cast<std::size_t>(frames) * side * side)};
  for (double& v : c.pixels) v = Uniform01(rng);
  return c;
}

// Central differences over every entry of every model parameter (or a
// random subset of `max_entries` entries when > 0).
inline GradCheckResult CheckParameterGradients(AvsrModel& model,
                                               const std::function<ad::Var(ad::Tape&)>& loss_fn,
                                               int max_entries = 0, std::uint64_t seed = 0,
                                               double h = 1e-5) {
  auto params = model.params().All();
  model.params().ZeroGrad();
  {
    ad::Tape tape;
    tape.Backward(loss_fn(tape));
  }
  std::vector<std::pair<ad::Parameter*, std::size_t>> entries;
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.Size(); ++i) entries.emplace_back(p, i);
  }
  if (max_entries > 0 && static_cast<int>(entries.size()) > max_entries) {
    Rng rng(seed);
    std::shuffle(entries.begin(), entries.end(), rng);
    entries.resize(max_entries);
  }
  auto eval = [&]() {
    ad::Tape tape(false);
    return loss_fn(tape).value()[0];
  };
  GradCheckResult r;
  double diff2 = 0, a2 = 0, n2 = 0;
  for (auto& [p, i] : entries) {
    const double orig = p->value[i];
    p->value[i] = orig + h;
    const double up = eval();
    p->value[i] = orig - h;
    const double down = eval();
    p->value[i] = orig;
    const double numeric = (up - down) / (2 * h);
    const double analytic = p->grad[i];
    r.max_rel_err = std::max(r.max_rel_err, EntryRelErr(analytic, numeric));
    diff2 += (analytic - numeric) * (analytic - numeric);
    a2 += analytic * analytic;
    n2 += numeric * numeric;
    ++r.checked;
  }
  r.norm_rel_err = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-300});
  return r;
}

// Full-sequence score of `ids` + eos computed from scratch: teacher-forced
// decoder log-probabilities, the CTC forward algorithm and the LM.
inline Hypothesis ScoreSequence(const AvsrModel& model, const Tensor& memory,
                                const Tensor& ctc_lp, const LanguageModel* lm,
                                const DecodeConfig& cfg, const TokenSequence& ids) {
  ad::Tape t(false);
  TokenSequence in{kSosId};
  in.insert(in.end(), ids.begin(), ids.end());
  const Tensor lp = ad::LogSoftmax(model.DecoderLogits(t, in, t.Constant(memory))).value();
  Hypothesis h;
  h.ids = ids;
  for (std::size_t i = 0; i < ids.size(); ++i) h.attention += lp.At(static_cast<int>(i), ids[i]);
  h.attention += lp.At(static_cast<int>(ids.size()), kEosId);
  h.ctc = CtcLogLikelihood(ctc_lp, ids);
  if (lm) {
    TokenSequence prefix;
    for (int id : ids) {
      h.lm += lm->Score(prefix, id);
      prefix.push_back(id);
    }
    h.lm += lm->Score(prefix, kEosId);
  }
  h.length = static_cast<int>(ids.size());
  h.score = CombineScore(h, cfg);
  return h;
}

// Best complete sequence of at most max_len non-reserved tokens.
inline Hypothesis ExhaustiveSearch(const AvsrModel& model, const Tensor& memory,
                                   const Tensor& ctc_lp, const LanguageModel* lm,
                                   const DecodeConfig& cfg, int max_len) {
  const int first = kNumReserved, n = model.config().vocab_size - kNumReserved;
  Hypothesis best;
  best.score = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (int len = 0; len <= max_len; ++len) {
    std::vector<int> digits(len, 0);
    while (true) {
      TokenSequence ids;
      for (int d : digits) ids.push_back(first + d);
      const Hypothesis h = ScoreSequence(model, memory, ctc_lp, lm, cfg, ids);
      if (!have || h.score > best.score) {
        best = h;
        have = true;
      }
      int i = 0;
      while (i < len && ++digits[i] == n) digits[i++] = 0;
      if (i == len) break;
    }
  }
  return best;
}

// A tiny audio model with its encoder memory and CTC posteriors for one
// random utterance.
struct DecodeFixture {
  std::unique_ptr<AvsrModel> model;
  Tensor memory, ctc_lp;
};

inline DecodeFixture MakeDecodeFixture(int vocab, std::uint64_t seed, int frames) {
  DecodeFixture f;
  ModelConfig cfg = TinyModelConfig(Modality::kAudio, vocab, seed, 8, 1);
  f.model = std::make_unique<AvsrModel>(cfg);
  // Sharpen the output layers so that search decisions are not near-ties.
  Rng rng(seed);
  for (auto* p : f.model->params().All()) {
    if (p->name.rfind("decoder.classifier", 0) == 0 || p->name.rfind("ctc.", 0) == 0) {
      for (double& v : p->value.Vec()) v *= 4.0;
    }
  }
  const Waveform a = RandomAudio(640 * frames, rng);
  ad::Tape t(false);
  const FeatureSequence enc = f.model->Encode(t, &a, nullptr);
  f.memory = enc.frames.value();
  f.ctc_lp = f.model->CtcLogProbs(t, enc).value();
  return f;
}

}  // namespace avsr::testing

#endif  // AVSR_TESTS_ORACLES_H_
