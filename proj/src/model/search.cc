// src/model/search.cc

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

#include "avsr/model/search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "avsr/base/error.h"
#include "avsr/model/ctc.h"

namespace avsr {

namespace {

double Weighted(double w, double x) { return w == 0.0 ? 0.0 : w * x; }

struct Node {
  Hypothesis hyp;
  CtcPrefixScorer::State ctc;
};

// Better score first; equal scores fall back to the token sequence so the
// order is total and reproducible.
bool Better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.ids < b.ids;
}

class Expander {
 public:
  Expander(const AttentionScorer& att, const Tensor* ctc_lp, const LanguageModel* lm,
           const DecodeConfig& cfg, int encoder_frames)
      : att_(att), lm_(lm), cfg_(cfg) {
    AVSR_CHECK(cfg.beam >= 1, "beam must be >= 1");
    AVSR_CHECK(cfg.ctc_weight >= 0 && cfg.lm_weight >= 0, "decode weights must be >= 0");
    if (cfg.ctc_weight > 0) {
      AVSR_CHECK(ctc_lp != nullptr, "CTC weight > 0 needs CTC log-probabilities");
      AVSR_CHECK(ctc_lp->Cols() == att.vocab_size(), "CTC and decoder vocabularies differ");
      ctc_.emplace(*ctc_lp);
    }
    if (cfg.lm_weight > 0) AVSR_CHECK(lm != nullptr, "LM weight > 0 needs a language model");
    max_len_ = cfg.max_len > 0 ? cfg.max_len : std::max(1, encoder_frames);
  }

  Node Root() const {
    Node n;
    if (ctc_) n.ctc = ctc_->Initial();
    n.hyp.score = CombineScore(n.hyp, cfg_);
    return n;
  }

  // All allowed one-token expansions of `n`.
  std::vector<Node> Expand(const Node& n) const {
    const std::vector<double> lp = att_.NextLogProbs(n.hyp.ids);
    AVSR_CHECK(static_cast<int>(lp.size()) == att_.vocab_size(), "scorer returned ",
               lp.size(), " log-probs");
    std::vector<int> tokens;
    tokens.push_back(kEosId);
    if (n.hyp.length < max_len_) {
      for (int c = kNumReserved; c < att_.vocab_size(); ++c) tokens.push_back(c);
    }
    std::vector<Node> out;
    out.reserve(tokens.size());
    for (int c : tokens) {
      Node m;
      m.hyp = n.hyp;
      m.hyp.attention += lp[c];
      if (ctc_) {
        m.ctc = ctc_->Extend(n.ctc, c);
        m.hyp.ctc = m.ctc.psi;
      }
      if (lm_ && cfg_.lm_weight > 0) m.hyp.lm += lm_->Score(n.hyp.ids, c);
      if (c != kEosId) {
        m.hyp.ids.push_back(c);
        ++m.hyp.length;
      }
      m.hyp.score = CombineScore(m.hyp, cfg_);
      out.push_back(std::move(m));
    }
    return out;
  }

 private:
  const AttentionScorer& att_;
  const LanguageModel* lm_;
  const DecodeConfig& cfg_;
  std::optional<CtcPrefixScorer> ctc_;
  int max_len_ = 1;
};

}  // namespace

double CombineScore(const Hypothesis& h, const DecodeConfig& cfg) {
  return h.attention + Weighted(cfg.ctc_weight, h.ctc) + Weighted(cfg.lm_weight, h.lm) +
         Weighted(cfg.length_penalty, h.length);
}

std::vector<Hypothesis> BeamSearch(const AttentionScorer& att, const Tensor* ctc_log_probs,
                                   const LanguageModel* lm, const DecodeConfig& cfg,
                                   int encoder_frames) {
  Expander ex(att, ctc_log_probs, lm, cfg, encoder_frames);
  std::vector<Node> running{ex.Root()};
  std::vector<Hypothesis> ended;
  while (!running.empty()) {
    std::vector<std::pair<Node, bool>> cand;  // (node, ended with eos)
    for (const Node& n : running) {
      const std::size_t before = n.hyp.ids.size();
      for (Node& m : ex.Expand(n)) {
        const bool is_end = m.hyp.ids.size() == before;
        cand.emplace_back(std::move(m), is_end);
      }
    }
    const std::size_t keep = std::min<std::size_t>(cfg.beam, cand.size());
    std::partial_sort(cand.begin(), cand.begin() + keep, cand.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first.hyp.score != b.first.hyp.score) {
                          return a.first.hyp.score > b.first.hyp.score;
                        }
                        return a.first.hyp.ids < b.first.hyp.ids;
                      });
    running.clear();
    for (std::size_t i = 0; i < keep; ++i) {
      if (cand[i].second) {
        ended.push_back(std::move(cand[i].first.hyp));
      } else {
        running.push_back(std::move(cand[i].first));
      }
    }
  }
  std::sort(ended.begin(), ended.end(), Better);
  return ended;
}

Hypothesis GreedySearch(const AttentionScorer& att, const Tensor* ctc_log_probs,
                        const LanguageModel* lm, const DecodeConfig& cfg, int encoder_frames) {
  Expander ex(att, ctc_log_probs, lm, cfg, encoder_frames);
  Node cur = ex.Root();
  while (true) {
    const std::size_t before = cur.hyp.ids.size();
    std::vector<Node> next = ex.Expand(cur);
    auto best = std::min_element(next.begin(), next.end(), [](const Node& a, const Node& b) {
      if (a.hyp.score != b.hyp.score) return a.hyp.score > b.hyp.score;
      return a.hyp.ids < b.hyp.ids;
    });
    if (best->hyp.ids.size() == before) return best->hyp;
    cur = std::move(*best);
  }
}

}  // namespace avsr
