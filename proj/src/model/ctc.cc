// src/model/ctc.cc

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

#include "avsr/model/ctc.h"

#include <cmath>
#include <limits>

#include "avsr/base/error.h"

namespace avsr {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

int CtcMinFrames(const TokenSequence& target) {
  int n = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i) n += target[i] == target[i - 1];
  return n;
}

double CtcLogLikelihood(const Tensor& lp, const TokenSequence& target, int blank,
                        Tensor* grad) {
  const int T = lp.Rows(), V = lp.Cols();
  for (int y : target) {
    AVSR_CHECK(y >= 0 && y < V && y != blank, "CTC target id ", y, " invalid");
  }
  if (grad) *grad = Tensor(lp.Shape(), 0.0);
  if (T == 0) return target.empty() ? 0.0 : kNegInf;
  const int S = 2 * static_cast<int>(target.size()) + 1;
  auto label = [&](int s) { return s % 2 == 0 ? blank : target[s / 2]; };
  auto skip_ok = [&](int s) {  // may jump from s - 2 to s
    return s >= 2 && label(s) != blank && label(s) != label(s - 2);
  };

  std::vector<double> alpha(static_cast<std::size_t>(T) * S, kNegInf);
  auto A = [&](int t, int s) -> double& { return alpha[static_cast<std::size_t>(t) * S + s]; };
  A(0, 0) = lp.At(0, blank);
  if (S > 1) A(0, 1) = lp.At(0, label(1));
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double v = A(t - 1, s);
      if (s >= 1) v = LogAdd(v, A(t - 1, s - 1));
      if (skip_ok(s)) v = LogAdd(v, A(t - 1, s - 2));
      A(t, s) = v == kNegInf ? kNegInf : v + lp.At(t, label(s));
    }
  }
  double ll = A(T - 1, S - 1);
  if (S > 1) ll = LogAdd(ll, A(T - 1, S - 2));
  if (ll == kNegInf || !grad) return ll;

  // beta excludes the emission at t.
  std::vector<double> beta(static_cast<std::size_t>(T) * S, kNegInf);
  auto B = [&](int t, int s) -> double& { return beta[static_cast<std::size_t>(t) * S + s]; };
  B(T - 1, S - 1) = 0.0;
  if (S > 1) B(T - 1, S - 2) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double v = B(t + 1, s) + lp.At(t + 1, label(s));
      if (s + 1 < S) v = LogAdd(v, B(t + 1, s + 1) + lp.At(t + 1, label(s + 1)));
      if (s + 2 < S && skip_ok(s + 2)) v = LogAdd(v, B(t + 1, s + 2) + lp.At(t + 1, label(s + 2)));
      B(t, s) = v;
    }
  }
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double a = A(t, s), b = B(t, s);
      if (a == kNegInf || b == kNegInf) continue;
      grad->At(t, label(s)) += std::exp(a + b - ll);
    }
  }
  return ll;
}

ad::Var CtcLoss(ad::Var log_probs, const TokenSequence& target, int blank) {
  const Tensor& lp = log_probs.value();
  AVSR_CHECK(lp.Rank() == 2, "CTC expects [T x V] log-probabilities");
  for (int t = 0; t < lp.Rows(); ++t) {
    double z = kNegInf;
    for (int k = 0; k < lp.Cols(); ++k) z = LogAdd(z, lp.At(t, k));
    // NaN rows pass through so that the caller sees a non-finite loss.
    AVSR_CHECK(std::isnan(z) || std::abs(z) < 1e-6, "CTC input row ", t, " is not normalized (logsumexp ", z, ")");
  }
  auto grad = std::make_shared<Tensor>();
  const bool want_grad = log_probs.tape()->RequiresGrad(log_probs);
  const double ll = CtcLogLikelihood(lp, target, blank, want_grad ? grad.get() : nullptr);
  return log_probs.tape()->Record(
      Tensor::Scalar(-ll), {log_probs}, [log_probs, grad, ll](ad::Tape& t, const Tensor& g) {
        if (ll == kNegInf) return;
        Tensor& d = t.MutableGrad(log_probs);
        for (std::size_t i = 0; i < d.Size(); ++i) d[i] -= g[0] * (*grad)[i];
      });
}

CtcPrefixScorer::CtcPrefixScorer(const Tensor& log_probs, int blank, int eos)
    : lp_(log_probs), blank_(blank), eos_(eos), frames_(log_probs.Rows()) {
  AVSR_CHECK(frames_ > 0, "CTC prefix scoring needs at least one frame");
}

CtcPrefixScorer::State CtcPrefixScorer::Initial() const {
  State s;
  s.r_nonblank.assign(frames_, kNegInf);
  s.r_blank.resize(frames_);
  double acc = 0.0;
  for (int t = 0; t < frames_; ++t) {
    acc += lp_.At(t, blank_);
    s.r_blank[t] = acc;
  }
  s.psi = 0.0;
  s.last = -1;
  return s;
}

CtcPrefixScorer::State CtcPrefixScorer::Extend(const State& g, int c) const {
  State h;
  h.last = c;
  if (c == eos_) {
    h.psi = LogAdd(g.r_nonblank[frames_ - 1], g.r_blank[frames_ - 1]);
    return h;
  }
  h.r_nonblank.assign(frames_, kNegInf);
  h.r_blank.assign(frames_, kNegInf);
  h.r_nonblank[0] = g.last == -1 ? lp_.At(0, c) : kNegInf;
  double psi = h.r_nonblank[0];
  for (int t = 1; t < frames_; ++t) {
    const double phi = LogAdd(g.r_blank[t - 1], c == g.last ? kNegInf : g.r_nonblank[t - 1]);
    const double emit = lp_.At(t, c);
    h.r_nonblank[t] = LogAdd(h.r_nonblank[t - 1], phi) + emit;
    h.r_blank[t] = LogAdd(h.r_blank[t - 1], h.r_nonblank[t - 1]) + lp_.At(t, blank_);
    psi = LogAdd(psi, phi + emit);
  }
  h.psi = psi;
  return h;
}

}  // namespace avsr
