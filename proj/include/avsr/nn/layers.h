// include/avsr/nn/layers.h

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

#ifndef AVSR_NN_LAYERS_H_
#define AVSR_NN_LAYERS_H_

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "avsr/base/random.h"
#include "avsr/nn/autodiff.h"

namespace avsr::nn {

using ad::Parameter;
using ad::Tape;
using ad::Var;

// Owns every trainable array of a model under a unique hierarchical name.
// Addresses are stable for the life of the store.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : rng_(seed) {}
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  // Uniform(-bound, bound) with bound = gain * sqrt(6 / (fan_in + fan_out)).
  Parameter* AddXavier(const std::string& name, std::vector<int> shape, int fan_in,
                       int fan_out, double gain = 1.0);
  Parameter* AddConstant(const std::string& name, std::vector<int> shape, double value);

  Parameter* Find(const std::string& name);
  const Parameter* Find(const std::string& name) const;
  std::vector<Parameter*> All();
  std::vector<const Parameter*> All() const;
  std::size_t NumValues() const;
  void ZeroGrad();

 private:
  Parameter* Insert(const std::string& name, Tensor value);

  Rng rng_;
  std::deque<Parameter> params_;
  std::map<std::string, Parameter*> by_name_;
};

class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, int in, int out, bool bias = true);
  Var operator()(Tape& t, Var x) const;
  int in() const { return in_; }
  int out() const { return out_; }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
  int in_ = 0, out_ = 0;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParamStore& store, const std::string& name, int dim);
  Var operator()(Tape& t, Var x) const;

 private:
  Parameter* gain_ = nullptr;
  Parameter* bias_ = nullptr;
};

// Convolution over a [T x H x W x C] activation realized as unfold + GEMM.
// The weight is [kt*kh*kw*C_in x C_out] in (dt, dy, dx, c) row order.
class Conv {
 public:
  Conv() = default;
  Conv(ParamStore& store, const std::string& name, int c_in, int c_out,
       const ad::UnfoldSpec& spec, bool bias = true);
  Var operator()(Tape& t, Var x) const;
  const ad::UnfoldSpec& spec() const { return spec_; }
  int c_out() const { return c_out_; }

 private:
  Linear proj_;
  ad::UnfoldSpec spec_;
  int c_in_ = 0, c_out_ = 0;
};

// Feed-forward sublayer: LN -> Linear -> Swish -> Linear.
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParamStore& store, const std::string& name, int dim, int hidden);
  Var operator()(Tape& t, Var x) const;

 private:
  LayerNormLayer norm_;
  Linear up_, down_;
};

}  // namespace avsr::nn

#endif  // AVSR_NN_LAYERS_H_
