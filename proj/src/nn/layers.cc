// src/nn/layers.cc

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

#include "avsr/nn/layers.h"

#include <cmath>

#include "avsr/base/error.h"

namespace avsr::nn {

Parameter* ParamStore::Insert(const std::string& name, Tensor value) {
  AVSR_CHECK(!by_name_.count(name), "duplicate parameter name '", name, "'");
  Parameter& p = params_.emplace_back();
  p.name = name;
  p.grad = Tensor(value.Shape(), 0.0);
  p.value = std::move(value);
  by_name_[name] = &p;
  return &p;
}

Parameter* ParamStore::AddXavier(const std::string& name, std::vector<int> shape, int fan_in,
                                 int fan_out, double gain) {
  Tensor v(std::move(shape));
  const double bound = gain * std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& x : v.Vec()) x = u(rng_);
  return Insert(name, std::move(v));
}

Parameter* ParamStore::AddConstant(const std::string& name, std::vector<int> shape,
                                   double value) {
  return Insert(name, Tensor(std::move(shape), value));
}

Parameter* ParamStore::Find(const std::string& name) {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

const Parameter* ParamStore::Find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::vector<Parameter*> ParamStore::All() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

std::vector<const Parameter*> ParamStore::All() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(&p);
  return out;
}

std::size_t ParamStore::NumValues() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.Size();
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto& p : params_) p.grad.SetZero();
}

Linear::Linear(ParamStore& store, const std::string& name, int in, int out, bool bias)
    : in_(in), out_(out) {
  w_ = store.AddXavier(name + ".weight", {in, out}, in, out);
  if (bias) b_ = store.AddConstant(name + ".bias", {out}, 0.0);
}

Var Linear::operator()(Tape& t, Var x) const {
  AVSR_CHECK(x.cols() == in_, "linear expects width ", in_, ", got ", x.cols());
  Var y = ad::MatMul(x, t.Param(w_));  // leading dims flatten into rows
  if (b_) y = ad::AddRowVector(y, t.Param(b_));
  if (x.shape().size() != 2) {
    std::vector<int> shape = x.shape();
    shape.back() = out_;
    y = ad::Reshape(y, shape);
  }
  return y;
}

LayerNormLayer::LayerNormLayer(ParamStore& store, const std::string& name, int dim) {
  gain_ = store.AddConstant(name + ".gain", {dim}, 1.0);
  bias_ = store.AddConstant(name + ".bias", {dim}, 0.0);
}

Var LayerNormLayer::operator()(Tape& t, Var x) const {
  return ad::LayerNorm(x, t.Param(gain_), t.Param(bias_));
}

Conv::Conv(ParamStore& store, const std::string& name, int c_in, int c_out,
           const ad::UnfoldSpec& spec, bool bias)
    : spec_(spec), c_in_(c_in), c_out_(c_out) {
  proj_ = Linear(store, name, spec.kt * spec.kh * spec.kw * c_in, c_out, bias);
}

Var Conv::operator()(Tape& t, Var x) const {
  AVSR_CHECK(x.shape().size() == 4 && x.shape()[3] == c_in_, "conv expects [T x H x W x ",
             c_in_, "], got ", x.value().ShapeString());
  const ad::UnfoldGeometry g = ad::UnfoldOutput(x.shape(), spec_);
  Var y = proj_(t, ad::Unfold(x, spec_));
  return ad::Reshape(y, {g.t, g.h, g.w, c_out_});
}

FeedForward::FeedForward(ParamStore& store, const std::string& name, int dim, int hidden) {
  norm_ = LayerNormLayer(store, name + ".norm", dim);
  up_ = Linear(store, name + ".up", dim, hidden);
  down_ = Linear(store, name + ".down", hidden, dim);
}

Var FeedForward::operator()(Tape& t, Var x) const {
  return down_(t, ad::Swish(up_(t, norm_(t, x))));
}

}  // namespace avsr::nn
