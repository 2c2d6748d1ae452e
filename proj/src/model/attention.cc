// src/model/attention.cc

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

#include "avsr/model/attention.h"

#include <cmath>

#include "avsr/base/error.h"

namespace avsr {

MultiHeadAttention::MultiHeadAttention(nn::ParamStore& store, const std::string& name,
                                       int dim, int heads, int max_rel_distance)
    : dim_(dim), heads_(heads) {
  AVSR_CHECK(heads > 0 && dim % heads == 0, "dim ", dim, " not divisible by ", heads,
             " heads");
  q_ = nn::Linear(store, name + ".q", dim, dim);
  k_ = nn::Linear(store, name + ".k", dim, dim);
  v_ = nn::Linear(store, name + ".v", dim, dim);
  out_ = nn::Linear(store, name + ".out", dim, dim);
  if (max_rel_distance > 0) {
    rel_table_ = store.AddConstant(name + ".rel_bias", {heads, 2 * max_rel_distance + 1}, 0.0);
  }
}

ad::Var MultiHeadAttention::operator()(ad::Tape& t, ad::Var query, ad::Var memory,
                                       const Tensor* mask) const {
  AVSR_CHECK(query.cols() == dim_ && memory.cols() == dim_, "attention width mismatch");
  const int dk = dim_ / heads_;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  ad::Var q = q_(t, query), k = k_(t, memory), v = v_(t, memory);
  ad::Var table;
  if (rel_table_) {
    AVSR_CHECK(query.rows() == memory.rows(), "relative bias needs self attention");
    table = t.Param(rel_table_);
  }
  std::vector<ad::Var> outs;
  for (int h = 0; h < heads_; ++h) {
    ad::Var qh = ad::SliceCols(q, h * dk, dk);
    ad::Var kh = ad::SliceCols(k, h * dk, dk);
    ad::Var vh = ad::SliceCols(v, h * dk, dk);
    ad::Var scores = ad::Scale(ad::MatMulNT(qh, kh), scale);
    if (rel_table_) scores = ad::Add(scores, ad::RelativePositionBias(table, h, query.rows()));
    if (mask) scores = ad::AddConstant(scores, *mask);
    outs.push_back(ad::MatMul(ad::Softmax(scores), vh));
  }
  return out_(t, heads_ == 1 ? outs[0] : ad::ConcatCols(outs));
}

Tensor SinusoidalPositions(int length, int dim) {
  Tensor pe = Tensor::Matrix(length, dim);
  for (int p = 0; p < length; ++p) {
    for (int i = 0; i < dim; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / dim);
      pe.At(p, i) = (i % 2 == 0) ? std::sin(p * freq) : std::cos(p * freq);
    }
  }
  return pe;
}

Tensor CausalMask(int length) {
  Tensor m = Tensor::Matrix(length, length);
  for (int i = 0; i < length; ++i) {
    for (int j = i + 1; j < length; ++j) m.At(i, j) = -1e9;
  }
  return m;
}

}  // namespace avsr
