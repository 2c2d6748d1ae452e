// include/avsr/nn/autodiff.h

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

#ifndef AVSR_NN_AUTODIFF_H_
#define AVSR_NN_AUTODIFF_H_

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "avsr/base/tensor.h"

namespace avsr::ad {

// Trainable array. `grad` is accumulated by Tape::Backward and cleared by the
// optimizer.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
};

class Tape;

// Handle to a node on a tape. Cheap to copy; only valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const Tensor& value() const;
  const std::vector<int>& shape() const { return value().Shape(); }
  int rows() const { return value().Rows(); }
  int cols() const { return value().Cols(); }

 private:
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape. Nodes are appended in evaluation order, so walking them
// backwards is a valid topological order. Node storage is a deque: references
// to values stay valid while new nodes are recorded.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const { return grad_enabled_; }

  Var Constant(Tensor value);
  // Leaf whose gradient can be read back with Grad() after Backward().
  Var Leaf(Tensor value);
  // Leaf bound to a parameter; Backward() adds the node gradient into p->grad.
  Var Param(Parameter* p);

  // Appends an op result. The backward closure is kept only if gradients are
  // enabled and at least one input requires them.
  Var Record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn);

  const Tensor& Value(int id) const { return nodes_[id].value; }
  bool RequiresGrad(int id) const { return nodes_[id].requires_grad; }
  bool RequiresGrad(Var v) const { return nodes_[v.id()].requires_grad; }
  // Gradient buffer, allocated (zeros) on first use.
  Tensor& MutableGrad(int id);
  Tensor& MutableGrad(Var v) { return MutableGrad(v.id()); }
  // Zero-shaped tensor if nothing flowed into the node.
  const Tensor& Grad(Var v) const { return nodes_[v.id()].grad; }

  // Seeds d(loss)/d(loss) = 1 for a single-element node and runs all
  // recorded backward closures.
  void Backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* param = nullptr;
  };

  bool grad_enabled_;
  std::deque<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape_->Value(id_); }

// ---- Ops. Shapes are noted as [rows x cols]; "rows" means all leading dims.

Var MatMul(Var a, Var b);    // [m x k] * [k x n]
Var MatMulNT(Var a, Var b);  // [m x k] * [n x k]^T
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);  // elementwise
Var Scale(Var a, double s);
Var AddRowVector(Var a, Var bias);  // bias broadcast over rows
Var AddConstant(Var a, const Tensor& c);
Var Linear(Var x, Var weight, Var bias);  // x * W + b, W is [in x out]

Var Sigmoid(Var a);
Var Swish(Var a);
Var Relu(Var a);
Var Glu(Var a);  // [r x 2c] -> [r x c], first half * sigmoid(second half)

Var LayerNorm(Var x, Var gain, Var bias, double eps = 1e-5);
Var Softmax(Var x);     // over the last dimension
Var LogSoftmax(Var x);  // over the last dimension

Var Transpose(Var a);
Var SliceCols(Var a, int start, int count);
Var SliceRows(Var a, int start, int count);
Var ConcatCols(const std::vector<Var>& parts);
Var ConcatRows(const std::vector<Var>& parts);
Var Reshape(Var a, std::vector<int> shape);

Var Sum(Var a);   // -> [1]
Var Mean(Var a);  // -> [1]

// Patch extraction over a [T x H x W x C] input. Output rows enumerate output
// positions (t, y, x) in row-major order; columns enumerate (dt, dy, dx, c).
// Out-of-range taps read zero.
struct UnfoldSpec {
  int kt = 1, kh = 1, kw = 1;
  int st = 1, sh = 1, sw = 1;
  int pad_t0 = 0, pad_t1 = 0;
  int pad_h0 = 0, pad_h1 = 0;
  int pad_w0 = 0, pad_w1 = 0;
};
struct UnfoldGeometry {
  int t, h, w;
};
UnfoldGeometry UnfoldOutput(const std::vector<int>& in_shape,
                            const UnfoldSpec& spec);
Var Unfold(Var x, const UnfoldSpec& spec);

// y[t, c] = sum_j w[j, c] * x[t + j - (k - 1) / 2, c], zero padded; k odd.
Var DepthwiseConv1d(Var x, Var w);

// [N x H x W x C] -> [N x H/2 x W/2 x C] (floor), mean of each 2x2 block.
Var AvgPool2x2(Var x);
// [N x H x W x C] -> [N x C]
Var MeanSpatial(Var x);

// Rows of `table` [V x D] selected by ids.
Var Embedding(Var table, const std::vector<int>& ids);

// [T x T] matrix B with B[i][j] = table[head][clamp(j - i, -K, K) + K],
// table shaped [heads x 2K + 1].
Var RelativePositionBias(Var table, int head, int length);

}  // namespace avsr::ad

#endif  // AVSR_NN_AUTODIFF_H_
