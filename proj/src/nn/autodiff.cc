// src/nn/autodiff.cc

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

#include "avsr/nn/autodiff.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "avsr/base/error.h"
#include "avsr/base/kernels.h"

namespace avsr::ad {

Var Tape::Constant(Tensor value) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Leaf(Tensor value) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = grad_enabled_;
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Param(Parameter* p) {
  Node& n = nodes_.emplace_back();
  n.value = p->value;
  n.requires_grad = grad_enabled_;
  n.param = p;
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(Tensor value, std::initializer_list<Var> inputs,
                 BackwardFn fn) {
  bool needs = false;
  if (grad_enabled_) {
    for (const Var& v : inputs) needs = needs || nodes_[v.id()].requires_grad;
  }
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = needs;
  if (needs) n.backward = std::move(fn);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Record(Tensor value, const std::vector<Var>& inputs, BackwardFn fn) {
  bool needs = false;
  if (grad_enabled_) {
    for (const Var& v : inputs) needs = needs || nodes_[v.id()].requires_grad;
  }
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.requires_grad = needs;
  if (needs) n.backward = std::move(fn);
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Tensor& Tape::MutableGrad(int id) {
  Node& n = nodes_[id];
  if (n.grad.Size() != n.value.Size()) n.grad = Tensor(n.value.Shape(), 0.0);
  return n.grad;
}

void Tape::Backward(Var loss) {
  AVSR_CHECK(loss.value().Size() == 1, "Backward needs a scalar, got ",
             loss.value().ShapeString());
  MutableGrad(loss.id()).Fill(1.0);
  const KernelTable& k = Kernels();
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.Empty()) continue;
    if (n.backward) n.backward(*this, n.grad);
    if (n.param != nullptr) {
      Tensor& pg = n.param->grad;
      if (pg.Size() != n.value.Size()) pg = Tensor(n.value.Shape(), 0.0);
      k.axpy(pg.Size(), 1.0, n.grad.Data(), pg.Data());
    }
  }
}

namespace {

const KernelTable& K() { return Kernels(); }

void CheckSameShape(const Tensor& a, const Tensor& b, const char* op) {
  AVSR_CHECK(a.SameShape(b), op, ": shape mismatch ", a.ShapeString(), " vs ",
             b.ShapeString());
}

void AccumulateInto(Tape& t, Var v, const Tensor& g, double alpha = 1.0) {
  if (!t.RequiresGrad(v)) return;
  Tensor& dst = t.MutableGrad(v);
  K().axpy(g.Size(), alpha, g.Data(), dst.Data());
}

}  // namespace

Var MatMul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const int m = av.Rows(), kk = av.Cols(), n = bv.Cols();
  AVSR_CHECK(bv.Rows() == kk, "MatMul: ", av.ShapeString(), " * ",
             bv.ShapeString());
  Tensor out = Tensor::Matrix(m, n);
  K().gemm_nn(m, n, kk, av.Data(), kk, bv.Data(), n, out.Data(), n);
  return a.tape()->Record(std::move(out), {a, b},
                          [a, b, m, n, kk](Tape& t, const Tensor& g) {
                            if (t.RequiresGrad(a)) {
                              // dA += dC * B^T
                              K().gemm_nt(m, kk, n, g.Data(), n, b.value().Data(), n,
                                          t.MutableGrad(a).Data(), kk);
                            }
                            if (t.RequiresGrad(b)) {
                              // dB += A^T * dC
                              K().gemm_tn(kk, n, m, a.value().Data(), kk, g.Data(), n,
                                          t.MutableGrad(b).Data(), n);
                            }
                          });
}

Var MatMulNT(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const int m = av.Rows(), kk = av.Cols(), n = bv.Rows();
  AVSR_CHECK(bv.Cols() == kk, "MatMulNT: ", av.ShapeString(), " * ",
             bv.ShapeString(), "^T");
  Tensor out = Tensor::Matrix(m, n);
  K().gemm_nt(m, n, kk, av.Data(), kk, bv.Data(), kk, out.Data(), n);
  return a.tape()->Record(std::move(out), {a, b},
                          [a, b, m, n, kk](Tape& t, const Tensor& g) {
                            if (t.RequiresGrad(a)) {
                              // dA += dC * B
                              K().gemm_nn(m, kk, n, g.Data(), n, b.value().Data(), kk,
                                          t.MutableGrad(a).Data(), kk);
                            }
                            if (t.RequiresGrad(b)) {
                              // dB += dC^T * A
                              K().gemm_tn(n, kk, m, g.Data(), n, a.value().Data(), kk,
                                          t.MutableGrad(b).Data(), kk);
                            }
                          });
}

Var Add(Var a, Var b) {
  CheckSameShape(a.value(), b.value(), "Add");
  Tensor out = a.value();
  K().axpy(out.Size(), 1.0, b.value().Data(), out.Data());
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    AccumulateInto(t, a, g);
    AccumulateInto(t, b, g);
  });
}

Var Sub(Var a, Var b) {
  CheckSameShape(a.value(), b.value(), "Sub");
  Tensor out = a.value();
  K().axpy(out.Size(), -1.0, b.value().Data(), out.Data());
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    AccumulateInto(t, a, g);
    AccumulateInto(t, b, g, -1.0);
  });
}

Var Mul(Var a, Var b) {
  CheckSameShape(a.value(), b.value(), "Mul");
  Tensor out(a.value().Shape());
  K().hadamard(out.Size(), a.value().Data(), b.value().Data(), out.Data());
  return a.tape()->Record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& g) {
    const std::size_t n = g.Size();
    if (t.RequiresGrad(a)) {
      double* da = t.MutableGrad(a).Data();
      const double* bv = b.value().Data();
      for (std::size_t i = 0; i < n; ++i) da[i] += g[i] * bv[i];
    }
    if (t.RequiresGrad(b)) {
      double* db = t.MutableGrad(b).Data();
      const double* av = a.value().Data();
      for (std::size_t i = 0; i < n; ++i) db[i] += g[i] * av[i];
    }
  });
}

Var Scale(Var a, double s) {
  Tensor out = a.value();
  K().scale(out.Size(), s, out.Data());
  return a.tape()->Record(std::move(out), {a},
                          [a, s](Tape& t, const Tensor& g) { AccumulateInto(t, a, g, s); });
}

Var AddRowVector(Var a, Var bias) {
  const Tensor& av = a.value();
  const int rows = av.Rows(), cols = av.Cols();
  AVSR_CHECK(static_cast<int>(bias.value().Size()) == cols,
             "AddRowVector: bias size ", bias.value().Size(), " vs cols ", cols);
  Tensor out = av;
  for (int r = 0; r < rows; ++r) {
    K().axpy(cols, 1.0, bias.value().Data(), out.Row(r));
  }
  return a.tape()->Record(std::move(out), {a, bias},
                          [a, bias, rows, cols](Tape& t, const Tensor& g) {
                            AccumulateInto(t, a, g);
                            if (t.RequiresGrad(bias)) {
                              double* db = t.MutableGrad(bias).Data();
                              for (int r = 0; r < rows; ++r) {
                                K().axpy(cols, 1.0, g.Data() + static_cast<std::size_t>(r) * cols, db);
                              }
                            }
                          });
}

Var AddConstant(Var a, const Tensor& c) {
  CheckSameShape(a.value(), c, "AddConstant");
  Tensor out = a.value();
  K().axpy(out.Size(), 1.0, c.Data(), out.Data());
  return a.tape()->Record(std::move(out), {a},
                          [a](Tape& t, const Tensor& g) { AccumulateInto(t, a, g); });
}

Var Linear(Var x, Var weight, Var bias) {
  return AddRowVector(MatMul(x, weight), bias);
}

namespace {

template <typename Fwd, typename Deriv>
Var Pointwise(Var a, Fwd fwd, Deriv deriv) {
  const Tensor& av = a.value();
  Tensor out(av.Shape());
  for (std::size_t i = 0; i < av.Size(); ++i) out[i] = fwd(av[i]);
  return a.tape()->Record(std::move(out), {a}, [a, deriv](Tape& t, const Tensor& g) {
    const Tensor& x = a.value();
    double* da = t.MutableGrad(a).Data();
    for (std::size_t i = 0; i < x.Size(); ++i) da[i] += g[i] * deriv(x[i]);
  });
}

inline double SigmoidScalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var Sigmoid(Var a) {
  return Pointwise(
      a, [](double x) { return SigmoidScalar(x); },
      [](double x) {
        const double s = SigmoidScalar(x);
        return s * (1.0 - s);
      });
}

Var Swish(Var a) {
  return Pointwise(
      a, [](double x) { return x * SigmoidScalar(x); },
      [](double x) {
        const double s = SigmoidScalar(x);
        return s * (1.0 + x * (1.0 - s));
      });
}

Var Relu(Var a) {
  return Pointwise(
      a, [](double x) { return x > 0 ? x : 0.0; },
      [](double x) { return x > 0 ? 1.0 : 0.0; });
}

Var Glu(Var a) {
  const Tensor& av = a.value();
  const int rows = av.Rows(), cols2 = av.Cols();
  AVSR_CHECK(cols2 % 2 == 0, "Glu needs an even width");
  const int c = cols2 / 2;
  std::vector<int> shape = av.Shape();
  shape.back() = c;
  Tensor out(shape);
  for (int r = 0; r < rows; ++r) {
    const double* in = av.Row(r);
    double* o = out.Data() + static_cast<std::size_t>(r) * c;
    for (int j = 0; j < c; ++j) o[j] = in[j] * SigmoidScalar(in[c + j]);
  }
  return a.tape()->Record(std::move(out), {a}, [a, rows, c](Tape& t, const Tensor& g) {
    const Tensor& x = a.value();
    Tensor& da = t.MutableGrad(a);
    for (int r = 0; r < rows; ++r) {
      const double* in = x.Row(r);
      double* d = da.Row(r);
      const double* go = g.Data() + static_cast<std::size_t>(r) * c;
      for (int j = 0; j < c; ++j) {
        const double s = SigmoidScalar(in[c + j]);
        d[j] += go[j] * s;
        d[c + j] += go[j] * in[j] * s * (1.0 - s);
      }
    }
  });
}

Var LayerNorm(Var x, Var gain, Var bias, double eps) {
  const Tensor& xv = x.value();
  const int rows = xv.Rows(), cols = xv.Cols();
  AVSR_CHECK(static_cast<int>(gain.value().Size()) == cols &&
                 static_cast<int>(bias.value().Size()) == cols,
             "LayerNorm: parameter width mismatch");
  Tensor out(xv.Shape());
  // Cache normalized values and inverse std for the backward pass.
  auto xhat = std::make_shared<Tensor>(xv.Shape());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  const double* gv = gain.value().Data();
  const double* bv = bias.value().Data();
  for (int r = 0; r < rows; ++r) {
    const double* in = xv.Row(r);
    double mean = 0.0;
    for (int j = 0; j < cols; ++j) mean += in[j];
    mean /= cols;
    double var = 0.0;
    for (int j = 0; j < cols; ++j) var += (in[j] - mean) * (in[j] - mean);
    var /= cols;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    double* xh = xhat->Row(r);
    double* o = out.Row(r);
    for (int j = 0; j < cols; ++j) {
      xh[j] = (in[j] - mean) * is;
      o[j] = xh[j] * gv[j] + bv[j];
    }
  }
  return x.tape()->Record(
      std::move(out), {x, gain, bias},
      [x, gain, bias, rows, cols, xhat, inv_std](Tape& t, const Tensor& g) {
        const double* gv = gain.value().Data();
        const bool need_x = t.RequiresGrad(x);
        double* dgain = t.RequiresGrad(gain) ? t.MutableGrad(gain).Data() : nullptr;
        double* dbias = t.RequiresGrad(bias) ? t.MutableGrad(bias).Data() : nullptr;
        std::vector<double> dxhat(cols);
        for (int r = 0; r < rows; ++r) {
          const double* go = g.Data() + static_cast<std::size_t>(r) * cols;
          const double* xh = xhat->Row(r);
          if (dgain) for (int j = 0; j < cols; ++j) dgain[j] += go[j] * xh[j];
          if (dbias) for (int j = 0; j < cols; ++j) dbias[j] += go[j];
          if (!need_x) continue;
          double mean_d = 0.0, mean_dx = 0.0;
          for (int j = 0; j < cols; ++j) {
            dxhat[j] = go[j] * gv[j];
            mean_d += dxhat[j];
            mean_dx += dxhat[j] * xh[j];
          }
          mean_d /= cols;
          mean_dx /= cols;
          double* dx = t.MutableGrad(x).Row(r);
          const double is = (*inv_std)[r];
          for (int j = 0; j < cols; ++j) {
            dx[j] += is * (dxhat[j] - mean_d - xh[j] * mean_dx);
          }
        }
      });
}

Var Softmax(Var x) {
  const Tensor& xv = x.value();
  const int rows = xv.Rows(), cols = xv.Cols();
  auto probs = std::make_shared<Tensor>(xv.Shape());
  for (int r = 0; r < rows; ++r) {
    const double* in = xv.Row(r);
    double* o = probs->Row(r);
    const double mx = *std::max_element(in, in + cols);
    double s = 0.0;
    for (int j = 0; j < cols; ++j) {
      o[j] = std::exp(in[j] - mx);
      s += o[j];
    }
    K().scale(cols, 1.0 / s, o);
  }
  Tensor out = *probs;
  return x.tape()->Record(std::move(out), {x}, [x, probs, rows, cols](Tape& t, const Tensor& g) {
    Tensor& dx = t.MutableGrad(x);
    for (int r = 0; r < rows; ++r) {
      const double* pr = probs->Row(r);
      const double* go = g.Data() + static_cast<std::size_t>(r) * cols;
      const double dot = K().dot(cols, pr, go);
      double* d = dx.Row(r);
      for (int j = 0; j < cols; ++j) d[j] += pr[j] * (go[j] - dot);
    }
  });
}

Var LogSoftmax(Var x) {
  const Tensor& xv = x.value();
  const int rows = xv.Rows(), cols = xv.Cols();
  Tensor out(xv.Shape());
  auto probs = std::make_shared<Tensor>(xv.Shape());
  for (int r = 0; r < rows; ++r) {
    const double* in = xv.Row(r);
    const double mx = *std::max_element(in, in + cols);
    double s = 0.0;
    for (int j = 0; j < cols; ++j) s += std::exp(in[j] - mx);
    const double lse = mx + std::log(s);
    double* o = out.Row(r);
    double* p = probs->Row(r);
    for (int j = 0; j < cols; ++j) {
      o[j] = in[j] - lse;
      p[j] = std::exp(o[j]);
    }
  }
  return x.tape()->Record(std::move(out), {x}, [x, probs, rows, cols](Tape& t, const Tensor& g) {
    Tensor& dx = t.MutableGrad(x);
    for (int r = 0; r < rows; ++r) {
      const double* go = g.Data() + static_cast<std::size_t>(r) * cols;
      double gs = 0.0;
      for (int j = 0; j < cols; ++j) gs += go[j];
      const double* p = probs->Row(r);
      double* d = dx.Row(r);
      for (int j = 0; j < cols; ++j) d[j] += go[j] - p[j] * gs;
    }
  });
}

Var Transpose(Var a) {
  const Tensor& av = a.value();
  const int rows = av.Rows(), cols = av.Cols();
  Tensor out = Tensor::Matrix(cols, rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out.At(c, r) = av.At(r, c);
  }
  return a.tape()->Record(std::move(out), {a}, [a, rows, cols](Tape& t, const Tensor& g) {
    Tensor& da = t.MutableGrad(a);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        da.At(r, c) += g[static_cast<std::size_t>(c) * rows + r];
      }
    }
  });
}

Var SliceCols(Var a, int start, int count) {
  const Tensor& av = a.value();
  const int rows = av.Rows(), cols = av.Cols();
  AVSR_CHECK(start >= 0 && count >= 0 && start + count <= cols,
             "SliceCols out of range");
  Tensor out = Tensor::Matrix(rows, count);
  for (int r = 0; r < rows; ++r) {
    std::copy_n(av.Row(r) + start, count, out.Row(r));
  }
  return a.tape()->Record(std::move(out), {a},
                          [a, start, count, rows](Tape& t, const Tensor& g) {
                            Tensor& da = t.MutableGrad(a);
                            for (int r = 0; r < rows; ++r) {
                              K().axpy(count, 1.0, g.Data() + static_cast<std::size_t>(r) * count,
                                       da.Row(r) + start);
                            }
                          });
}

Var SliceRows(Var a, int start, int count) {
  const Tensor& av = a.value();
  const int rows = av.Rows(), cols = av.Cols();
  AVSR_CHECK(start >= 0 && count >= 0 && start + count <= rows,
             "SliceRows out of range");
  Tensor out = Tensor::Matrix(count, cols);
  std::copy_n(av.Row(start), static_cast<std::size_t>(count) * cols, out.Data());
  return a.tape()->Record(std::move(out), {a}, [a, start, count, cols](Tape& t, const Tensor& g) {
    K().axpy(static_cast<std::size_t>(count) * cols, 1.0, g.Data(),
             t.MutableGrad(a).Row(start));
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  AVSR_CHECK(!parts.empty(), "ConcatCols of nothing");
  const int rows = parts[0].rows();
  int total = 0;
  std::vector<int> offsets;
  for (const Var& p : parts) {
    AVSR_CHECK(p.rows() == rows, "ConcatCols: row mismatch");
    offsets.push_back(total);
    total += p.cols();
  }
  Tensor out = Tensor::Matrix(rows, total);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& pv = parts[i].value();
    for (int r = 0; r < rows; ++r) {
      std::copy_n(pv.Row(r), pv.Cols(), out.Row(r) + offsets[i]);
    }
  }
  return parts[0].tape()->Record(
      std::move(out), parts, [parts, offsets, rows, total](Tape& t, const Tensor& g) {
        for (std::size_t i = 0; i < parts.size(); ++i) {
          if (!t.RequiresGrad(parts[i])) continue;
          Tensor& d = t.MutableGrad(parts[i]);
          const int c = d.Cols();
          for (int r = 0; r < rows; ++r) {
            K().axpy(c, 1.0, g.Data() + static_cast<std::size_t>(r) * total + offsets[i],
                     d.Row(r));
          }
        }
      });
}

Var ConcatRows(const std::vector<Var>& parts) {
  AVSR_CHECK(!parts.empty(), "ConcatRows of nothing");
  const int cols = parts[0].cols();
  int total = 0;
  std::vector<int> offsets;
  for (const Var& p : parts) {
    AVSR_CHECK(p.cols() == cols, "ConcatRows: column mismatch");
    offsets.push_back(total);
    total += p.rows();
  }
  Tensor out = Tensor::Matrix(total, cols);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& pv = parts[i].value();
    std::copy_n(pv.Data(), pv.Size(), out.Row(offsets[i]));
  }
  return parts[0].tape()->Record(std::move(out), parts,
                                 [parts, offsets, cols](Tape& t, const Tensor& g) {
                                   for (std::size_t i = 0; i < parts.size(); ++i) {
                                     if (!t.RequiresGrad(parts[i])) continue;
                                     Tensor& d = t.MutableGrad(parts[i]);
                                     K().axpy(d.Size(), 1.0,
                                              g.Data() + static_cast<std::size_t>(offsets[i]) * cols,
                                              d.Data());
                                   }
                                 });
}

Var Reshape(Var a, std::vector<int> shape) {
  Tensor out = a.value().Reshaped(std::move(shape));
  return a.tape()->Record(std::move(out), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& da = t.MutableGrad(a);
    K().axpy(da.Size(), 1.0, g.Data(), da.Data());
  });
}

Var Sum(Var a) {
  const Tensor& av = a.value();
  double s = 0.0;
  for (std::size_t i = 0; i < av.Size(); ++i) s += av[i];
  return a.tape()->Record(Tensor::Scalar(s), {a}, [a](Tape& t, const Tensor& g) {
    Tensor& da = t.MutableGrad(a);
    for (std::size_t i = 0; i < da.Size(); ++i) da[i] += g[0];
  });
}

Var Mean(Var a) {
  const std::size_t n = a.value().Size();
  AVSR_CHECK(n > 0, "Mean of empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(n));
}

UnfoldGeometry UnfoldOutput(const std::vector<int>& in, const UnfoldSpec& s) {
  AVSR_CHECK(in.size() == 4, "Unfold expects [T x H x W x C]");
  auto out_len = [](int n, int k, int stride, int p0, int p1) {
    const int span = n + p0 + p1 - k;
    return span < 0 ? 0 : span / stride + 1;
  };
  return {out_len(in[0], s.kt, s.st, s.pad_t0, s.pad_t1),
          out_len(in[1], s.kh, s.sh, s.pad_h0, s.pad_h1),
          out_len(in[2], s.kw, s.sw, s.pad_w0, s.pad_w1)};
}

namespace {

// Calls fn(out_row, out_col_base, in_offset) for every in-range tap; used by
// both directions of Unfold so the index math lives in one place.
template <typename Fn>
void ForEachTap(const std::vector<int>& in, const UnfoldSpec& s,
                const UnfoldGeometry& og, Fn&& fn) {
  const int H = in[1], W = in[2], C = in[3];
  const int T = in[0];
  std::size_t row = 0;
  for (int ot = 0; ot < og.t; ++ot) {
    for (int oy = 0; oy < og.h; ++oy) {
      for (int ox = 0; ox < og.w; ++ox, ++row) {
        const int ix0 = ox * s.sw - s.pad_w0;
        // Taps with 0 <= ix0 + dx < W form one contiguous run per (dt, dy).
        const int dx_lo = std::max(0, -ix0);
        const int dx_hi = std::min(s.kw, W - ix0);
        if (dx_lo >= dx_hi) continue;
        const int len = (dx_hi - dx_lo) * C;
        for (int dt = 0; dt < s.kt; ++dt) {
          const int it = ot * s.st + dt - s.pad_t0;
          if (it < 0 || it >= T) continue;
          for (int dy = 0; dy < s.kh; ++dy) {
            const int iy = oy * s.sh + dy - s.pad_h0;
            if (iy < 0 || iy >= H) continue;
            const int col = ((dt * s.kh + dy) * s.kw + dx_lo) * C;
            const std::size_t off =
                ((static_cast<std::size_t>(it) * H + iy) * W + ix0 + dx_lo) * C;
            fn(row, col, off, len);
          }
        }
      }
    }
  }
}

}  // namespace

Var Unfold(Var x, const UnfoldSpec& spec) {
  const Tensor& xv = x.value();
  const std::vector<int> in = xv.Shape();
  const UnfoldGeometry og = UnfoldOutput(in, spec);
  AVSR_CHECK(og.t > 0 && og.h > 0 && og.w > 0, "Unfold: input ", xv.ShapeString(),
             " too small for kernel");
  const int C = in[3];
  const int patch = spec.kt * spec.kh * spec.kw * C;
  Tensor out = Tensor::Matrix(og.t * og.h * og.w, patch);
  const double* src = xv.Data();
  double* dst = out.Data();
  ForEachTap(in, spec, og, [&](std::size_t row, int col, std::size_t off, int len) {
    std::copy_n(src + off, len, dst + row * patch + col);
  });
  return x.tape()->Record(std::move(out), {x}, [x, spec, in, og, patch](Tape& t, const Tensor& g) {
    if (!t.RequiresGrad(x)) return;
    double* dx = t.MutableGrad(x).Data();
    const double* gd = g.Data();
    ForEachTap(in, spec, og, [&](std::size_t row, int col, std::size_t off, int len) {
      const double* gp = gd + row * patch + col;
      for (int c = 0; c < len; ++c) dx[off + c] += gp[c];
    });
  });
}

Var DepthwiseConv1d(Var x, Var w) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const int T = xv.Rows(), C = xv.Cols(), k = wv.Rows();
  AVSR_CHECK(wv.Cols() == C && k % 2 == 1, "DepthwiseConv1d: weight ",
             wv.ShapeString(), " for input ", xv.ShapeString());
  const int pad = (k - 1) / 2;
  Tensor out = Tensor::Matrix(T, C);
  for (int t = 0; t < T; ++t) {
    double* o = out.Row(t);
    for (int j = 0; j < k; ++j) {
      const int s = t + j - pad;
      if (s < 0 || s >= T) continue;
      const double* xi = xv.Row(s);
      const double* wj = wv.Row(j);
      for (int c = 0; c < C; ++c) o[c] += wj[c] * xi[c];
    }
  }
  return x.tape()->Record(std::move(out), {x, w}, [x, w, T, C, k, pad](Tape& t, const Tensor& g) {
    const bool need_x = t.RequiresGrad(x), need_w = t.RequiresGrad(w);
    const Tensor& xv = x.value();
    const Tensor& wv = w.value();
    for (int tt = 0; tt < T; ++tt) {
      const double* go = g.Data() + static_cast<std::size_t>(tt) * C;
      for (int j = 0; j < k; ++j) {
        const int s = tt + j - pad;
        if (s < 0 || s >= T) continue;
        if (need_x) {
          double* dx = t.MutableGrad(x).Row(s);
          const double* wj = wv.Row(j);
          for (int c = 0; c < C; ++c) dx[c] += go[c] * wj[c];
        }
        if (need_w) {
          double* dw = t.MutableGrad(w).Row(j);
          const double* xi = xv.Row(s);
          for (int c = 0; c < C; ++c) dw[c] += go[c] * xi[c];
        }
      }
    }
  });
}

Var AvgPool2x2(Var x) {
  const Tensor& xv = x.value();
  AVSR_CHECK(xv.Rank() == 4, "AvgPool2x2 expects [N x H x W x C]");
  const int N = xv.Dim(0), H = xv.Dim(1), W = xv.Dim(2), C = xv.Dim(3);
  const int Ho = H / 2, Wo = W / 2;
  AVSR_CHECK(Ho > 0 && Wo > 0, "AvgPool2x2: input too small");
  Tensor out({N, Ho, Wo, C});
  auto in_at = [&](int n, int y, int xx) {
    return ((static_cast<std::size_t>(n) * H + y) * W + xx) * C;
  };
  for (int n = 0; n < N; ++n) {
    for (int y = 0; y < Ho; ++y) {
      for (int xx = 0; xx < Wo; ++xx) {
        double* o = out.Data() + ((static_cast<std::size_t>(n) * Ho + y) * Wo + xx) * C;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const double* in = xv.Data() + in_at(n, 2 * y + dy, 2 * xx + dx);
            for (int c = 0; c < C; ++c) o[c] += 0.25 * in[c];
          }
        }
      }
    }
  }
  return x.tape()->Record(std::move(out), {x}, [x, N, H, W, C, Ho, Wo](Tape& t, const Tensor& g) {
    double* dx = t.MutableGrad(x).Data();
    for (int n = 0; n < N; ++n) {
      for (int y = 0; y < Ho; ++y) {
        for (int xx = 0; xx < Wo; ++xx) {
          const double* go =
              g.Data() + ((static_cast<std::size_t>(n) * Ho + y) * Wo + xx) * C;
          for (int dy = 0; dy < 2; ++dy) {
            for (int ddx = 0; ddx < 2; ++ddx) {
              double* d =
                  dx + ((static_cast<std::size_t>(n) * H + 2 * y + dy) * W + 2 * xx + ddx) * C;
              for (int c = 0; c < C; ++c) d[c] += 0.25 * go[c];
            }
          }
        }
      }
    }
  });
}

Var MeanSpatial(Var x) {
  const Tensor& xv = x.value();
  AVSR_CHECK(xv.Rank() == 4, "MeanSpatial expects [N x H x W x C]");
  const int N = xv.Dim(0), HW = xv.Dim(1) * xv.Dim(2), C = xv.Dim(3);
  Tensor out = Tensor::Matrix(N, C);
  const double inv = 1.0 / HW;
  for (int n = 0; n < N; ++n) {
    for (int p = 0; p < HW; ++p) {
      K().axpy(C, inv, xv.Data() + (static_cast<std::size_t>(n) * HW + p) * C, out.Row(n));
    }
  }
  return x.tape()->Record(std::move(out), {x}, [x, N, HW, C, inv](Tape& t, const Tensor& g) {
    double* dx = t.MutableGrad(x).Data();
    for (int n = 0; n < N; ++n) {
      for (int p = 0; p < HW; ++p) {
        K().axpy(C, inv, g.Data() + static_cast<std::size_t>(n) * C,
                 dx + (static_cast<std::size_t>(n) * HW + p) * C);
      }
    }
  });
}

Var Embedding(Var table, const std::vector<int>& ids) {
  const Tensor& tv = table.value();
  const int V = tv.Rows(), D = tv.Cols();
  Tensor out = Tensor::Matrix(static_cast<int>(ids.size()), D);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    AVSR_CHECK(ids[i] >= 0 && ids[i] < V, "Embedding id ", ids[i], " out of range");
    std::copy_n(tv.Row(ids[i]), D, out.Row(static_cast<int>(i)));
  }
  return table.tape()->Record(std::move(out), {table}, [table, ids, D](Tape& t, const Tensor& g) {
    Tensor& dt = t.MutableGrad(table);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      K().axpy(D, 1.0, g.Data() + i * D, dt.Row(ids[i]));
    }
  });
}

Var RelativePositionBias(Var table, int head, int length) {
  const Tensor& tv = table.value();
  const int width = tv.Cols();
  AVSR_CHECK(width % 2 == 1 && head >= 0 && head < tv.Rows(),
             "RelativePositionBias: bad table ", tv.ShapeString());
  const int max_rel = (width - 1) / 2;
  auto bucket = [max_rel](int i, int j) {
    return std::clamp(j - i, -max_rel, max_rel) + max_rel;
  };
  Tensor out = Tensor::Matrix(length, length);
  const double* row = tv.Row(head);
  for (int i = 0; i < length; ++i) {
    for (int j = 0; j < length; ++j) out.At(i, j) = row[bucket(i, j)];
  }
  return table.tape()->Record(std::move(out), {table},
                              [table, head, length, bucket](Tape& t, const Tensor& g) {
                                double* d = t.MutableGrad(table).Row(head);
                                for (int i = 0; i < length; ++i) {
                                  for (int j = 0; j < length; ++j) {
                                    d[bucket(i, j)] += g[static_cast<std::size_t>(i) * length + j];
                                  }
                                }
                              });
}

}  // namespace avsr::ad
