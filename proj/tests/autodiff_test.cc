// tests/autodiff_test.cc

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

#include <gtest/gtest.h>

#include <random>

#include "avsr/nn/autodiff.h"
#include "grad_check.h"

namespace avsr {
namespace {

using ad::Tape;
using ad::Var;
using testing::CheckInputGradients;

Tensor RandomTensor(std::vector<int> shape, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.Size(); ++i) t[i] = nd(rng);
  return t;
}

// Contract a tensor-valued op to a scalar with fixed random weights so every
// output entry influences the loss differently.
Var Contract(Var y, std::uint64_t seed) {
  Tensor w = RandomTensor(y.value().Shape(), seed);
  return ad::Sum(ad::Mul(y, y.tape()->Constant(std::move(w))));
}

void ExpectGradOk(const std::vector<Tensor>& inputs, const testing::BuildFn& fn) {
  const auto r = CheckInputGradients(inputs, fn);
  EXPECT_LT(r.max_rel_err, 1e-5) << "checked " << r.checked;
}

TEST(Autodiff, MatMulVariants) {
  ExpectGradOk({RandomTensor({3, 4}, 1), RandomTensor({4, 5}, 2)},
               [](Tape&, const std::vector<Var>& v) {
                 return Contract(ad::MatMul(v[0], v[1]), 3);
               });
  ExpectGradOk({RandomTensor({3, 4}, 1), RandomTensor({6, 4}, 2)},
               [](Tape&, const std::vector<Var>& v) {
                 return Contract(ad::MatMulNT(v[0], v[1]), 3);
               });
}

TEST(Autodiff, ElementwiseAndActivations) {
  ExpectGradOk({RandomTensor({4, 6}, 4), RandomTensor({4, 6}, 5)},
               [](Tape&, const std::vector<Var>& v) {
                 Var y = ad::Add(ad::Mul(v[0], v[1]), ad::Sub(v[0], ad::Scale(v[1], 0.3)));
                 return Contract(ad::Swish(ad::Sigmoid(y)), 6);
               });
  ExpectGradOk({RandomTensor({3, 8}, 7)}, [](Tape&, const std::vector<Var>& v) {
    return Contract(ad::Glu(v[0]), 8);
  });
}

TEST(Autodiff, LayerNormSoftmaxLogSoftmax) {
  ExpectGradOk({RandomTensor({5, 7}, 9), RandomTensor({7}, 10), RandomTensor({7}, 11)},
               [](Tape&, const std::vector<Var>& v) {
                 return Contract(ad::LayerNorm(v[0], v[1], v[2]), 12);
               });
  ExpectGradOk({RandomTensor({4, 5}, 13)}, [](Tape&, const std::vector<Var>& v) {
    return Contract(ad::Softmax(v[0]), 14);
  });
  ExpectGradOk({RandomTensor({4, 5}, 15)}, [](Tape&, const std::vector<Var>& v) {
    return Contract(ad::LogSoftmax(v[0]), 16);
  });
}

TEST(Autodiff, SoftmaxRowsSumToOne) {
  Tape tape(false);
  Var p = ad::Softmax(tape.Leaf(RandomTensor({6, 9}, 17, 30.0)));
  for (int r = 0; r < 6; ++r) {
    double s = 0;
    for (int c = 0; c < 9; ++c) s += p.value().At(r, c);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Autodiff, ShapeOps) {
  ExpectGradOk({RandomTensor({4, 6}, 18), RandomTensor({4, 3}, 19), RandomTensor({2, 6}, 20)},
               [](Tape&, const std::vector<Var>& v) {
                 Var a = ad::ConcatCols({ad::SliceCols(v[0], 1, 4), v[1]});
                 Var b = ad::ConcatRows({v[0], v[2]});
                 Var c = ad::Transpose(ad::SliceRows(b, 1, 4));
                 Var d = ad::Reshape(c, {4, 6});
                 return ad::Add(Contract(a, 21), Contract(ad::AddRowVector(d, ad::SliceRows(v[2], 0, 1)), 22));
               });
  ExpectGradOk({RandomTensor({3, 4}, 23)}, [](Tape& t, const std::vector<Var>& v) {
    Tensor c = RandomTensor({3, 4}, 24);
    return ad::Mean(ad::Mul(ad::AddConstant(v[0], c), v[0]));
  });
}

TEST(Autodiff, UnfoldMatchesDirectConvolution) {
  // 3D conv through Unfold + MatMul vs a direct loop.
  const Tensor x = RandomTensor({4, 6, 5, 2}, 25);
  const Tensor w = RandomTensor({3 * 3 * 3 * 2, 3}, 26);
  ad::UnfoldSpec s;
  s.kt = 3; s.kh = 3; s.kw = 3;
  s.sh = 2; s.sw = 2;
  s.pad_t0 = s.pad_t1 = 1;
  s.pad_h0 = s.pad_h1 = 1;
  s.pad_w0 = s.pad_w1 = 1;
  Tape tape(false);
  Var y = ad::MatMul(ad::Unfold(tape.Leaf(x), s), tape.Leaf(w));
  const auto og = ad::UnfoldOutput(x.Shape(), s);
  ASSERT_EQ(og.t, 4);
  ASSERT_EQ(og.h, 3);
  ASSERT_EQ(og.w, 3);
  for (int t = 0; t < og.t; ++t)
    for (int oy = 0; oy < og.h; ++oy)
      for (int ox = 0; ox < og.w; ++ox)
        for (int co = 0; co < 3; ++co) {
          double ref = 0;
          for (int dt = 0; dt < 3; ++dt)
            for (int dy = 0; dy < 3; ++dy)
              for (int dx = 0; dx < 3; ++dx)
                for (int ci = 0; ci < 2; ++ci) {
                  const int it = t + dt - 1, iy = oy * 2 + dy - 1, ix = ox * 2 + dx - 1;
                  if (it < 0 || it >= 4 || iy < 0 || iy >= 6 || ix < 0 || ix >= 5) continue;
                  const int widx = ((dt * 3 + dy) * 3 + dx) * 2 + ci;
                  ref += x[((static_cast<std::size_t>(it) * 6 + iy) * 5 + ix) * 2 + ci] *
                         w.At(widx, co);
                }
          const int row = (t * og.h + oy) * og.w + ox;
          EXPECT_NEAR(y.value().At(row, co), ref, 1e-12);
        }
}

TEST(Autodiff, ConvolutionGradients) {
  ExpectGradOk({RandomTensor({3, 5, 4, 2}, 27)}, [](Tape&, const std::vector<Var>& v) {
    ad::UnfoldSpec s;
    s.kt = 2; s.kh = 3; s.kw = 2; s.sh = 2;
    s.pad_t0 = 1; s.pad_h0 = 1; s.pad_h1 = 1;
    return Contract(ad::Unfold(v[0], s), 28);
  });
  ExpectGradOk({RandomTensor({7, 3}, 29), RandomTensor({5, 3}, 30)},
               [](Tape&, const std::vector<Var>& v) {
                 return Contract(ad::DepthwiseConv1d(v[0], v[1]), 31);
               });
  ExpectGradOk({RandomTensor({2, 5, 4, 3}, 32)}, [](Tape&, const std::vector<Var>& v) {
    return ad::Add(Contract(ad::AvgPool2x2(v[0]), 33), Contract(ad::MeanSpatial(v[0]), 34));
  });
}

TEST(Autodiff, EmbeddingAndRelativeBias) {
  ExpectGradOk({RandomTensor({5, 3}, 35)}, [](Tape&, const std::vector<Var>& v) {
    return Contract(ad::Embedding(v[0], {4, 0, 4, 2}), 36);
  });
  ExpectGradOk({RandomTensor({2, 5}, 37)}, [](Tape&, const std::vector<Var>& v) {
    return Contract(ad::RelativePositionBias(v[0], 1, 6), 38);
  });
}

TEST(Autodiff, ParameterGradientsAccumulate) {
  ad::Parameter p{"w", Tensor({2, 2}, 1.0), Tensor()};
  for (int rep = 0; rep < 2; ++rep) {
    Tape tape;
    tape.Backward(ad::Sum(tape.Param(&p)));
  }
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(p.grad[i], 2.0);
}

TEST(Autodiff, DisabledTapeRecordsNoGradients) {
  Tape tape(false);
  Var x = tape.Leaf(RandomTensor({2, 2}, 39));
  Var y = ad::Sum(ad::Swish(x));
  EXPECT_FALSE(tape.RequiresGrad(y));
}

}  // namespace
}  // namespace avsr
