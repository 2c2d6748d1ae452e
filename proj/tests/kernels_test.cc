// tests/kernels_test.cc

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

#include <cmath>
#include <random>
#include <vector>

#include "avsr/base/kernels.h"

namespace avsr {
namespace {

std::vector<double> RandomVec(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (auto& x : v) x = nd(rng);
  return v;
}

// Rounding differs between the FMA and scalar paths; bound the difference by
// the magnitude of the summed terms.
void ExpectClose(const std::vector<double>& a, const std::vector<double>& b,
                 double scale) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a[i], b[i], 1e-12 * scale) << "index " << i;
  }
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = Avx2Kernels();
    if (simd_ == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  }
  const KernelTable& ref_ = ScalarKernels();
  const KernelTable* simd_ = nullptr;
};

TEST_F(KernelEquivalence, GemmAllLayoutsOddShapes) {
  std::mt19937_64 rng(11);
  const int dims[] = {1, 3, 4, 5, 8, 9, 17, 33};
  for (int m : dims) {
    for (int n : dims) {
      for (int k : {1, 2, 7, 16, 31}) {
        const auto a = RandomVec(static_cast<std::size_t>(m) * k, rng);
        const auto b = RandomVec(static_cast<std::size_t>(k) * n, rng);
        const auto c0 = RandomVec(static_cast<std::size_t>(m) * n, rng);
        const double scale = 4.0 * k;
        {
          auto r = c0, s = c0;
          ref_.gemm_nn(m, n, k, a.data(), k, b.data(), n, r.data(), n);
          simd_->gemm_nn(m, n, k, a.data(), k, b.data(), n, s.data(), n);
          ExpectClose(r, s, scale);
        }
        {
          // a viewed as [k x m], b as [k x n]
          auto r = c0, s = c0;
          ref_.gemm_tn(m, n, k, a.data(), m, b.data(), n, r.data(), n);
          simd_->gemm_tn(m, n, k, a.data(), m, b.data(), n, s.data(), n);
          ExpectClose(r, s, scale);
        }
        {
          // a as [m x k], b viewed as [n x k]
          auto r = c0, s = c0;
          ref_.gemm_nt(m, n, k, a.data(), k, b.data(), k, r.data(), n);
          simd_->gemm_nt(m, n, k, a.data(), k, b.data(), k, s.data(), n);
          ExpectClose(r, s, scale);
        }
      }
    }
  }
}

TEST_F(KernelEquivalence, GemmRespectsLeadingDimensions) {
  std::mt19937_64 rng(12);
  const int m = 6, n = 10, k = 5, lda = 9, ldb = 13, ldc = 12;
  const auto a = RandomVec(m * lda, rng);
  const auto b = RandomVec(k * ldb, rng);
  auto r = RandomVec(m * ldc, rng);
  auto s = r;
  ref_.gemm_nn(m, n, k, a.data(), lda, b.data(), ldb, r.data(), ldc);
  simd_->gemm_nn(m, n, k, a.data(), lda, b.data(), ldb, s.data(), ldc);
  ExpectClose(r, s, 20.0);
}

TEST_F(KernelEquivalence, VectorKernels) {
  std::mt19937_64 rng(13);
  for (std::size_t n : {0, 1, 3, 4, 7, 8, 9, 31, 64, 1001}) {
    const auto x = RandomVec(n, rng);
    const auto y = RandomVec(n, rng);
    const double scale = 4.0 * (n + 1);
    EXPECT_NEAR(ref_.dot(n, x.data(), y.data()), simd_->dot(n, x.data(), y.data()),
                1e-12 * scale);
    EXPECT_NEAR(ref_.sum_squares(n, x.data()), simd_->sum_squares(n, x.data()),
                1e-12 * scale);
    auto r = y, s = y;
    ref_.axpy(n, 0.37, x.data(), r.data());
    simd_->axpy(n, 0.37, x.data(), s.data());
    ExpectClose(r, s, 4.0);
    r = x;
    s = x;
    ref_.scale(n, -1.5, r.data());
    simd_->scale(n, -1.5, s.data());
    EXPECT_EQ(r, s);
    ref_.hadamard(n, x.data(), y.data(), r.data());
    simd_->hadamard(n, x.data(), y.data(), s.data());
    EXPECT_EQ(r, s);
  }
}

TEST(Kernels, ScalarGemmMatchesHandExample) {
  const double a[] = {1, 2, 3, 4};  // [[1,2],[3,4]]
  const double b[] = {5, 6, 7, 8};
  double c[] = {1, 1, 1, 1};
  ScalarKernels().gemm_nn(2, 2, 2, a, 2, b, 2, c, 2);
  EXPECT_DOUBLE_EQ(c[0], 20);
  EXPECT_DOUBLE_EQ(c[1], 23);
  EXPECT_DOUBLE_EQ(c[2], 44);
  EXPECT_DOUBLE_EQ(c[3], 51);
}

TEST(Kernels, OverrideSwitchesActiveTable) {
  SetKernelsForTesting(&ScalarKernels());
  EXPECT_EQ(Kernels().name, "scalar");
  SetKernelsForTesting(nullptr);
  if (Avx2Kernels() != nullptr && std::getenv("AVSR_KERNELS") == nullptr) {
    EXPECT_EQ(Kernels().name, "avx2");
  }
}

}  // namespace
}  // namespace avsr
