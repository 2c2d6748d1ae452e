// src/base/kernels_avx2.cc

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

// Compiled with -mavx2 -mfma. Only reached through Avx2Kernels(), which checks
// CPU support before handing out the table.

#include <immintrin.h>

#include <vector>

#include "avsr/base/kernels.h"

namespace avsr {
namespace internal {
namespace {

inline double HorizontalSum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// Shared body for NN and TN. `a_row_stride` / `a_col_stride` address A(i, p).
template <bool kTransA>
void GemmBody(int m, int n, int k, const double* a, int lda, const double* b,
              int ldb, double* c, int ldc) {
  auto a_at = [&](int i, int p) -> double {
    if constexpr (kTransA) {
      return a[static_cast<std::size_t>(p) * lda + i];
    } else {
      return a[static_cast<std::size_t>(i) * lda + p];
    }
  };
  int i = 0;
  for (; i + 4 <= m; i += 4) {
    double* c0 = c + static_cast<std::size_t>(i) * ldc;
    double* c1 = c0 + ldc;
    double* c2 = c1 + ldc;
    double* c3 = c2 + ldc;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      __m256d r00 = _mm256_loadu_pd(c0 + j), r01 = _mm256_loadu_pd(c0 + j + 4);
      __m256d r10 = _mm256_loadu_pd(c1 + j), r11 = _mm256_loadu_pd(c1 + j + 4);
      __m256d r20 = _mm256_loadu_pd(c2 + j), r21 = _mm256_loadu_pd(c2 + j + 4);
      __m256d r30 = _mm256_loadu_pd(c3 + j), r31 = _mm256_loadu_pd(c3 + j + 4);
      for (int p = 0; p < k; ++p) {
        const double* brow = b + static_cast<std::size_t>(p) * ldb + j;
        const __m256d b0 = _mm256_loadu_pd(brow);
        const __m256d b1 = _mm256_loadu_pd(brow + 4);
        __m256d av = _mm256_set1_pd(a_at(i, p));
        r00 = _mm256_fmadd_pd(av, b0, r00);
        r01 = _mm256_fmadd_pd(av, b1, r01);
        av = _mm256_set1_pd(a_at(i + 1, p));
        r10 = _mm256_fmadd_pd(av, b0, r10);
        r11 = _mm256_fmadd_pd(av, b1, r11);
        av = _mm256_set1_pd(a_at(i + 2, p));
        r20 = _mm256_fmadd_pd(av, b0, r20);
        r21 = _mm256_fmadd_pd(av, b1, r21);
        av = _mm256_set1_pd(a_at(i + 3, p));
        r30 = _mm256_fmadd_pd(av, b0, r30);
        r31 = _mm256_fmadd_pd(av, b1, r31);
      }
      _mm256_storeu_pd(c0 + j, r00);
      _mm256_storeu_pd(c0 + j + 4, r01);
      _mm256_storeu_pd(c1 + j, r10);
      _mm256_storeu_pd(c1 + j + 4, r11);
      _mm256_storeu_pd(c2 + j, r20);
      _mm256_storeu_pd(c2 + j + 4, r21);
      _mm256_storeu_pd(c3 + j, r30);
      _mm256_storeu_pd(c3 + j + 4, r31);
    }
    for (; j + 4 <= n; j += 4) {
      __m256d r0 = _mm256_loadu_pd(c0 + j), r1 = _mm256_loadu_pd(c1 + j);
      __m256d r2 = _mm256_loadu_pd(c2 + j), r3 = _mm256_loadu_pd(c3 + j);
      for (int p = 0; p < k; ++p) {
        const __m256d bv =
            _mm256_loadu_pd(b + static_cast<std::size_t>(p) * ldb + j);
        r0 = _mm256_fmadd_pd(_mm256_set1_pd(a_at(i, p)), bv, r0);
        r1 = _mm256_fmadd_pd(_mm256_set1_pd(a_at(i + 1, p)), bv, r1);
        r2 = _mm256_fmadd_pd(_mm256_set1_pd(a_at(i + 2, p)), bv, r2);
        r3 = _mm256_fmadd_pd(_mm256_set1_pd(a_at(i + 3, p)), bv, r3);
      }
      _mm256_storeu_pd(c0 + j, r0);
      _mm256_storeu_pd(c1 + j, r1);
      _mm256_storeu_pd(c2 + j, r2);
      _mm256_storeu_pd(c3 + j, r3);
    }
    for (; j < n; ++j) {
      double s0 = c0[j], s1 = c1[j], s2 = c2[j], s3 = c3[j];
      for (int p = 0; p < k; ++p) {
        const double bv = b[static_cast<std::size_t>(p) * ldb + j];
        s0 += a_at(i, p) * bv;
        s1 += a_at(i + 1, p) * bv;
        s2 += a_at(i + 2, p) * bv;
        s3 += a_at(i + 3, p) * bv;
      }
      c0[j] = s0;
      c1[j] = s1;
      c2[j] = s2;
      c3[j] = s3;
    }
  }
  for (; i < m; ++i) {
    double* crow = c + static_cast<std::size_t>(i) * ldc;
    for (int p = 0; p < k; ++p) {
      const double av = a_at(i, p);
      const __m256d avv = _mm256_set1_pd(av);
      const double* brow = b + static_cast<std::size_t>(p) * ldb;
      int j = 0;
      for (; j + 4 <= n; j += 4) {
        _mm256_storeu_pd(crow + j,
                         _mm256_fmadd_pd(avv, _mm256_loadu_pd(brow + j),
                                         _mm256_loadu_pd(crow + j)));
      }
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void GemmNN(int m, int n, int k, const double* a, int lda, const double* b,
            int ldb, double* c, int ldc) {
  GemmBody<false>(m, n, k, a, lda, b, ldb, c, ldc);
}

void GemmTN(int m, int n, int k, const double* a, int lda, const double* b,
            int ldb, double* c, int ldc) {
  GemmBody<true>(m, n, k, a, lda, b, ldb, c, ldc);
}

void GemmNT(int m, int n, int k, const double* a, int lda, const double* b,
            int ldb, double* c, int ldc) {
  // Transpose B into a [k x n] scratch block and reuse the NN kernel.
  thread_local std::vector<double> scratch;
  scratch.resize(static_cast<std::size_t>(k) * n);
  for (int j = 0; j < n; ++j) {
    const double* brow = b + static_cast<std::size_t>(j) * ldb;
    for (int p = 0; p < k; ++p) scratch[static_cast<std::size_t>(p) * n + j] = brow[p];
  }
  GemmBody<false>(m, n, k, a, lda, scratch.data(), n, c, ldc);
}

double Dot(std::size_t n, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  double s = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void Axpy(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void Scale(std::size_t n, double alpha, double* x) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

void Hadamard(std::size_t n, const double* x, const double* y, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

double SumSquares(std::size_t n, const double* x) { return Dot(n, x, x); }

}  // namespace

const KernelTable& Avx2KernelTable() {
  static const KernelTable table{"avx2", GemmNN,  GemmTN,   GemmNT,
                                 Dot,    Axpy,    Scale,    Hadamard,
                                 SumSquares};
  return table;
}

}  // namespace internal
}  // namespace avsr
