// include/avsr/base/kernels.h

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

#ifndef AVSR_BASE_KERNELS_H_
#define AVSR_BASE_KERNELS_H_

#include <cstddef>
#include <string_view>

namespace avsr {

// Dense double-precision inner loops. Every entry has a portable scalar
// reference and, when the CPU supports it, an AVX2+FMA variant. All matrices
// are row-major with explicit leading dimensions. Gemm variants accumulate
// into C (C += op(A) * op(B)).
struct KernelTable {
  std::string_view name;

  // C[m x n] += A[m x k] * B[k x n]
  void (*gemm_nn)(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc);
  // C[m x n] += A^T * B, A stored as [k x m], B as [k x n]
  void (*gemm_tn)(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc);
  // C[m x n] += A * B^T, A stored as [m x k], B as [n x k]
  void (*gemm_nt)(int m, int n, int k, const double* a, int lda,
                  const double* b, int ldb, double* c, int ldc);

  double (*dot)(std::size_t n, const double* x, const double* y);
  // y += alpha * x
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
  // x *= alpha
  void (*scale)(std::size_t n, double alpha, double* x);
  // out = x * y (elementwise); out may alias x or y
  void (*hadamard)(std::size_t n, const double* x, const double* y,
                   double* out);
  double (*sum_squares)(std::size_t n, const double* x);
};

const KernelTable& ScalarKernels();

// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* Avx2Kernels();

// The table used by the library. Chosen once: AVX2 when available unless the
// environment variable AVSR_KERNELS=scalar forces the reference path.
const KernelTable& Kernels();

// Test hook: override the active table (pass nullptr to restore auto-select).
void SetKernelsForTesting(const KernelTable* table);

}  // namespace avsr

#endif  // AVSR_BASE_KERNELS_H_
