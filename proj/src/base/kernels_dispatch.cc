// src/base/kernels_dispatch.cc

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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "avsr/base/kernels.h"

namespace avsr {

#ifdef AVSR_HAVE_AVX2
namespace internal {
const KernelTable& Avx2KernelTable();
}
#endif

namespace {

std::atomic<const KernelTable*> g_override{nullptr};

bool CpuHasAvx2Fma() {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& AutoSelect() {
  const char* env = std::getenv("AVSR_KERNELS");
  if (env != nullptr && std::string_view(env) == "scalar") {
    return ScalarKernels();
  }
  if (const KernelTable* avx2 = Avx2Kernels()) return *avx2;
  return ScalarKernels();
}

}  // namespace

const KernelTable* Avx2Kernels() {
#ifdef AVSR_HAVE_AVX2
  static const bool supported = CpuHasAvx2Fma();
  return supported ? &internal::Avx2KernelTable() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& Kernels() {
  if (const KernelTable* t = g_override.load(std::memory_order_acquire)) {
    return *t;
  }
  static const KernelTable& selected = AutoSelect();
  return selected;
}

void SetKernelsForTesting(const KernelTable* table) {
  g_override.store(table, std::memory_order_release);
}

}  // namespace avsr
