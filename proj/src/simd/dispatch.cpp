// Copyright 2026 The splitshot Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string_view>

#include "splitshot/simd/kernels.hpp"

namespace splitshot::simd {

#ifdef SPLITSHOT_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#ifdef SPLITSHOT_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  static const KernelTable& active = [] () -> const KernelTable& {
    const char* forced = std::getenv("SPLITSHOT_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return active;
}

}  // namespace splitshot::simd
